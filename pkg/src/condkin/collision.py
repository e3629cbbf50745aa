"""Event-based assembly of the collision right-hand side.

Each interaction is an event that removes unit masses at its input cells
and adds unit masses at its outputs.  Every event frequency lies on the
half-cell lattice w = q * dx / 2: cell i sits at q = 2i + 1, the atom at
q = 0, and even q >= 2 is the midpoint of two neighbouring cells (where the
two-point allocation splits 1/2 : 1/2).  The kernels therefore accumulate
into integer lattice slots, and one conversion step maps the lattice to
cells, atom and overflow.

Two interchangeable backends compute the lattice: parallel numba loops
(one private accumulator row per outer index, rows reduced with
``math.fsum`` so the result does not depend on the thread count) and a
vectorised numpy path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from ._accel import njit, prange
from .dispersion import DispersionModel
from .grid import GridMeasure, GridSpec, _eval_phi
from .kernels import KernelParams


@dataclass
class RateMeasure:
    """Time derivative of a GridMeasure plus per-operator ledgers.

    ``number_flux_*`` is the rate of change of the number carried by the
    events, counting mass sent to overflow; the change of
    ``GridMeasure.total_number`` is ``sum(cell_rate) + atom_rate``.
    ``throughput`` is the total event rate weighted by output frequency and
    sets the scale of ``energy_residual``.
    """

    cell_rate: np.ndarray
    atom_rate: float = 0.0
    overflow_number_rate: float = 0.0
    overflow_energy_rate: float = 0.0
    number_flux_r1: float = 0.0
    number_flux_r2: float = 0.0
    number_flux_r3: float = 0.0
    energy_residual: float = 0.0
    throughput: float = 0.0

    @classmethod
    def zeros(cls, n_cells: int) -> "RateMeasure":
        return cls(np.zeros(n_cells))

    def __add__(self, other: "RateMeasure") -> "RateMeasure":
        return RateMeasure(
            self.cell_rate + other.cell_rate,
            self.atom_rate + other.atom_rate,
            self.overflow_number_rate + other.overflow_number_rate,
            self.overflow_energy_rate + other.overflow_energy_rate,
            self.number_flux_r1 + other.number_flux_r1,
            self.number_flux_r2 + other.number_flux_r2,
            self.number_flux_r3 + other.number_flux_r3,
            self.energy_residual + other.energy_residual,
            self.throughput + other.throughput,
        )

    @property
    def number_rate(self) -> float:
        return float(self.atom_rate + math.fsum(self.cell_rate))

    def pairing(self, spec: GridSpec, phi) -> float:
        """sum over nodes of rate * phi(node) (atom included, overflow excluded)."""
        vals = _eval_phi(phi, spec.nodes)
        return float(math.fsum(np.concatenate(([vals[0] * self.atom_rate], vals[1:] * self.cell_rate))))

    def is_zero(self) -> bool:
        return (not np.any(self.cell_rate) and self.atom_rate == 0
                and self.overflow_number_rate == 0 and self.overflow_energy_rate == 0)


# -- lookup tables -------------------------------------------------------------

@dataclass(frozen=True)
class _Tables:
    n_cells: int
    n_act: int
    n_slots: int
    half_dx: float
    centers: np.ndarray
    frakA: np.ndarray
    theta: np.ndarray
    kabs: np.ndarray


@lru_cache(maxsize=32)
def _tables(spec: GridSpec, model: DispersionModel, cutoff_n: float) -> _Tables:
    centers = spec.centers
    n_act = int(np.count_nonzero(centers <= cutoff_n))
    n_slots = max(2 * spec.n_cells, 6 * n_act) + 2
    w = np.arange(n_slots) * (0.5 * spec.width)
    tabs = [model.frakA_of(w), model.theta_of(w), model.k_of_omega(w)]
    # the atom slot of theta is unused (no event outputs at omega = 0)
    tabs[1][0] = 0.0
    for t in tabs:
        t.setflags(write=False)
    centers.setflags(write=False)
    return _Tables(spec.n_cells, n_act, n_slots, 0.5 * spec.width, centers, *tabs)


def _lattice_to_rate(lat: np.ndarray, tot_number: float, throughput: float,
                     tab: _Tables, which: str) -> RateMeasure:
    n = tab.n_cells
    cell = lat[1:2 * n:2].copy()
    even = 0.5 * lat[2:2 * n:2]
    cell[:-1] += even
    cell[1:] += even
    tail = lat[2 * n:]
    q_tail = np.arange(2 * n, lat.size, dtype=float)
    ovf_n = math.fsum(tail)
    ovf_e = math.fsum(tail * q_tail) * tab.half_dx
    resid = math.fsum(np.concatenate((cell * tab.centers, [ovf_e])))
    rm = RateMeasure(cell, float(lat[0]), ovf_n, ovf_e, energy_residual=resid,
                     throughput=throughput * tab.half_dx)
    setattr(rm, "number_flux_" + which, tot_number)
    return rm


def _reduce_rows(rows: np.ndarray) -> np.ndarray:
    # exactly rounded column sums: independent of row order and thread count
    return np.array([math.fsum(col) for col in rows.T])


# -- numba kernels ---------------------------------------------------------------

@njit(parallel=True, cache=True)
def _r1_rows(g, A, n_act, n_slots, c12):
    rows = np.zeros((n_act, n_slots))
    tot = np.zeros((n_act, 3))
    for i in prange(n_act):
        gi = g[i]
        if gi == 0.0:
            continue
        qi = 2 * i + 1
        for j in range(n_act):
            gj = g[j]
            if gj == 0.0:
                continue
            qj = 2 * j + 1
            q = 2 * (i + j + 1)
            r = c12 * A[q] * gi * gj
            rows[i, qi] -= r
            rows[i, qj] -= r
            rows[i, q] += r
            tot[i, 0] += r
            tot[i, 2] += r * q
            if j < i:
                q = 2 * (i - j)
                r = 2.0 * c12 * A[q] * gi * gj
                rows[i, qi] -= r
                rows[i, q] += r
                rows[i, qj] += r
                tot[i, 1] += r
                tot[i, 2] += r * q
    return rows, tot


@njit(parallel=True, cache=True)
def _r2_rows(g, centers, Th, K, n_act, n_slots, c22, mu):
    rows = np.zeros((n_act, n_slots))
    tot = np.zeros((n_act, 1))
    for i in prange(n_act):
        gi = g[i]
        if gi == 0.0:
            continue
        qi = 2 * i + 1
        ki = K[qi]
        for j in range(i, n_act):
            gj = g[j]
            if gj == 0.0:
                continue
            qj = 2 * j + 1
            kj = K[qj]
            gij = gi * gj if i == j else 2.0 * gi * gj
            lmax = min(i + j, n_act - 1)
            for l in range(lmax + 1):
                if l == i or l == j:
                    continue  # output lands on the other input: no net effect
                gl = g[l]
                if gl == 0.0:
                    continue
                ql = 2 * l + 1
                kl = K[ql]
                qo = 2 * (i + j - l) + 1
                ko = K[qo]
                if mu == 0.0:
                    w = 1.0
                else:
                    w = (max(abs(centers[i] - centers[l]), abs(centers[j] - centers[l]))
                         / (2.0 * (centers[i] + centers[j]))) ** mu
                kern = Th[qo] * w * min(min(ki, kj), min(kl, ko)) / (ki * kj * kl)
                r = c22 * kern * gij * gl
                rows[i, qi] -= r
                rows[i, qj] -= r
                rows[i, ql] += r
                rows[i, qo] += r
                tot[i, 0] += r * (qo + ql)
    return rows, tot


@njit(parallel=True, cache=True)
def _r3_rows(g, A, n_act, n_slots, c31):
    rows = np.zeros((n_act, n_slots))
    tot = np.zeros((n_act, 3))
    for i in prange(n_act):
        gi = g[i]
        if gi == 0.0:
            continue
        qi = 2 * i + 1
        for j in range(n_act):
            gj = g[j]
            if gj == 0.0:
                continue
            qj = 2 * j + 1
            for l in range(j, n_act):
                gl = g[l]
                if gl == 0.0:
                    continue
                ql = 2 * l + 1
                mult = 1.0 if j == l else 2.0
                ggg = mult * gi * gj * gl
                q = 2 * (i + j + l) + 3
                r = c31 * A[q] * ggg
                rows[i, qi] -= r
                rows[i, qj] -= r
                rows[i, ql] -= r
                rows[i, q] += r
                tot[i, 0] += r
                tot[i, 2] += r * q
                if i >= j + l + 1:
                    q = 2 * (i - j - l) - 1
                    r = 3.0 * c31 * A[q] * ggg
                    rows[i, qi] -= r
                    rows[i, q] += r
                    rows[i, qj] += r
                    rows[i, ql] += r
                    tot[i, 1] += r
                    tot[i, 2] += r * (q + qj + ql)
    return rows, tot


# -- numpy kernels -----------------------------------------------------------------

def _np_r1(g, tab: _Tables, c12):
    n = tab.n_act
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    gg = np.outer(g, g)
    lat = np.zeros(tab.n_slots)
    q = 2 * (i + j + 1)
    r = c12 * tab.frakA[q] * gg
    lat[1:2 * n:2] -= r.sum(axis=1) + r.sum(axis=0)
    lat += np.bincount(q.ravel(), weights=r.ravel(), minlength=tab.n_slots)
    coag = math.fsum(r.ravel())
    thr = math.fsum((r * q).ravel())
    low = j < i
    qf = 2 * (i - j)[low]
    rf = 2.0 * c12 * tab.frakA[qf] * gg[low]
    lat[1:2 * n:2] += np.bincount(j[low], weights=rf, minlength=n) - np.bincount(i[low], weights=rf, minlength=n)
    lat += np.bincount(qf, weights=rf, minlength=tab.n_slots)
    frag = math.fsum(rf)
    thr += math.fsum(rf * qf)
    return lat, frag - coag, thr


def _np_r2(g, tab: _Tables, c22, mu):
    n = tab.n_act
    i, j, l = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    keep = (i <= j) & (l <= i + j) & (l != i) & (l != j)
    i, j, l = i[keep], j[keep], l[keep]
    K, c = tab.kabs, tab.centers
    qi, qj, ql = 2 * i + 1, 2 * j + 1, 2 * l + 1
    qo = 2 * (i + j - l) + 1
    if mu == 0.0:
        w = 1.0
    else:
        w = (np.maximum(np.abs(c[i] - c[l]), np.abs(c[j] - c[l])) / (2.0 * (c[i] + c[j]))) ** mu
    kern = tab.theta[qo] * w * np.minimum(np.minimum(K[qi], K[qj]), np.minimum(K[ql], K[qo])) / (K[qi] * K[qj] * K[ql])
    r = c22 * kern * np.where(i == j, 1.0, 2.0) * g[i] * g[j] * g[l]
    lat = np.zeros(tab.n_slots)
    for qs, sign in ((qi, -1.0), (qj, -1.0), (ql, 1.0), (qo, 1.0)):
        lat += sign * np.bincount(qs, weights=r, minlength=tab.n_slots)
    return lat, 0.0, math.fsum(r * (qo + ql))


def _np_r3(g, tab: _Tables, c31):
    n = tab.n_act
    i, j, l = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    keep = j <= l
    i, j, l = i[keep], j[keep], l[keep]
    ggg = np.where(j == l, 1.0, 2.0) * g[i] * g[j] * g[l]
    qi, qj, ql = 2 * i + 1, 2 * j + 1, 2 * l + 1
    lat = np.zeros(tab.n_slots)
    qg = 2 * (i + j + l) + 3
    rg = c31 * tab.frakA[qg] * ggg
    for qs, sign in ((qi, -1.0), (qj, -1.0), (ql, -1.0), (qg, 1.0)):
        lat += sign * np.bincount(qs, weights=rg, minlength=tab.n_slots)
    loss = i >= j + l + 1
    ql_out = 2 * (i - j - l)[loss] - 1
    rl = 3.0 * c31 * tab.frakA[ql_out] * ggg[loss]
    for qs, sign in ((qi[loss], -1.0), (ql_out, 1.0), (qj[loss], 1.0), (ql[loss], 1.0)):
        lat += sign * np.bincount(qs, weights=rl, minlength=tab.n_slots)
    flux = 2.0 * math.fsum(rl) - 2.0 * math.fsum(rg)
    thr = math.fsum(rg * qg) + math.fsum(rl * (ql_out + qj[loss] + ql[loss]))
    return lat, flux, thr


# -- public operators ----------------------------------------------------------------

def _prepare(m: GridMeasure, params: KernelParams, model: DispersionModel):
    tab = _tables(m.spec, model, float(params.cutoff_n))
    g = np.ascontiguousarray(m.cell_mass[:tab.n_act], dtype=float)
    return tab, g


def _backend(backend):
    b = backend or _accel.default_backend()
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    return b


def apply_r1(m: GridMeasure, params: KernelParams, model: DispersionModel, backend=None) -> RateMeasure:
    """3-wave coagulation and fragmentation events."""
    tab, g = _prepare(m, params, model)
    if tab.n_act == 0 or params.c12 == 0 or not np.any(g):
        return RateMeasure.zeros(m.spec.n_cells)
    if _backend(backend) == "numba":
        rows, tot = _r1_rows(g, tab.frakA, tab.n_act, tab.n_slots, float(params.c12))
        lat = _reduce_rows(rows)
        flux = math.fsum(tot[:, 1]) - math.fsum(tot[:, 0])
        thr = math.fsum(tot[:, 2])
    else:
        lat, flux, thr = _np_r1(g, tab, params.c12)
    return _lattice_to_rate(lat, flux, thr, tab, "r1")


def apply_r2(m: GridMeasure, params: KernelParams, model: DispersionModel, backend=None) -> RateMeasure:
    """4-wave 2 <-> 2 exchange events; number neutral by construction."""
    tab, g = _prepare(m, params, model)
    if tab.n_act == 0 or params.c22 == 0 or not np.any(g):
        return RateMeasure.zeros(m.spec.n_cells)
    if _backend(backend) == "numba":
        rows, tot = _r2_rows(g, tab.centers, tab.theta, tab.kabs, tab.n_act, tab.n_slots,
                             float(params.c22), float(params.mu))
        lat = _reduce_rows(rows)
        thr = math.fsum(tot[:, 0])
    else:
        lat, _, thr = _np_r2(g, tab, params.c22, float(params.mu))
    return _lattice_to_rate(lat, 0.0, thr, tab, "r2")


def apply_r3(m: GridMeasure, params: KernelParams, model: DispersionModel, backend=None) -> RateMeasure:
    """4-wave 3 <-> 1 events: triple merging and splitting into three."""
    tab, g = _prepare(m, params, model)
    if tab.n_act == 0 or params.c31 == 0 or not np.any(g):
        return RateMeasure.zeros(m.spec.n_cells)
    if _backend(backend) == "numba":
        rows, tot = _r3_rows(g, tab.frakA, tab.n_act, tab.n_slots, float(params.c31))
        lat = _reduce_rows(rows)
        flux = 2.0 * math.fsum(tot[:, 1]) - 2.0 * math.fsum(tot[:, 0])
        thr = math.fsum(tot[:, 2])
    else:
        lat, flux, thr = _np_r3(g, tab, params.c31)
    return _lattice_to_rate(lat, flux, thr, tab, "r3")


def total_rhs(m: GridMeasure, params: KernelParams, model: DispersionModel, backend=None) -> RateMeasure:
    return (apply_r1(m, params, model, backend) + apply_r2(m, params, model, backend)
            + apply_r3(m, params, model, backend))
