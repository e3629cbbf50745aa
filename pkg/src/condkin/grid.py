"""Discrete non-negative measure on [0, omega_max] with an origin atom.

The evolved quantity is the measure G = f |k| Theta in frequency space.  It
is stored as per-cell masses on a uniform grid, a point mass (the atom) at
omega = 0, and two ledgers counting number and energy pushed past the last
cell centre.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .dispersion import DomainError


class ConfigError(ValueError):
    """Invalid run or profile configuration."""


@dataclass(frozen=True)
class GridSpec:
    n_cells: int
    omega_max: float

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ConfigError("grid.n_cells must be a positive integer")
        if not self.omega_max > 0:
            raise ConfigError("grid.omega_max must be > 0")

    @property
    def width(self) -> float:
        return self.omega_max / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.width

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.width

    @property
    def nodes(self) -> np.ndarray:
        """Atom position followed by the cell centres."""
        return np.concatenate(([0.0], self.centers))


@dataclass(frozen=True)
class InitProfile:
    """Initial density of G in frequency.

    ``power_exp``: A * omega**(c_ini - 1) * exp(-omega / omega_s).
    ``gaussian_bump``: A * exp(-(omega - center)**2 / (2 omega_s**2)).
    The amplitude A is fixed by ``target_number``.
    """

    kind: str = "power_exp"
    c_ini: float = 1.0
    omega_s: float = math.inf
    target_number: float = 1.0
    center: float = 0.0

    def density(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind == "power_exp":
            out = w ** (self.c_ini - 1.0)
            if math.isfinite(self.omega_s):
                out = out * np.exp(-w / self.omega_s)
            return out
        return np.exp(-0.5 * ((w - self.center) / self.omega_s) ** 2)

    def validate(self):
        if self.kind not in ("power_exp", "gaussian_bump"):
            raise ConfigError(f"ic.kind must be power_exp or gaussian_bump, got {self.kind!r}")
        if not self.target_number > 0:
            raise ConfigError("ic.number must be > 0")
        if not self.omega_s > 0:
            raise ConfigError("ic.omega_s must be > 0")
        if self.kind == "power_exp" and not (0.0 < self.c_ini <= 1.0):
            raise ConfigError(
                f"ic.c_ini={self.c_ini} makes the power_exp profile non-integrable at 0; need 0 < c_ini <= 1")
        if self.kind == "gaussian_bump" and not math.isfinite(self.omega_s):
            raise ConfigError("gaussian_bump needs a finite width ic.omega_s")


@dataclass
class GridMeasure:
    spec: GridSpec
    cell_mass: np.ndarray
    atom_mass: float = 0.0
    overflow_number: float = 0.0
    overflow_energy: float = 0.0

    def __post_init__(self):
        self.cell_mass = np.asarray(self.cell_mass, dtype=float)
        if self.cell_mass.shape != (self.spec.n_cells,):
            raise ValueError("cell_mass length does not match the grid")
        if np.any(self.cell_mass < 0) or self.atom_mass < 0:
            raise ValueError("masses must be >= 0")

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridMeasure":
        return cls(spec, np.zeros(spec.n_cells))

    def copy(self) -> "GridMeasure":
        return replace(self, cell_mass=self.cell_mass.copy())

    # -- functionals ---------------------------------------------------
    def total_number(self) -> float:
        return float(self.atom_mass + math.fsum(self.cell_mass))

    def total_energy(self) -> float:
        return float(math.fsum(self.cell_mass * self.spec.centers))

    def mass_below(self, R: float) -> float:
        """Mass of [0, R): the atom, whole cells below R, and the covered
        fraction of the cell containing R."""
        if R < 0:
            raise DomainError("R must be >= 0")
        dx = self.spec.width
        q = R / dx
        n_full = min(int(math.floor(q)), self.spec.n_cells)
        total = self.atom_mass + math.fsum(self.cell_mass[:n_full])
        if n_full < self.spec.n_cells:
            total += (q - n_full) * self.cell_mass[n_full]
        return float(total)

    def functional(self, phi) -> float:
        vals = _eval_phi(phi, self.spec.nodes)
        return float(vals[0] * self.atom_mass + math.fsum(vals[1:] * self.cell_mass))

    def deposit(self, omega_star: float, amount: float) -> "GridMeasure":
        out = self.copy()
        ledger = np.array([out.atom_mass, out.overflow_number, out.overflow_energy])
        deposit_into(out.cell_mass, ledger, self.spec, omega_star, amount)
        out.atom_mass, out.overflow_number, out.overflow_energy = ledger
        return out

    # -- snapshot io ---------------------------------------------------
    def to_csv(self, t: float | None = None) -> str:
        buf = io.StringIO()
        buf.write(f"# atom_mass={self.atom_mass:.17g}\n")
        buf.write(f"# overflow_number={self.overflow_number:.17g}\n")
        buf.write(f"# overflow_energy={self.overflow_energy:.17g}\n")
        if t is not None:
            buf.write(f"# t={t:.17g}\n")
        buf.write(f"# omega_max={self.spec.omega_max:.17g}\n")
        buf.write("omega_center,mass\n")
        for w, g in zip(self.spec.centers, self.cell_mass):
            buf.write(f"{w:.17g},{g:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> tuple["GridMeasure", float | None]:
        meta = {}
        rows = []
        header_seen = False
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = float(val)
            elif not header_seen:
                if line != "omega_center,mass":
                    raise ValueError(f"unexpected snapshot header {line!r}")
                header_seen = True
            else:
                w, g = line.split(",")
                rows.append((float(w), float(g)))
        if not rows:
            raise ValueError("snapshot has no cells")
        centers = np.array([r[0] for r in rows])
        n = len(rows)
        omega_max = meta.get("omega_max", 2.0 * centers[0] * n)
        spec = GridSpec(n, omega_max)
        m = cls(spec, np.array([r[1] for r in rows]),
                atom_mass=meta.get("atom_mass", 0.0),
                overflow_number=meta.get("overflow_number", 0.0),
                overflow_energy=meta.get("overflow_energy", 0.0))
        return m, meta.get("t")


def _eval_phi(phi, x):
    try:
        vals = np.asarray(phi(x), dtype=float)
        if vals.shape != x.shape:
            vals = np.broadcast_to(vals, x.shape).astype(float)
    except (TypeError, ValueError):
        vals = np.array([float(phi(v)) for v in x])
    if not np.all(np.isfinite(vals)):
        raise ValueError("test function is not finite on the grid nodes")
    return vals


def deposit_into(cell_mass, ledger, spec: GridSpec, omega_star: float, amount: float):
    """Two-point allocation of ``amount`` at ``omega_star``, in place.

    ``ledger`` holds [atom_mass, overflow_number, overflow_energy].  The
    split conserves both the deposited number and its energy.
    """
    if amount < 0:
        raise DomainError("deposit amount must be >= 0")
    if omega_star < 0:
        raise DomainError("deposit position must be >= 0")
    if amount == 0:
        return
    dx = spec.width
    last = (spec.n_cells - 0.5) * dx
    if omega_star > last:
        ledger[1] += amount
        ledger[2] += amount * omega_star
        return
    # node coordinate: 0 is the atom, i + 1 is cell i
    first = 0.5 * dx
    if omega_star < first:
        xb = amount * omega_star / first
        ledger[0] += amount - xb
        cell_mass[0] += xb
        return
    u = omega_star / dx - 0.5
    ia = min(int(math.floor(u)), spec.n_cells - 1)
    wa = (ia + 0.5) * dx
    if omega_star == wa or ia == spec.n_cells - 1:
        cell_mass[ia] += amount
        return
    wb = wa + dx
    xb = amount * (omega_star - wa) / (wb - wa)
    cell_mass[ia] += amount - xb
    cell_mass[ia + 1] += xb


def init_measure(spec: GridSpec, profile: InitProfile, model=None) -> GridMeasure:
    """Cell masses as exact cell integrals of the profile, normalised to
    ``profile.target_number``; the atom starts empty."""
    profile.validate()
    edges = spec.edges
    raw = np.empty(spec.n_cells)
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    for i in range(spec.n_cells):
        a, b = edges[i], edges[i + 1]
        if profile.kind == "power_exp" and i == 0 and profile.c_ini < 1.0:
            # integrable endpoint singularity omega**(c_ini - 1) at 0
            if math.isfinite(profile.omega_s):
                f = lambda w: math.exp(-w / profile.omega_s)
            else:
                f = lambda w: 1.0
            val, _ = integrate.quad(f, a, b, weight="alg", wvar=(profile.c_ini - 1.0, 0.0), **opts)
        else:
            val, _ = integrate.quad(lambda w: float(profile.density(w)), a, b, **opts)
        raw[i] = val
    total = math.fsum(raw)
    if not (np.isfinite(total) and total > 0):
        raise ConfigError("initial profile has no finite positive mass on the grid")
    return GridMeasure(spec, raw * (profile.target_number / total))
