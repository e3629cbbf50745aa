"""Condensation and dissipation diagnostics.

Growth curves, the dyadic near-origin ladder, the concave Lyapunov
functional with its dissipation density, and the time sets of the
multiscale decomposition near the origin.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dispersion import DispersionModel, DomainError
from .grid import ConfigError, GridMeasure


# -- growth ------------------------------------------------------------------------

def growth_curve(traj):
    """Columns (t, atom_mass, number_deficit) over every recorded step."""
    if not traj.rows:
        raise ValueError("empty trajectory")
    t = traj.column("t")
    return np.column_stack((t, traj.column("atom_mass"), traj.column("n_c_deficit")))


def concentration_ladder(m: GridMeasure, scales):
    out = []
    for s in scales:
        R = 2.0 ** (-s)
        if R < m.spec.width:
            warnings.warn(f"R_{s}={R:g} is below the grid width {m.spec.width:g}", stacklevel=2)
        out.append((R, m.mass_below(R)))
    return out


# -- concave functional --------------------------------------------------------------

def _check_alpha(alpha):
    if not 0.5 <= alpha < 1.0:
        raise DomainError("alpha must lie in [1/2, 1)")


def phi_alpha(alpha: float):
    """min(omega**alpha, 1): omega**alpha on [0, 1] and 1 beyond."""
    _check_alpha(alpha)
    return lambda w: np.minimum(np.asarray(w, dtype=float) ** alpha, 1.0)


def phi_alpha_functional(m: GridMeasure, alpha: float) -> float:
    return m.functional(phi_alpha(alpha))


def concave_dissipation(m: GridMeasure, alpha: float, params, model: DispersionModel) -> float:
    """Triple sum over occupied cells of the alpha-dissipation density."""
    _check_alpha(alpha)
    occ = np.flatnonzero(m.cell_mass > 0)
    if occ.size < 2:
        return 0.0
    w = m.spec.centers[occ]
    g = m.cell_mass[occ]
    a, b, c = np.meshgrid(w, w, w, indexing="ij")  # (omega, omega_1, omega_2)
    stack = np.sort(np.stack((a, b, c)), axis=0)
    lo, mid, hi = stack
    span = 2.0 * mid - lo
    live = (span < 1.0) & (mid > lo)
    if not np.any(live):
        return 0.0
    lo, mid, hi, span = lo[live], mid[live], hi[live], span[live]
    dens = (mid - lo) ** 2 * alpha * (1.0 - alpha) / span ** (2.0 - alpha) * model.k_of_omega(lo)
    dens = dens * model.theta_of(hi) * model.theta_of(lo) * model.theta_of(mid) * model.theta_of(hi - lo + mid)
    if params.mu != 0:
        aw, bw, cw = a[live], b[live], c[live]
        s = aw + bw
        dens = dens * (np.maximum(np.abs(bw - cw), np.abs(cw - aw)) / (2.0 * s)) ** params.mu
    ggg = (g[:, None, None] * g[None, :, None] * g[None, None, :])[live]
    return float(math.fsum(dens * ggg))


# -- multiscale sets ------------------------------------------------------------------

def rho_upper(model: DispersionModel, mu: float) -> float:
    d, vr, mg = model.delta, model.varrho, model.margin
    s = 2.0 + mu + vr
    return min(mg / (10 * s), 2 * d - vr, 2 * d / 3, model.theta, (mg / (5 * s) + vr) / 2)


def eps_window(model: DispersionModel, mu: float, rho: float) -> tuple[float, float]:
    d, vr, mg = model.delta, model.varrho, model.margin
    return max(0.0, 2 * rho - vr), min(2 * d - vr - rho, mg / (5 * (2.0 + mu + vr)))


@dataclass
class MultiscaleConfig:
    m_list: list
    rho: float
    eps: float
    c_star: float | None = None  # None: calibrate at t = 0 on the smallest m

    @classmethod
    def default(cls, model: DispersionModel, mu: float, m_list=(2, 3, 4)) -> "MultiscaleConfig":
        rho = 0.5 * rho_upper(model, mu)
        lo, hi = eps_window(model, mu, rho)
        return cls(list(m_list), rho, 0.5 * (lo + hi))

    def validate(self, model: DispersionModel, mu: float):
        if not self.m_list or any(int(m) != m or m < 1 for m in self.m_list):
            raise ConfigError("diagnostics.multiscale.m_list must hold integers >= 1")
        rb = rho_upper(model, mu)
        if not 0 < self.rho < rb:
            raise ConfigError(f"diagnostics.multiscale.rho={self.rho} outside (0, {rb:.6g})")
        lo, hi = eps_window(model, mu, self.rho)
        if not lo < self.eps < hi:
            raise ConfigError(f"diagnostics.multiscale.eps={self.eps} outside ({lo:.6g}, {hi:.6g})")
        if self.c_star is not None and not self.c_star > 0:
            raise ConfigError("diagnostics.multiscale.c_star must be > 0")


@dataclass(frozen=True)
class ScaleGeometry:
    m: int
    R: float
    N: int
    h: float

    @classmethod
    def build(cls, m: int, model: DispersionModel, mu: float) -> "ScaleGeometry":
        N = int(math.floor(m * model.margin / (4.0 * (2.0 + mu + model.varrho))))
        R = 2.0 ** (-m)
        return cls(m, R, N, R / 2.0 ** N)

    @property
    def count(self) -> int:
        return 2 ** self.N

    def cell(self, i: int) -> tuple[float, float]:
        return i * self.h, (self.R if i == self.count - 1 else (i + 1) * self.h)

    def window(self, i: int) -> tuple[float, float]:
        """Overlapping window: up to three consecutive cells, clipped to [0, R)."""
        M = self.count
        if not 0 <= i < M:
            raise IndexError(i)
        lo = max(0, i - 1) * self.h
        hi = self.R if i + 2 >= M else (i + 2) * self.h
        return lo, hi

    @property
    def upper_start(self) -> int:
        return max(0, self.count // 2 - 1)


def mask_to_intervals(times: np.ndarray, mask: np.ndarray) -> list:
    """Union of [t_k, t_{k+1}) over k with mask[k] set, merged."""
    out = []
    for k in np.flatnonzero(mask):
        a, b = float(times[k]), float(times[k + 1])
        if out and out[-1][1] == a:
            out[-1][1] = b
        else:
            out.append([a, b])
    return out


def intervals_measure(iv) -> float:
    return math.fsum(b - a for a, b in iv)


@dataclass
class ScaleReport:
    geometry: ScaleGeometry
    threshold: float
    window_threshold: float
    masks: dict = field(default_factory=dict)   # name -> bool array over snapshot intervals
    window_masks: list = field(default_factory=list)
    times: np.ndarray | None = None

    def intervals(self, name):
        return mask_to_intervals(self.times, self.masks[name])

    def to_dict(self, model, eps, mu, width):
        g = self.geometry
        sets = {k: {"intervals": self.intervals(k), "measure": intervals_measure(self.intervals(k))}
                for k in ("A", "B", "C", "D")}
        sets["A_i"] = [{"intervals": mask_to_intervals(self.times, wm),
                        "measure": intervals_measure(mask_to_intervals(self.times, wm))}
                       for wm in self.window_masks]
        return {
            "m": g.m, "R": g.R, "N": g.N, "h": g.h, "subdomains": g.count,
            "threshold": self.threshold, "window_threshold": self.window_threshold,
            "sets": sets,
            "bound_shapes": {
                "C_vs_R_pow": {"measured": sets["C"]["measure"],
                               "R_pow": g.R ** (2 * model.delta - eps - model.varrho)},
                "B_vs_R_pow": {"measured": sets["B"]["measure"], "R_pow": g.R ** (model.margin / 4)},
            },
            "under_resolved": bool(g.h < width),
            "label": "diagnostic only",
        }


def _snap_masses(snapshots, edges):
    return np.array([[m.mass_below(e) for e in edges] for _, m in snapshots])


def multiscale_sets(snapshots, cfg: MultiscaleConfig, model: DispersionModel, mu: float) -> dict:
    """Per-m time sets from a list of (t, GridMeasure) snapshots.

    Membership is evaluated at each snapshot and held constant until the
    next one.
    """
    cfg.validate(model, mu)
    if not snapshots:
        raise ValueError("no snapshots")
    times = np.array([t for t, _ in snapshots])
    m_sorted = sorted(int(m) for m in cfg.m_list)
    c_star = cfg.c_star
    if c_star is None:
        R0 = 2.0 ** (-m_sorted[0])
        c_star = snapshots[0][1].mass_below(R0) / R0 ** cfg.rho
        if not c_star > 0:
            c_star = 1.0
    keep = slice(0, len(times) - 1)
    reports = {}
    for m in m_sorted:
        g = ScaleGeometry.build(m, model, mu)
        windows = [g.window(i) for i in range(g.count)]
        edges = sorted({0.0, g.R, *(e for w in windows for e in w)})
        pos = {e: k for k, e in enumerate(edges)}
        mb = _snap_masses(snapshots, edges)[keep]
        thr = c_star * g.R ** cfg.rho
        thr_w = c_star * (g.R / 2) ** cfg.rho
        # mass_below includes the atom, so windows starting at 0 carry it
        A = mb[:, pos[g.R]] >= thr
        Ai = [(mb[:, pos[b]] - (mb[:, pos[a]] if a > 0 else 0.0)) >= thr_w for a, b in windows]
        Ai = [np.asarray(x, dtype=bool) for x in Ai]
        union = np.zeros_like(A)
        C = np.zeros_like(A)
        D = np.zeros_like(A)
        for i, x in enumerate(Ai):
            union |= x
            if i >= g.upper_start:
                C |= x
            else:
                D |= x
        rep = ScaleReport(g, thr, thr_w, {"A": A, "B": A & ~union, "C": C, "D": D, "U": union}, Ai, times)
        reports[m] = rep
    return {"c_star": c_star, "rho": cfg.rho, "eps": cfg.eps, "reports": reports}


def multiscale_json_doc(result: dict, model: DispersionModel, mu: float, width: float,
                        max_gap: float) -> dict:
    return {
        "c_star": result["c_star"], "rho": result["rho"], "eps": result["eps"],
        "time_quantization": max_gap,
        "scales": [rep.to_dict(model, result["eps"], mu, width) for _, rep in sorted(result["reports"].items())],
    }


# -- diagnostics csv --------------------------------------------------------------------

def diagnostics_csv(snapshots, params, model, ladder_m=(2, 3, 4)) -> str:
    buf = io.StringIO()
    cols = ["t", "phi_05", "phi_075", "dissipation_05"] + [f"m_R_{m}" for m in ladder_m]
    buf.write(",".join(cols) + "\n")
    for t, m in snapshots:
        vals = [t, phi_alpha_functional(m, 0.5), phi_alpha_functional(m, 0.75),
                concave_dissipation(m, 0.5, params, model)]
        vals += [mass for _, mass in _quiet_ladder(m, ladder_m)]
        buf.write(",".join(f"{v:.17g}" for v in vals) + "\n")
    return buf.getvalue()


def _quiet_ladder(m, scales):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return concentration_ladder(m, scales)
