"""Positivity-limited forward Euler time stepping."""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .collision import RateMeasure, total_rhs
from .grid import GridMeasure

TRAJ_COLUMNS = ("t", "number", "energy", "atom_mass", "overflow_number", "overflow_energy", "n_c_deficit")


class StepSizeError(RuntimeError):
    """dt exceeds the positivity bound; the caller must shrink it."""


class StagnationError(RuntimeError):
    def __init__(self, msg, trajectory):
        super().__init__(msg)
        self.trajectory = trajectory


@dataclass
class StepControl:
    dt_init: float
    dt_max: float
    safety: float = 0.1
    clip_ledger: float = 0.0
    grow: float = 1.2

    def __post_init__(self):
        if not self.dt_init > 0:
            raise ValueError("time.dt_init must be > 0")
        if not self.dt_max >= self.dt_init:
            raise ValueError("time.dt_max must be >= time.dt_init")
        if not 0 < self.safety <= 1:
            raise ValueError("time.safety must lie in (0, 1]")


def positivity_bound(m: GridMeasure, rate: RateMeasure, safety: float) -> float:
    """Largest dt with dt * |rate_i| <= safety * g_i on every shrinking cell."""
    neg = (rate.cell_rate < 0) & (m.cell_mass > 0)
    if not np.any(neg):
        return math.inf
    return float(np.min(safety * m.cell_mass[neg] / -rate.cell_rate[neg]))


def step(m: GridMeasure, ctrl: StepControl, params, model, dt: float,
         rate: RateMeasure | None = None) -> GridMeasure:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if rate is None:
        rate = total_rhs(m, params, model)
    bound = positivity_bound(m, rate, ctrl.safety)
    if dt > bound * (1 + 1e-12):
        raise StepSizeError(f"dt={dt:.3e} exceeds positivity bound {bound:.3e}")
    g = m.cell_mass + dt * rate.cell_rate
    neg = g < 0
    if np.any(neg):
        ctrl.clip_ledger += float(-g[neg].sum())
        g[neg] = 0.0
    return GridMeasure(
        m.spec, g,
        atom_mass=max(m.atom_mass + dt * rate.atom_rate, 0.0),
        overflow_number=m.overflow_number + dt * rate.overflow_number_rate,
        overflow_energy=m.overflow_energy + dt * rate.overflow_energy_rate,
    )


@dataclass
class Trajectory:
    """Per-step scalar series, sparse snapshots and optional tracked functionals.

    ``tracked[name]`` holds the functional at every recorded state;
    ``tracked_rate[name][k]`` is the assembled pairing of the rate with the
    same test function at the start of step k.
    """

    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    tracked: dict = field(default_factory=dict)
    tracked_rate: dict = field(default_factory=dict)
    clip_ledger: float = 0.0
    stagnated: bool = False

    def record(self, t: float, m: GridMeasure, number0: float):
        n = m.total_number()
        self.rows.append((t, n, m.total_energy(), m.atom_mass, m.overflow_number,
                          m.overflow_energy, number0 - n))

    def column(self, name: str) -> np.ndarray:
        k = TRAJ_COLUMNS.index(name)
        return np.array([r[k] for r in self.rows])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def final(self) -> GridMeasure:
        return self.snapshots[-1][1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(TRAJ_COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join(f"{v:.17g}" for v in r) + "\n")
        return buf.getvalue()

    def write(self, out_dir: str):
        os.makedirs(os.path.join(out_dir, "snapshots"), exist_ok=True)
        with open(os.path.join(out_dir, "trajectory.csv"), "w") as fh:
            fh.write(self.to_csv())
        for k, (t, m) in enumerate(self.snapshots):
            with open(os.path.join(out_dir, "snapshots", f"snap_{k:05d}.csv"), "w") as fh:
                fh.write(m.to_csv(t))
        if self.stagnated:
            with open(os.path.join(out_dir, "STAGNATED"), "w") as fh:
                fh.write(f"stopped at t={self.rows[-1][0]:.17g}\n")


def run(m0: GridMeasure, ctrl: StepControl, params, model, t_end: float, snapshot_stride: int = 10,
        fixed_dt: bool = False, tracked: dict | None = None, backend=None) -> Trajectory:
    """Integrate to ``t_end``.

    Adaptive mode halves dt while it violates the positivity bound and
    otherwise grows it by ``ctrl.grow`` up to ``ctrl.dt_max``.  With
    ``fixed_dt`` every step uses ``ctrl.dt_init`` (last one truncated) and a
    positivity violation raises StepSizeError.
    """
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be >= 1")
    tracked = tracked or {}
    traj = Trajectory(tracked={k: [] for k in tracked}, tracked_rate={k: [] for k in tracked})
    number0 = m0.total_number()
    m, t, k = m0.copy(), 0.0, 0
    dt = ctrl.dt_init
    dt_floor = 1e-15 * t_end

    def observe(state):
        for name, phi in tracked.items():
            traj.tracked[name].append(state.functional(phi))

    traj.record(t, m, number0)
    traj.snapshots.append((t, m))
    observe(m)
    while t < t_end:
        rate = total_rhs(m, params, model, backend)
        h = min(dt, t_end - t)
        if fixed_dt:
            if h > positivity_bound(m, rate, ctrl.safety) * (1 + 1e-12):
                raise StepSizeError(f"fixed dt={h:.3e} violates positivity at t={t:.6g}")
        else:
            bound = positivity_bound(m, rate, ctrl.safety)
            shrunk = False
            while h > bound:
                dt *= 0.5
                h = min(dt, t_end - t)
                shrunk = True
                if dt < dt_floor:
                    traj.stagnated = True
                    traj.clip_ledger = ctrl.clip_ledger
                    if traj.snapshots[-1][1] is not m:
                        traj.snapshots.append((t, m))
                    raise StagnationError(f"dt underflow at t={t:.6g}", traj)
        for name, phi in tracked.items():
            traj.tracked_rate[name].append(rate.pairing(m.spec, phi))
        m = step(m, ctrl, params, model, h, rate)
        t = t + h if t_end - t > h else t_end
        k += 1
        traj.dts.append(h)
        traj.record(t, m, number0)
        observe(m)
        if k % snapshot_stride == 0 or t >= t_end:
            traj.snapshots.append((t, m))
        if not fixed_dt and not shrunk:
            dt = min(dt * ctrl.grow, ctrl.dt_max)
    traj.clip_ledger = ctrl.clip_ledger
    return traj
