"""Numerical checker for the transport supersolution inequality

    d/dt psi(t, x) + int dz K(t, z) [psi(t, x + z) - psi(t, x)] >= 0,
    psi(t, x) = exp(Y(t)) P(X(t) + x),

with X(t) = int_t^T1 ds int dz K(s, z) z and Y(t) = int_0^t ds int dz K(s, z) z
(or without the z weight, see ``y_weighted``), for a non-negative kernel K
and a barrier P with non-decreasing derivative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import DomainError


class PreconditionError(ValueError):
    """Barrier or kernel violates the checker's hypotheses."""


def _trap_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


@dataclass
class TransportKernel:
    """K sampled on t_grid x z_grid (rows are times)."""

    t_grid: np.ndarray
    z_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.z_grid = np.asarray(self.z_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.t_grid.size, self.z_grid.size):
            raise ValueError("values must have shape (len(t_grid), len(z_grid))")
        if self.t_grid.size < 2 or self.z_grid.size < 2:
            raise ValueError("need at least two samples in t and z")
        if np.any(np.diff(self.t_grid) <= 0) or np.any(np.diff(self.z_grid) <= 0):
            raise ValueError("grids must be strictly increasing")
        if self.t_grid[0] != 0.0 or self.z_grid[0] < 0:
            raise ValueError("t_grid must start at 0 and z_grid must be >= 0")
        if np.any(self.values < 0):
            raise PreconditionError("transport kernel must be non-negative")

    @classmethod
    def from_function(cls, fn, T1: float, Z: float, nt: int = 201, nz: int = 201) -> "TransportKernel":
        t = np.linspace(0.0, T1, nt)
        z = np.linspace(0.0, Z, nz)
        tt, zz = np.meshgrid(t, z, indexing="ij")
        return cls(t, z, np.broadcast_to(np.asarray(fn(tt, zz), dtype=float), tt.shape).copy())

    @property
    def T1(self) -> float:
        return float(self.t_grid[-1])

    @property
    def z_weights(self) -> np.ndarray:
        return _trap_weights(self.z_grid)

    def moment(self, weighted: bool = True) -> np.ndarray:
        """int dz K(s, z) z (or int dz K) at every grid time."""
        f = self.z_grid if weighted else np.ones_like(self.z_grid)
        return self.values @ (self.z_weights * f)

    def at(self, t: float) -> np.ndarray:
        """K(t, .) by linear interpolation in t."""
        k = int(np.clip(np.searchsorted(self.t_grid, t, side="right") - 1, 0, self.t_grid.size - 2))
        t0, t1 = self.t_grid[k], self.t_grid[k + 1]
        s = (t - t0) / (t1 - t0)
        return (1 - s) * self.values[k] + s * self.values[k + 1]


def _cumulative(t_grid, f, t):
    """int_0^t of the piecewise-linear interpolant of samples f."""
    cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(t_grid) * (f[1:] + f[:-1]))))
    k = int(np.clip(np.searchsorted(t_grid, t, side="right") - 1, 0, t_grid.size - 2))
    h = t - t_grid[k]
    slope = (f[k + 1] - f[k]) / (t_grid[k + 1] - t_grid[k])
    return float(cum[k] + h * f[k] + 0.5 * slope * h * h), float(cum[-1])


def build_xy(k: TransportKernel, t: float, y_weighted: bool = True) -> tuple[float, float]:
    if not 0.0 <= t <= k.T1:
        raise DomainError(f"t={t} outside [0, {k.T1}]")
    upto, total = _cumulative(k.t_grid, k.moment(True), t)
    X = total - upto if t < k.T1 else 0.0
    Y = _cumulative(k.t_grid, k.moment(y_weighted), t)[0]
    return X, Y


@dataclass(frozen=True)
class BarrierFunction:
    P: object
    dP: object | None = None
    name: str = "custom"

    def derivative(self, z):
        z = np.asarray(z, dtype=float)
        if self.dP is not None:
            return np.asarray(self.dP(z), dtype=float)
        h = 1e-6
        return (np.asarray(self.P(z + h)) - np.asarray(self.P(np.maximum(z - h, 0.0)))) / (z + h - np.maximum(z - h, 0.0))

    def validate(self, z_max: float = 1.0, n: int = 400, tol: float = 1e-12):
        """Require P >= 0 and P'(z1 + z2) >= P'(z1) on sampled pairs."""
        z = np.linspace(0.0, z_max, n)
        if np.any(np.asarray(self.P(z)) < -tol):
            raise PreconditionError(f"barrier {self.name} is negative somewhere on [0, {z_max}]")
        zs = z[1:]
        d1 = self.derivative(zs)
        d12 = self.derivative(zs[:, None] + zs[None, :])
        bad = d12 < d1[:, None] - tol * np.maximum(1.0, np.abs(d1[:, None]))
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise PreconditionError(
                f"barrier {self.name}: P'({zs[i] + zs[j]:.4g}) < P'({zs[i]:.4g}); derivative must not decrease")


def exponential_barrier(R: float) -> BarrierFunction:
    """P(z) = exp((R/20 - z)_+ / R) - 1 with its exact weak derivative."""
    if not R > 0:
        raise DomainError("R must be > 0")
    z0 = R / 20.0

    def P(z):
        return np.exp(np.maximum(z0 - np.asarray(z, dtype=float), 0.0) / R) - 1.0

    def dP(z):
        z = np.asarray(z, dtype=float)
        return np.where(z < z0, -np.exp((z0 - z) / R) / R, 0.0)

    return BarrierFunction(P, dP, f"exp_barrier(R={R:g})")


@dataclass
class SupersolutionReport:
    min_residual: float
    max_abs_psi: float
    n_points: int
    y_convention: str
    time_derivative: str

    def passed(self, rel_tol: float = 1e-6) -> bool:
        return self.min_residual >= -rel_tol * self.max_abs_psi

    def as_dict(self) -> dict:
        return {"min_residual": self.min_residual, "max_abs_psi": self.max_abs_psi,
                "n_points": self.n_points, "y_convention": self.y_convention,
                "time_derivative": self.time_derivative, "passed": self.passed()}


def check_supersolution(k: TransportKernel, p: BarrierFunction, t_points, x_points,
                        y_weighted: bool = True, time_derivative: str = "analytic",
                        fd_step: float | None = None) -> SupersolutionReport:
    """Minimum of the supersolution residual over the (t, x) points.

    ``time_derivative="analytic"`` differentiates psi through X' = -int K z
    and Y' using the same z quadrature as the jump term;
    ``"central"`` uses a central difference in t instead.
    """
    x_points = np.asarray(x_points, dtype=float)
    zmax = float(np.max(x_points)) + float(k.z_grid[-1]) + build_xy(k, 0.0, y_weighted)[0]
    p.validate(z_max=max(zmax, 1e-3))
    zw, z = k.z_weights, k.z_grid
    min_res, max_psi, count = math.inf, 0.0, 0
    for t in np.asarray(t_points, dtype=float):
        X, Y = build_xy(k, t, y_weighted)
        Kt = k.at(t)
        mz = float(np.dot(Kt * zw, z))
        m0 = float(np.dot(Kt * zw, z if y_weighted else np.ones_like(z)))
        eY = math.exp(Y)
        u = X + x_points
        Pu = np.asarray(p.P(u), dtype=float)
        psi = eY * Pu
        jump = eY * ((np.asarray(p.P(u[:, None] + z[None, :])) - Pu[:, None]) @ (Kt * zw))
        if time_derivative == "analytic":
            dpsi = eY * (m0 * Pu - mz * np.asarray(p.derivative(u)))
        elif time_derivative == "central":
            h = fd_step or 1e-4 * k.T1
            lo, hi = max(t - h, 0.0), min(t + h, k.T1)
            Xl, Yl = build_xy(k, lo, y_weighted)
            Xh, Yh = build_xy(k, hi, y_weighted)
            dpsi = (math.exp(Yh) * np.asarray(p.P(Xh + x_points)) - math.exp(Yl) * np.asarray(p.P(Xl + x_points))) / (hi - lo)
        else:
            raise ValueError(f"unknown time_derivative {time_derivative!r}")
        res = dpsi + jump
        min_res = min(min_res, float(res.min()))
        max_psi = max(max_psi, float(np.abs(psi).max()))
        count += res.size
    return SupersolutionReport(min_res, max_psi, count, "z-weighted" if y_weighted else "unweighted",
                               time_derivative)


def random_instance(rng: np.random.Generator, nt: int = 81, nz: int = 81):
    """Piecewise-constant non-negative K and an exponential barrier with random R."""
    T1 = float(rng.uniform(0.5, 2.0))
    Z = float(rng.uniform(0.01, 0.5))
    pieces_t = int(rng.integers(1, 6))
    pieces_z = int(rng.integers(1, 6))
    levels = rng.uniform(0.0, 3.0, size=(pieces_t, pieces_z))
    t = np.linspace(0.0, T1, nt)
    z = np.linspace(0.0, Z, nz)
    it = np.minimum((t / T1 * pieces_t).astype(int), pieces_t - 1)
    iz = np.minimum((z / Z * pieces_z).astype(int), pieces_z - 1)
    K = TransportKernel(t, z, levels[it][:, iz])
    R = float(rng.uniform(0.05, 2.0))
    return K, exponential_barrier(R), R
