"""Power-law dispersion relation and the radial weights derived from it.

The family is omega(|k|) = c * |k|**p with p in [3/2, 2].  All radial
Jacobian weights used by the collision operators follow in closed form:

    |k|(omega)  = (omega / c) ** (1/p)
    Theta(omega) = |k| / omega'(|k|)    = |k|**(2-p) / (c p)
    A(omega)     = |k|**2 / omega'(|k|) = |k|**(3-p) / (c p)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

P_MIN = 1.5
P_MAX = 2.0


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


def _check_nonneg(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{name} must be >= 0")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class DispersionModel:
    p: float = 2.0
    c_disp: float = 1.0
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.validate:
            return
        if not (P_MIN <= self.p <= P_MAX):
            raise DomainError(f"dispersion exponent p={self.p} outside [{P_MIN}, {P_MAX}]")
        if not self.c_disp > 0:
            raise DomainError(f"dispersion scale c={self.c_disp} must be > 0")

    # derived exponents
    @property
    def delta(self) -> float:
        return 1.0 / self.p

    @property
    def delta_prime(self) -> float:
        return 1.0 / self.p

    @property
    def varrho(self) -> float:
        return (2.0 - self.p) / self.p

    @property
    def theta(self) -> float:
        return (3.0 - self.p) / self.p

    @property
    def margin(self) -> float:
        """2*delta - 1/2 - varrho, which must be positive."""
        return 2.0 * self.delta - 0.5 - self.varrho

    def omega_of_k(self, k_abs):
        k = _check_nonneg(k_abs, "k_abs")
        return _out(self.c_disp * k ** self.p)

    def k_of_omega(self, omega):
        w = _check_nonneg(omega, "omega")
        return _out((w / self.c_disp) ** (1.0 / self.p))

    def theta_of(self, omega):
        w = _check_nonneg(omega, "omega")
        k = (w / self.c_disp) ** (1.0 / self.p)
        return _out(k ** (2.0 - self.p) / (self.c_disp * self.p))

    def frakA_of(self, omega):
        w = _check_nonneg(omega, "omega")
        k = (w / self.c_disp) ** (1.0 / self.p)
        return _out(k ** (3.0 - self.p) / (self.c_disp * self.p))


@dataclass
class ValidationReport:
    delta: float
    delta_prime: float
    theta: float
    varrho: float
    margin: float
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def validate_assumptions(model: DispersionModel) -> ValidationReport:
    """Check the structural conditions on the dispersion relation.

    A1: 1 < 1/delta <= 2 (power between 1 and 2) and c > 0.
    A2: radial change of variables; always available for a strictly
        increasing omega.
    A3: 0 < theta <= 1 (growth exponent of A) with A non-decreasing.
    A4: 0 <= varrho <= 1 with Theta non-decreasing.
    A5: 2 delta - 1/2 > varrho.
    """
    p = model.p
    delta, varrho, theta = 1.0 / p, (2.0 - p) / p, (3.0 - p) / p
    margin = 2.0 * delta - 0.5 - varrho
    checks = {
        "A1": bool(1.0 < p <= 2.0 and model.c_disp > 0),
        "A2": bool(p > 0),
        "A3": bool(0.0 < theta <= 1.0 and 3.0 - p >= 0),
        "A4": bool(0.0 <= varrho <= 1.0 and 2.0 - p >= 0),
        "A5": bool(margin > 0),
    }
    return ValidationReport(delta, delta, theta, varrho, margin, checks)
