"""Reduced interaction kernels for the three collision operators.

Scalar reference implementations.  The collision assembly evaluates the
same expressions from lookup tables (see ``collision``); these functions
are the readable definitions and the reference path for tests.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .dispersion import DispersionModel, DomainError
from .grid import ConfigError, GridSpec


@dataclass(frozen=True)
class KernelParams:
    c12: float = 1.0
    c22: float = 1.0
    c31: float = 0.0
    mu: float = 0.0
    cutoff_n: float = 1.0
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.validate:
            return
        # both 3-wave and 2<->2 couplings are required; only c31 may vanish
        if not self.c12 > 0:
            raise ConfigError("couplings.c12 must be > 0 (only c31 may vanish)")
        if not self.c22 > 0:
            raise ConfigError("couplings.c22 must be > 0 (only c31 may vanish)")
        if not self.c31 >= 0:
            raise ConfigError("couplings.c31 must be >= 0")
        if not self.mu >= 0:
            raise ConfigError("mu must be >= 0")
        if not self.cutoff_n > 0:
            raise ConfigError("cutoff_n must be > 0")

    def check_grid(self, spec: GridSpec):
        if self.cutoff_n > spec.omega_max / 3.0 * (1 + 1e-12):
            raise ConfigError(
                f"cutoff_n={self.cutoff_n} exceeds omega_max/3={spec.omega_max / 3.0}; "
                "gain outputs would leave the grid")


def _inside(params, *ws):
    n = params.cutoff_n
    return all(w <= n for w in ws)


def kplus12(params: KernelParams, frakA, w1, w2):
    if w1 < 0 or w2 < 0:
        raise DomainError("frequencies must be >= 0")
    if not _inside(params, w1, w2):
        return 0.0
    return float(frakA(w1 + w2))


def kminus12(params: KernelParams, frakA, w1, w2):
    if w2 < 0 or w1 < w2:
        raise DomainError("kminus12 needs w1 >= w2 >= 0")
    if not _inside(params, w1, w2):
        return 0.0
    return float(frakA(w1 - w2))


def w22_factor(params: KernelParams, w, w1, w2):
    """Degeneracy weight [max(|w - w2|, |w1 - w2|) / (2 (w + w1))]**mu.

    Identically 1 for mu = 0.  At w = w1 = 0 with mu > 0 the limit is
    taken as 0.
    """
    mu = params.mu
    if mu == 0:
        return 1.0
    s = w + w1
    if s <= 0:
        return 0.0
    return (max(abs(w - w2), abs(w1 - w2)) / (2.0 * s)) ** mu


def k22(params: KernelParams, model: DispersionModel, w, w1, w2):
    if min(w, w1, w2) < 0:
        raise DomainError("frequencies must be >= 0")
    out = w + w1 - w2
    if out < 0 or not _inside(params, w, w1, w2):
        return 0.0
    # a vanishing wavenumber makes the min factor vanish; the ratio stays
    # bounded and its limit is 0
    if w == 0 or w1 == 0 or w2 == 0 or out == 0:
        return 0.0
    k, k1, k2, ko = (model.k_of_omega(x) for x in (w, w1, w2, out))
    # divide one factor at a time so tiny wavenumbers do not underflow the product
    ratio = min(k, k1, k2, ko) / k / k1 / k2
    return model.theta_of(out) * w22_factor(params, w, w1, w2) * ratio


def kplus31(params: KernelParams, frakA, w1, w2, w3):
    if min(w1, w2, w3) < 0:
        raise DomainError("frequencies must be >= 0")
    if not _inside(params, w1, w2, w3):
        return 0.0
    return float(frakA(w1 + w2 + w3))


def kminus31(params: KernelParams, frakA, w1, w2, w3):
    if min(w1, w2, w3) < 0 or w1 < w2 + w3:
        raise DomainError("kminus31 needs w1 >= w2 + w3")
    if not _inside(params, w1, w2, w3):
        return 0.0
    # w1 >= w2 + w3 can hold in floating point while w1 - w2 - w3 rounds below 0
    return float(frakA(max(w1 - w2 - w3, 0.0)))


# -- closed forms of the angular sine integrals ----------------------------

def sine3(a, b, c):
    """int_0^inf sin(a s) sin(b s) sin(c s) / s ds for positive a, b, c.

    pi/4 when (a, b, c) satisfy the strict triangle inequality, 0 when one
    side exceeds the sum of the other two.  The degenerate boundary is
    rejected.
    """
    if min(a, b, c) <= 0:
        raise DomainError("sine3 needs positive arguments")
    x, y, z = sorted((a, b, c))
    if z == x + y:
        raise DomainError("degenerate triangle: value is ambiguous on the boundary")
    return math.pi / 4 if z < x + y else 0.0


def sine4_signed_sum(a, b, c, d):
    """int_0^inf sin(a s) sin(b s) sin(c s) sin(d s) / s**2 ds.

    Evaluated as -(pi/32) * sum over sign vectors e of prod(e) |e . (a,b,c,d)|.
    """
    if min(a, b, c, d) <= 0:
        raise DomainError("sine4_signed_sum needs positive arguments")
    terms = []
    for signs in itertools.product((1, -1), repeat=4):
        prod = signs[0] * signs[1] * signs[2] * signs[3]
        terms.append(prod * abs(signs[0] * a + signs[1] * b + signs[2] * c + signs[3] * d))
    return -math.pi / 32.0 * math.fsum(terms)
