"""Independent numerical oracles.

* Damped quadrature of the sine-product integrals, extrapolated to zero
  damping.
* Monte-Carlo evaluation of the 3-D momentum-space weak form of the 3-wave
  operator for omega = |k|**2, against its reduced two-frequency form.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

# -- damped quadrature of sine products ------------------------------------------

_EPS = (0.04, 0.02, 0.01, 0.005, 0.0025)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _panel_nodes(s_max: float, width: float):
    n = int(math.ceil(s_max / width))
    a = np.arange(n) * width
    x = (a[:, None] + 0.5 * width * (_GL_X[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * width * _GL_W, n)
    return x, w


def damped_sine_integral(freqs, power: int, eps=_EPS, horizon: float = 30.0) -> float:
    """Limit eps -> 0 of int_0^inf exp(-eps s) prod_i sin(a_i s) / s**power ds.

    The damped integrals are computed by panel Gauss-Legendre quadrature and
    fitted by least squares in the basis {1, eps, eps log eps, eps**3}, which
    matches their small-eps expansion when eps is below every non-zero
    combination |+-a +- b ...|.
    """
    freqs = np.asarray(freqs, dtype=float)
    eps = np.asarray(eps, dtype=float)
    width = min(0.5, 0.5 / freqs.sum())
    s, w = _panel_nodes(horizon / eps.min(), width)
    g = np.prod(np.sin(np.outer(s, freqs)), axis=1) / s ** power
    vals = np.array([np.dot(w * np.exp(-e * s), g) for e in eps])
    basis = np.column_stack((np.ones_like(eps), eps, eps * np.log(eps), eps ** 3))
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    return float(coef[0])


def damped_sine3(a, b, c) -> float:
    return damped_sine_integral((a, b, c), 1)


def damped_sine4(a, b, c, d) -> float:
    return damped_sine_integral((a, b, c, d), 2)


# -- 3-wave weak form, omega = |k|^2 ---------------------------------------------

def bump_density(omega):
    """f as a function of omega = |k|^2: (1 - omega)^3 on [0, 1]."""
    return np.clip(1.0 - np.asarray(omega, dtype=float), 0.0, None) ** 3


def bump_phi(omega):
    return np.clip(1.0 - 0.25 * np.asarray(omega, dtype=float), 0.0, None) ** 3


def _rand_unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def c12_weak_form_mc(f=bump_density, phi=bump_phi, n_samples: int = 10_000_000, seed: int = 12345,
                     chunk: int = 1_000_000):
    """Monte-Carlo estimate of

        int dk dk1 dk2 |k||k1||k2| delta(k - k1 - k2) delta(w - w1 - w2)
            [f1 f2 - f (f1 + f2)] [phi(w) - phi(w1) - phi(w2)]

    for w = |k|^2 and f supported in the unit ball.  k1 is uniform in the
    unit ball; resonance forces k2 into the plane orthogonal to k1 (delta
    of 2 k1.k2, Jacobian 1/(2|k1|)), where it is uniform in the unit disc.
    Returns (mean, standard error).
    """
    rng = np.random.default_rng(seed)
    vol = 4.0 * math.pi / 3.0 * math.pi
    s1 = s2 = 0.0
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        u1 = _rand_unit(rng, n)
        r1 = rng.random(n) ** (1.0 / 3.0)
        # orthonormal direction in the plane orthogonal to u1
        t = _rand_unit(rng, n)
        t -= np.sum(t * u1, axis=1, keepdims=True) * u1
        t /= np.linalg.norm(t, axis=1, keepdims=True)
        r2 = np.sqrt(rng.random(n))
        k1 = r1[:, None] * u1
        k2 = r2[:, None] * t
        k = k1 + k2
        w1 = np.einsum("ij,ij->i", k1, k1)
        w2 = np.einsum("ij,ij->i", k2, k2)
        w = np.einsum("ij,ij->i", k, k)
        f0, f1, f2 = f(w), f(w1), f(w2)
        jac = 1.0 / (2.0 * r1)
        val = vol * jac * np.sqrt(w) * r1 * r2 * (f1 * f2 - f0 * (f1 + f2)) * (phi(w) - phi(w1) - phi(w2))
        s1 += math.fsum(val)
        s2 += math.fsum(val * val)
        done += n
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    return mean, math.sqrt(var / n_samples)


def c12_weak_form_reduced(f=bump_density, phi=bump_phi) -> float:
    """8 pi^2 * int dw1 dw2 Th Th1 Th2 |k||k1||k2| [f1 f2 - f(f1+f2)] [phi(w) - phi1 - phi2]
    at w = w1 + w2, for omega = |k|^2 (Theta = 1/2)."""

    def integrand(w2, w1):
        w = w1 + w2
        rates = float(f(w1) * f(w2) - f(w) * (f(w1) + f(w2)))
        return 0.125 * math.sqrt(w * w1 * w2) * rates * float(phi(w) - phi(w1) - phi(w2))

    opts = dict(epsabs=1e-13, epsrel=1e-11)
    inner, _ = integrate.dblquad(integrand, 0.0, 1.0, 0.0, lambda w1: 1.0 - w1, **opts)
    outer, _ = integrate.dblquad(integrand, 0.0, 1.0, lambda w1: 1.0 - w1, 1.0, **opts)
    return 8.0 * math.pi ** 2 * (inner + outer)
