import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condkin import ConfigError, DispersionModel, DomainError, GridSpec, KernelParams
from condkin.kernels import (k22, kminus12, kminus31, kplus12, kplus31, sine3, sine4_signed_sum,
                             w22_factor)
from condkin.oracles import damped_sine3, damped_sine4
from condkin.verification import random_sine_tuples, resonant_22, resonant_31

QUAD = DispersionModel(2.0, 1.0)
A = QUAD.frakA_of
WIDE = KernelParams(cutoff_n=10.0)
# k22 grows like 1/omega near 0; below 1e-300 the exact value no longer fits in a double
freq = st.one_of(st.just(0.0), st.floats(1e-300, 12.0))


def test_params_validation():
    for bad in (dict(c12=0.0), dict(c22=0.0), dict(c31=-1.0), dict(mu=-0.5), dict(cutoff_n=0.0)):
        with pytest.raises(ConfigError):
            KernelParams(**bad)
    KernelParams(c31=0.0)
    with pytest.raises(ConfigError, match="c12"):
        KernelParams(c12=0.0)


def test_cutoff_must_fit_grid():
    KernelParams(cutoff_n=1.0).check_grid(GridSpec(96, 3.0))
    with pytest.raises(ConfigError):
        KernelParams(cutoff_n=1.5).check_grid(GridSpec(96, 3.0))


def test_kplus12_examples():
    assert kplus12(WIDE, A, 2.0, 2.0) == pytest.approx(1.0)
    assert kplus12(WIDE, A, 0.0, 0.0) == 0.0
    assert kplus12(WIDE, A, 11.0, 1.0) == 0.0


def test_kminus12_examples():
    assert kminus12(WIDE, A, 3.0, 3.0) == 0.0
    assert kminus12(WIDE, A, 5.0, 1.0) == pytest.approx(1.0)
    assert kminus12(WIDE, A, 11.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        kminus12(WIDE, A, 1.0, 2.0)


def test_w22_examples():
    assert w22_factor(KernelParams(mu=0.0), 0.3, 7.0, 0.1) == 1.0
    assert w22_factor(KernelParams(mu=1.0), 1.0, 1.0, 0.5) == pytest.approx(0.125)
    assert w22_factor(KernelParams(mu=2.0), 1.0, 3.0, 1.0) == pytest.approx(0.0625)
    assert w22_factor(KernelParams(mu=1.0), 0.0, 0.0, 0.3) == 0.0


def test_k22_examples():
    assert k22(WIDE, QUAD, 1.0, 1.0, 2.5) == 0.0
    assert k22(WIDE, QUAD, 0.0, 1.0, 0.5) == 0.0
    assert k22(KernelParams(cutoff_n=1.0), QUAD, 1.0, 1.0, 1.0) == pytest.approx(0.5)
    assert k22(KernelParams(cutoff_n=1.0), QUAD, 1.2, 0.5, 0.5) == 0.0


def test_k31_examples():
    assert kminus31(WIDE, A, 3.0, 1.0, 2.0) == 0.0
    assert kplus31(WIDE, A, 4 / 3, 4 / 3, 4 / 3) == pytest.approx(1.0)
    assert kplus31(WIDE, A, 11.0, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        kminus31(WIDE, A, 1.0, 0.6, 0.6)


@given(freq, freq, freq)
def test_kernels_finite_non_negative_symmetric(a, b, c):
    vals = [kplus12(WIDE, A, a, b), kplus31(WIDE, A, a, b, c), k22(WIDE, QUAD, a, b, c)]
    hi, lo = max(a, b), min(a, b)
    vals.append(kminus12(WIDE, A, hi, lo))
    assert all(math.isfinite(v) and v >= 0 for v in vals)
    assert kplus12(WIDE, A, a, b) == kplus12(WIDE, A, b, a)
    ref = kplus31(WIDE, A, a, b, c)
    assert all(kplus31(WIDE, A, *perm) == pytest.approx(ref, rel=1e-15) for perm in itertools.permutations((a, b, c)))
    assert k22(WIDE, QUAD, a, b, c) == pytest.approx(k22(WIDE, QUAD, b, a, c), rel=1e-14)


@given(freq, freq, freq)
def test_envelopes_quadratic_model(a, b, c):
    """A(w) = sqrt(w)/2 <= (1 + w)/4, and <= w once w >= 1/4."""
    hi, lo = max(a, b), min(a, b)
    vals = [(kplus12(WIDE, A, a, b), a + b), (kminus12(WIDE, A, hi, lo), hi + lo),
            (kplus31(WIDE, A, a, b, c), a + b + c)]
    if hi >= lo + c:
        vals.append((kminus31(WIDE, A, hi, lo, c), hi + lo + c))
    for v, s in vals:
        assert v <= (1 + s) / 4 * (1 + 1e-15)
        if s >= 0.25:
            assert v <= s * (1 + 1e-15)


def test_sine3_examples():
    assert sine3(1, 1, 1.5) == pytest.approx(math.pi / 4)
    assert sine3(1, 1, 3) == 0.0
    assert sine3(2, 3, 4) == pytest.approx(math.pi / 4)
    for bad in ((1, 1, 2), (0, 1, 1), (-1, 1, 1)):
        with pytest.raises(DomainError):
            sine3(*bad)


def test_sine3_examples_against_quadrature():
    for t in ((1, 1, 1.5), (1, 1, 3), (2, 3, 4)):
        assert abs(sine3(*t) - damped_sine3(*t)) <= 1e-4


def test_sine4_examples():
    assert sine4_signed_sum(1, 1, 1, 1) == pytest.approx(math.pi / 4, rel=1e-15)
    assert sine4_signed_sum(1, 1, 1, 2.5) == pytest.approx(math.pi / 16, rel=1e-14)
    assert abs(sine4_signed_sum(0.5, 1, 1.5, 2) - damped_sine4(0.5, 1, 1.5, 2)) <= 1e-4
    with pytest.raises(DomainError):
        sine4_signed_sum(1, 1, 0, 1)


def test_sine_forms_against_quadrature_random():
    rng = np.random.default_rng(11)
    for t in random_sine_tuples(rng, 20, 3):
        assert abs(sine3(*t) - damped_sine3(*t)) <= 1e-4
    for t in random_sine_tuples(rng, 20, 4):
        assert abs(sine4_signed_sum(*t) - damped_sine4(*t)) <= 1e-4


@given(st.floats(1.5, 2.0), st.integers(0, 2 ** 32 - 1))
def test_resonant_closed_forms(p, seed):
    rng = np.random.default_rng(seed)
    for t in resonant_22(rng, 3, p):
        assert sine4_signed_sum(*t) == pytest.approx(math.pi / 4 * min(t), abs=1e-12)
    for k1, k2, k3, k in resonant_31(rng, 3, p, "sum"):
        assert sine4_signed_sum(k1, k2, k3, k) == pytest.approx(math.pi / 8 * (k1 + k2 + k3 - k), abs=1e-12)


def test_resonant_3_1_outside_sum_region():
    """Where |k| + min < the other two, the integral is pi/4 * min instead."""
    rng = np.random.default_rng(5)
    for p in (1.5, 1.75, 2.0):
        for k1, k2, k3, k in resonant_31(rng, 30, p, "min"):
            assert sine4_signed_sum(k1, k2, k3, k) == pytest.approx(math.pi / 4 * min(k1, k2, k3), abs=1e-12)
            assert sine4_signed_sum(k1, k2, k3, k) < math.pi / 8 * (k1 + k2 + k3 - k)


@given(st.floats(0.05, 3), st.floats(0.05, 3), st.floats(0.05, 3), st.floats(0.05, 3))
def test_sine4_symmetric_and_bounded(a, b, c, d):
    v = sine4_signed_sum(a, b, c, d)
    assert v == pytest.approx(sine4_signed_sum(d, c, a, b), abs=1e-12)
    # |sin x| <= min(1, |x|) gives |I| <= (pi/2) * min of the arguments
    assert abs(v) <= math.pi / 2 * min(a, b, c, d) + 1e-12
