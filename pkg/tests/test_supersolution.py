import numpy as np
import pytest

from condkin import DomainError
from condkin.supersolution import (BarrierFunction, PreconditionError, TransportKernel, build_xy,
                                   check_supersolution, exponential_barrier, random_instance)


def const_kernel(val, T1=1.0, Z=1.0, n=101):
    return TransportKernel.from_function(lambda t, z: val * np.ones_like(t), T1, Z, n, n)


def test_build_xy_examples():
    assert build_xy(const_kernel(0.0), 0.3) == (0.0, 0.0)
    X, Y = build_xy(const_kernel(1.0), 0.0)
    assert X == pytest.approx(0.5, rel=1e-12) and Y == 0.0
    assert build_xy(const_kernel(1.0), 1.0)[0] == 0.0
    with pytest.raises(DomainError):
        build_xy(const_kernel(1.0), 1.5)


def test_build_xy_conventions():
    k = const_kernel(2.0, T1=2.0, Z=0.5)
    Xw, Yw = build_xy(k, 0.5, y_weighted=True)
    Xu, Yu = build_xy(k, 0.5, y_weighted=False)
    assert Xw == Xu == pytest.approx(2.0 * 0.125 * 1.5)
    assert Yw == pytest.approx(2.0 * 0.125 * 0.5)
    assert Yu == pytest.approx(2.0 * 0.5 * 0.5)


def test_build_xy_converges_under_refinement():
    fn = lambda t, z: (1 + np.sin(3 * t)) * np.exp(-z)
    coarse = build_xy(TransportKernel.from_function(fn, 1.0, 1.0, 201, 201), 0.37)
    fine = build_xy(TransportKernel.from_function(fn, 1.0, 1.0, 1601, 1601), 0.37)
    assert np.allclose(coarse, fine, rtol=1e-4)
    finer = build_xy(TransportKernel.from_function(fn, 1.0, 1.0, 3201, 3201), 0.37)
    assert np.allclose(fine, finer, rtol=1e-6)


def test_kernel_validation():
    with pytest.raises(PreconditionError):
        const_kernel(-1.0)
    with pytest.raises(ValueError):
        TransportKernel([0.0, 1.0], [0.0, 1.0], np.zeros((3, 2)))
    with pytest.raises(ValueError):
        TransportKernel([0.5, 1.0], [0.0, 1.0], np.zeros((2, 2)))


def test_zero_kernel_residual_exactly_zero():
    rep = check_supersolution(const_kernel(0.0), exponential_barrier(1.0), np.linspace(0, 1, 5),
                              np.linspace(0, 0.2, 9))
    assert rep.min_residual == 0.0


@pytest.mark.parametrize("mode", ["analytic", "central"])
def test_concrete_barrier_constant_kernel(mode):
    k = const_kernel(1.0, T1=1.0, Z=0.01)
    rep = check_supersolution(k, exponential_barrier(1.0), np.linspace(0, 1, 11), np.linspace(0, 0.1, 41),
                              time_derivative=mode)
    assert rep.min_residual >= -1e-6 * rep.max_abs_psi
    assert rep.passed()
    assert rep.as_dict()["time_derivative"] == mode


def test_concave_barrier_rejected():
    with pytest.raises(PreconditionError):
        BarrierFunction(np.sqrt, name="sqrt").validate()
    with pytest.raises(PreconditionError):
        check_supersolution(const_kernel(1.0), BarrierFunction(np.sqrt), [0.0], [0.0])
    with pytest.raises(PreconditionError):
        BarrierFunction(lambda z: -np.ones_like(z)).validate()


def test_exponential_barrier_properties():
    b = exponential_barrier(0.4)
    z = np.linspace(0, 0.1, 11)
    assert np.all(b.P(z) >= 0) and b.P(0.5).item() == 0.0
    h = 1e-7
    inside = np.linspace(0.001, 0.019, 7)
    np.testing.assert_allclose(b.derivative(inside), (b.P(inside + h) - b.P(inside - h)) / (2 * h), rtol=1e-6)
    b.validate(z_max=1.0)
    with pytest.raises(DomainError):
        exponential_barrier(0.0)


@pytest.mark.parametrize("weighted", [True, False])
def test_random_instances(weighted):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        K, P, R = random_instance(rng)
        rep = check_supersolution(K, P, K.t_grid[::2], np.linspace(0.0, R / 10, 41), y_weighted=weighted)
        assert rep.min_residual >= -1e-6 * rep.max_abs_psi


def test_residual_stable_under_refinement():
    fn = lambda t, z: 1.0 + 0.5 * np.cos(4 * t) * (z < 0.05)
    P = exponential_barrier(0.5)
    x = np.linspace(0, 0.05, 21)
    for n in (41, 81, 161):
        K = TransportKernel.from_function(fn, 1.0, 0.1, n, n)
        rep = check_supersolution(K, P, np.linspace(0, 1, 9), x, time_derivative="central")
        assert rep.min_residual >= -1e-6 * rep.max_abs_psi
