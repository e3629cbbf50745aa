import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condkin import ConfigError, DispersionModel, DomainError, GridMeasure, GridSpec, KernelParams
from condkin.diagnostics import (MultiscaleConfig, ScaleGeometry, concave_dissipation, concentration_ladder,
                                 diagnostics_csv, eps_window, growth_curve, intervals_measure,
                                 mask_to_intervals, multiscale_json_doc, multiscale_sets, phi_alpha,
                                 phi_alpha_functional, rho_upper)
from condkin.integrator import StepControl, run

QUAD = DispersionModel()
UNIFORM = GridMeasure(GridSpec(4, 1.0), np.full(4, 0.25))


# -- interval algebra used as an independent oracle -------------------------------------

def normalise(iv):
    out = []
    for a, b in sorted((float(a), float(b)) for a, b in iv if b > a):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def union(*lists):
    return normalise([x for iv in lists for x in iv])


def difference(xs, ys):
    out = []
    for a, b in normalise(xs):
        cur = a
        for c, d in normalise(ys):
            if d <= cur or c >= b:
                continue
            if c > cur:
                out.append([cur, c])
            cur = max(cur, d)
        if cur < b:
            out.append([cur, b])
    return normalise(out)


def intersection(xs, ys):
    return difference(xs, difference(xs, ys))


# -- growth and ladder ---------------------------------------------------------------

def test_growth_curve_zero_dynamics():
    spec = GridSpec(12, 3.0)
    g = np.zeros(12)
    g[11] = 1.0  # above the cutoff, nothing interacts
    tr = run(GridMeasure(spec, g), StepControl(0.1, 0.1), KernelParams(cutoff_n=1.0), QUAD, 1.0)
    gc = growth_curve(tr)
    assert gc.shape[1] == 3
    assert np.all(gc[:, 1] == 0) and np.all(gc[:, 2] == 0)


def test_growth_curve_monotone(reference_run):
    gc = growth_curve(reference_run[1])
    assert np.all(np.diff(gc[:, 0]) > 0)
    assert np.all(np.diff(gc[:, 1]) >= 0)
    assert np.all(np.diff(gc[:, 2]) >= -1e-15)
    assert np.all(gc[:, 2] >= -1e-15)


def test_ladder_examples():
    assert concentration_ladder(UNIFORM, [1]) == [(0.5, pytest.approx(0.5))]
    assert concentration_ladder(UNIFORM, [2]) == [(0.25, pytest.approx(0.25))]
    atom = GridMeasure(GridSpec(4, 1.0), np.zeros(4), atom_mass=0.4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert all(v == 0.4 for _, v in concentration_ladder(atom, [1, 2, 5, 9]))


def test_ladder_warns_below_resolution():
    with pytest.warns(UserWarning):
        concentration_ladder(UNIFORM, [3])


# -- concave functional and dissipation ------------------------------------------------

def test_phi_alpha_examples():
    spec = GridSpec(2, 1.0)  # centres 0.25, 0.75
    assert phi_alpha_functional(GridMeasure(spec, [0, 0], atom_mass=3.0), 0.5) == 0.0
    assert phi_alpha_functional(GridMeasure(GridSpec(2, 4.0), [0, 1.0]), 0.75) == 1.0
    assert phi_alpha_functional(GridMeasure(spec, [2.0, 0]), 0.5) == pytest.approx(1.0)
    for bad in (0.4, 1.0):
        with pytest.raises(DomainError):
            phi_alpha(bad)


def test_dissipation_trivial_cases():
    params = KernelParams()
    g = np.zeros(8)
    g[3] = 2.0
    assert concave_dissipation(GridMeasure(GridSpec(8, 1.0), g), 0.5, params, QUAD) == 0.0
    high = GridMeasure(GridSpec(8, 2.0), [0, 0, 1, 1, 1, 1, 1, 1])  # all centres above 1/2
    assert concave_dissipation(high, 0.5, params, QUAD) == 0.0
    with pytest.raises(DomainError):
        concave_dissipation(high, 1.0, params, QUAD)


def test_dissipation_two_cell_hand_sum():
    m = GridMeasure(GridSpec(4, 1.0), [1.0, 1.0, 0, 0])  # unit masses at 0.125 and 0.375
    # of the 6 mixed triples only the three with two entries at 0.375 have mid > min
    lo, mid, hi = 0.125, 0.375, 0.375
    one = (mid - lo) ** 2 * 0.25 / (2 * mid - lo) ** 1.5 * math.sqrt(lo) * 0.5 ** 4
    assert concave_dissipation(m, 0.5, KernelParams(), QUAD) == pytest.approx(3 * one, rel=1e-14)


@given(st.lists(st.floats(0, 2), min_size=12, max_size=12), st.sampled_from([0.5, 0.75, 0.9]),
       st.sampled_from([0.0, 1.0]))
def test_dissipation_non_negative(cells, alpha, mu):
    m = GridMeasure(GridSpec(12, 1.5), cells)
    assert concave_dissipation(m, alpha, KernelParams(mu=mu), DispersionModel(1.75)) >= 0


# -- multiscale ------------------------------------------------------------------------

@pytest.mark.parametrize("m,N", [(8, 0), (16, 1), (32, 2)])
def test_geometry_quadratic(m, N):
    g = ScaleGeometry.build(m, QUAD, 0.0)
    assert g.R == 2.0 ** -m
    assert g.N == math.floor(m * 0.5 / 8) == N
    assert g.h == 2.0 ** -(m + N)
    assert g.count == 2 ** N


@pytest.mark.parametrize("p,mu", [(1.5, 0.0), (1.75, 1.0), (2.0, 2.0)])
def test_geometry_general(p, mu):
    model = DispersionModel(p)
    for m in (8, 16, 32, 64):
        g = ScaleGeometry.build(m, model, mu)
        assert g.N == math.floor(m * (2 / p - 0.5 - (2 - p) / p) / (4 * (2 + mu + (2 - p) / p)))
        cells = [g.cell(i) for i in range(g.count)]
        assert cells[0][0] == 0 and cells[-1][1] == g.R
        assert all(a[1] == b[0] for a, b in zip(cells, cells[1:]))


def test_windows_boundary_cases():
    g = ScaleGeometry(5, 1.0, 2, 0.25)  # 4 cells of width 1/4 on [0, 1)
    assert g.window(0) == (0.0, 0.5)
    assert g.window(1) == (0.0, 0.75)
    assert g.window(2) == (0.25, 1.0)
    assert g.window(3) == (0.5, 1.0)
    with pytest.raises(IndexError):
        g.window(4)


def test_rho_eps_windows_quadratic():
    assert rho_upper(QUAD, 0.0) == pytest.approx(0.025)
    lo, hi = eps_window(QUAD, 0.0, 0.0125)
    assert (lo, hi) == pytest.approx((0.025, 0.05))
    cfg = MultiscaleConfig.default(QUAD, 0.0)
    assert cfg.rho == pytest.approx(0.0125) and cfg.eps == pytest.approx(0.0375)


@pytest.mark.parametrize("kw", [dict(rho=0.03, eps=0.04), dict(rho=0.0125, eps=0.02),
                                dict(rho=0.0125, eps=0.06), dict(rho=0.0125, eps=0.0375, c_star=-1.0)])
def test_multiscale_config_rejects(kw):
    with pytest.raises(ConfigError):
        MultiscaleConfig([2, 3], **kw).validate(QUAD, 0.0)
    with pytest.raises(ConfigError):
        MultiscaleConfig([0], 0.0125, 0.0375).validate(QUAD, 0.0)


def test_mask_intervals():
    t = np.array([0.0, 1.0, 2.0, 3.0, 5.0])
    iv = mask_to_intervals(t, np.array([True, True, False, True]))
    assert iv == [[0.0, 2.0], [3.0, 5.0]]
    assert intervals_measure(iv) == 4.0
    assert mask_to_intervals(t, np.zeros(4, bool)) == []


def _check_algebra(result):
    for m, rep in result["reports"].items():
        Ai = [mask_to_intervals(rep.times, w) for w in rep.window_masks]
        U = union(*Ai)
        C, D, A, B = (rep.intervals(k) for k in "CDAB")
        assert union(C, D) == U
        assert intersection(B, U) == []
        assert normalise(B) == difference(A, U)
        assert C == normalise(C) and D == normalise(D)


def test_empty_near_origin_mass_gives_empty_sets():
    spec = GridSpec(12, 3.0)
    g = np.zeros(12)
    g[6:] = 1.0
    snaps = [(float(t), GridMeasure(spec, g)) for t in range(5)]
    res = multiscale_sets(snaps, MultiscaleConfig([2, 3], 0.0125, 0.0375, c_star=1.0), QUAD, 0.0)
    for rep in res["reports"].values():
        assert all(rep.intervals(k) == [] for k in "ABCD")
    _check_algebra(res)


def test_set_algebra_on_reference_run(reference_run):
    cfg, tr = reference_run
    ms = MultiscaleConfig([1, 2, 3, 4, 8, 16, 32], 0.0125, 0.0375)
    res = multiscale_sets(tr.snapshots, ms, QUAD, 0.0)
    _check_algebra(res)
    R0 = 0.5
    assert res["c_star"] == pytest.approx(tr.snapshots[0][1].mass_below(R0) / R0 ** 0.0125)
    assert multiscale_sets(tr.snapshots, ms, QUAD, 0.0)["reports"][2].masks["A"].tolist() == \
        res["reports"][2].masks["A"].tolist()


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1.5, 2.0]), st.sampled_from([0.0, 1.0]))
def test_set_algebra_random_snapshots(seed, p, mu):
    rng = np.random.default_rng(seed)
    model = DispersionModel(p)
    spec = GridSpec(64, 1.0)
    times = np.cumsum(rng.uniform(0.1, 1.0, 9))
    snaps = [(float(t), GridMeasure(spec, rng.random(64) * (rng.random(64) < 0.5), atom_mass=float(rng.random())))
             for t in times]
    cfg = MultiscaleConfig.default(model, mu, m_list=[1, 2, 4, 8, 16, 33])
    cfg.c_star = float(rng.uniform(0.05, 2.0))
    res = multiscale_sets(snaps, cfg, model, mu)
    _check_algebra(res)


def test_json_doc_and_csv(reference_run):
    cfg, tr = reference_run
    res = multiscale_sets(tr.snapshots, cfg.multiscale(), QUAD, 0.0)
    doc = multiscale_json_doc(res, QUAD, 0.0, cfg.grid().width, 0.5)
    assert [s["m"] for s in doc["scales"]] == sorted(cfg.ms_m_list)
    assert all(s["label"] == "diagnostic only" for s in doc["scales"])
    text = diagnostics_csv(tr.snapshots, cfg.params(), QUAD, (2, 3))
    lines = text.splitlines()
    assert lines[0] == "t,phi_05,phi_075,dissipation_05,m_R_2,m_R_3"
    assert len(lines) == 1 + len(tr.snapshots)
