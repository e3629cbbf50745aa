"""Property suites behind ``condkin verify``.

Each suite returns a list of PropertyResult; the CLI turns any failure
into exit status 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .config import RunConfig
from .diagnostics import concave_dissipation, phi_alpha
from .grid import init_measure
from .integrator import run
from .kernels import sine3, sine4_signed_sum
from .supersolution import BarrierFunction, PreconditionError, check_supersolution, random_instance

SUITES = ("identities", "conservation", "dissipation", "supersolution", "oracle")


@dataclass
class PropertyResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), **self.details}


# -- tuple samplers ------------------------------------------------------------------

def _signed_combos(x):
    n = len(x)
    out = [abs(sum(s * v for s, v in zip(signs, x)))
           for signs in np.array(np.meshgrid(*[[1, -1]] * n)).T.reshape(-1, n)]
    return np.array(out)


def random_sine_tuples(rng, n_tuples: int, size: int, gap: float = 0.25, lo=0.3, hi=2.0):
    """Positive tuples whose signed combinations all stay >= gap away from 0."""
    out = []
    while len(out) < n_tuples:
        x = rng.uniform(lo, hi, size)
        if _signed_combos(x).min() >= gap:
            out.append(tuple(float(v) for v in x))
    return out


def resonant_31(rng, n_tuples: int, p: float, branch: str = "sum"):
    """(k1, k2, k3, k) with k^p = k1^p + k2^p + k3^p.

    branch "sum": |k| + k_min >= the other two (where the sum form applies);
    branch "min": the complement.
    """
    out = []
    while len(out) < n_tuples:
        k1, k2, k3 = rng.uniform(0.1, 2.0, 3)
        k = (k1 ** p + k2 ** p + k3 ** p) ** (1.0 / p)
        s = sorted((k1, k2, k3))
        in_sum = k + s[0] >= s[1] + s[2]
        if in_sum == (branch == "sum"):
            out.append((k1, k2, k3, k))
    return out


def resonant_22(rng, n_tuples: int, p: float):
    """(k, k1, k2, k3) with k^p + k1^p = k2^p + k3^p."""
    out = []
    while len(out) < n_tuples:
        k, k1, k2 = rng.uniform(0.1, 2.0, 3)
        s = k ** p + k1 ** p - k2 ** p
        if s > 0:
            out.append((k, k1, k2, s ** (1.0 / p)))
    return out


# -- suites --------------------------------------------------------------------------

def suite_identities(seed: int = 0, n_oracle: int = 20, n_resonant: int = 100):
    rng = np.random.default_rng(seed)
    res = []
    for name, size, closed, damped in (("sine3_vs_damped_quadrature", 3, sine3, oracles.damped_sine3),
                                       ("sine4_vs_damped_quadrature", 4, sine4_signed_sum, oracles.damped_sine4)):
        err = max(abs(closed(*t) - damped(*t)) for t in random_sine_tuples(rng, n_oracle, size))
        res.append(PropertyResult(name, err <= 1e-4, {"max_abs_error": err, "tolerance": 1e-4}))
    ps = rng.uniform(1.5, 2.0, n_resonant)
    e22 = max(abs(sine4_signed_sum(*t) - math.pi / 4 * min(t))
              for p in ps for t in resonant_22(rng, 1, p))
    res.append(PropertyResult("resonant_2_2_min_form", e22 <= 1e-12, {"max_abs_error": e22}))
    e31 = max(abs(sine4_signed_sum(*t) - math.pi / 8 * (t[0] + t[1] + t[2] - t[3]))
              for p in ps for t in resonant_31(rng, 1, p, "sum"))
    res.append(PropertyResult("resonant_3_1_sum_form", e31 <= 1e-12, {"max_abs_error": e31}))
    e31m = max(abs(sine4_signed_sum(*t) - math.pi / 4 * min(t[:3]))
               for p in ps for t in resonant_31(rng, 1, p, "min"))
    res.append(PropertyResult("resonant_3_1_min_branch", e31m <= 1e-12, {"max_abs_error": e31m}))
    return res


def canned_run(cfg: RunConfig | None = None, alphas=(0.5, 0.75)):
    cfg = (cfg or RunConfig()).validate()
    model, params, spec = cfg.model(), cfg.params(), cfg.grid()
    m0 = init_measure(spec, cfg.profile(), model)
    tracked = {a: phi_alpha(a) for a in alphas}
    traj = run(m0, cfg.control(), params, model, cfg.t_end, cfg.snapshot_stride, tracked=tracked)
    return cfg, traj


def suite_conservation(seed: int = 0, traj=None):
    if traj is None:
        _, traj = canned_run()
    number = traj.column("number")
    rel_inc = float(np.max(np.diff(number)) / number[0]) if number.size > 1 else 0.0
    e = traj.column("energy") + traj.column("overflow_energy")
    drift = float(np.max(np.abs(e - e[0])) / e[0])
    n0 = number[0]
    return [
        PropertyResult("number_non_increasing", rel_inc <= 1e-12,
                       {"max_step_increase_relative": rel_inc, "steps": len(traj.dts)}),
        PropertyResult("energy_plus_overflow_constant", drift <= 1e-10, {"max_relative_drift": drift}),
        PropertyResult("clip_ledger_small", traj.clip_ledger <= 1e-10 * n0, {"clip_ledger": traj.clip_ledger}),
    ]


def suite_dissipation(seed: int = 0, run_result=None):
    cfg, traj = run_result or canned_run()
    out = []
    dts = np.array(traj.dts)
    for a, vals in traj.tracked.items():
        vals = np.array(vals)
        inc = float(np.max(np.diff(vals))) if vals.size > 1 else 0.0
        book = float(np.max(np.abs(np.diff(vals) - dts * np.array(traj.tracked_rate[a])))) if vals.size > 1 else 0.0
        tol = 1e-12 * vals[0]
        out.append(PropertyResult(f"phi_{a:g}_non_increasing", inc <= tol, {"max_step_increase": inc, "tolerance": tol}))
        out.append(PropertyResult(f"phi_{a:g}_bookkeeping", book <= tol, {"max_mismatch": book, "tolerance": tol}))
    # reported, not asserted: decrease of phi_1/2 against the time-integrated dissipation
    model, params = cfg.model(), cfg.params()
    snaps = traj.snapshots
    diss = [concave_dissipation(m, 0.5, params, model) for _, m in snaps]
    ts = [t for t, _ in snaps]
    integral = float(np.sum(np.diff(ts) * np.array(diss[:-1]))) if len(ts) > 1 else 0.0
    vals = traj.tracked[0.5]
    out.append(PropertyResult("dissipation_report", True, {
        "phi_05_decrease": float(vals[0] - vals[-1]),
        "integrated_dissipation_05": integral,
        "mass_plus_energy": float(traj.rows[0][1] + traj.rows[0][2]),
        "C1": 1.0,
    }))
    return out


def suite_supersolution(seed: int = 0, n_instances: int = 20):
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(n_instances):
        K, P, R = random_instance(rng)
        rep = check_supersolution(K, P, K.t_grid[::2], np.linspace(0.0, R / 10, 41))
        worst = min(worst, rep.min_residual / max(rep.max_abs_psi, 1e-300))
    try:
        BarrierFunction(np.sqrt, name="sqrt").validate()
        rejected = False
    except PreconditionError:
        rejected = True
    return [
        PropertyResult("random_instances_residual", worst >= -1e-6, {"min_relative_residual": worst,
                                                                      "instances": n_instances}),
        PropertyResult("concave_barrier_rejected", rejected, {}),
    ]


def suite_oracle(seed: int = 12345, n_samples: int = 10_000_000):
    mean, se = oracles.c12_weak_form_mc(n_samples=n_samples, seed=seed)
    reduced = oracles.c12_weak_form_reduced()
    z = abs(mean - reduced) / se
    return [PropertyResult("c12_weak_form_mc_vs_reduced", z <= 3.0,
                           {"mc_mean": mean, "mc_stderr": se, "reduced": reduced, "z_score": z,
                            "samples": n_samples})]


def run_suite(name: str, seed: int = 0):
    if name == "all":
        run_result = canned_run()
        out = suite_identities(seed)
        out += suite_conservation(seed, run_result[1])
        out += suite_dissipation(seed, run_result)
        out += suite_supersolution(seed)
        out += suite_oracle(seed + 12345)
        return out
    if name == "identities":
        return suite_identities(seed)
    if name == "conservation":
        return suite_conservation(seed)
    if name == "dissipation":
        return suite_dissipation(seed)
    if name == "supersolution":
        return suite_supersolution(seed)
    if name == "oracle":
        return suite_oracle(seed + 12345)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
