"""Naive full-loop assembly used as a correctness oracle.

Every ordered index pair/triple is visited, kernels come from the scalar
functions in ``kernels`` and outputs go through ``grid.deposit_into``.  No
symmetry, no lattice, no tables.  Slow; meant for small grids.
"""
from __future__ import annotations

import numpy as np

from .collision import RateMeasure
from .grid import GridMeasure, deposit_into
from .kernels import k22, kminus12, kminus31, kplus12, kplus31


class _Acc:
    def __init__(self, spec):
        self.spec = spec
        self.cells = np.zeros(spec.n_cells)
        self.ledger = np.zeros(3)
        self.flux = 0.0

    def event(self, rate, losses, gains_cells, outputs):
        if rate == 0.0:
            return
        for i in losses:
            self.cells[i] -= rate
        for i in gains_cells:
            self.cells[i] += rate
        for w in outputs:
            deposit_into(self.cells, self.ledger, self.spec, w, rate)
        self.flux += rate * (len(gains_cells) + len(outputs) - len(losses))

    def result(self, which):
        c = self.spec.centers
        rm = RateMeasure(self.cells, float(self.ledger[0]), float(self.ledger[1]), float(self.ledger[2]))
        rm.energy_residual = float(np.dot(self.cells, c) + self.ledger[2])
        setattr(rm, "number_flux_" + which, self.flux)
        return rm


def reference_r1(m: GridMeasure, params, model) -> RateMeasure:
    acc, w, g = _Acc(m.spec), m.spec.centers, m.cell_mass
    A = model.frakA_of
    n = len(g)
    for i in range(n):
        for j in range(n):
            gg = g[i] * g[j]
            acc.event(params.c12 * kplus12(params, A, w[i], w[j]) * gg, [i, j], [], [w[i] + w[j]])
            if w[i] >= w[j]:
                acc.event(2 * params.c12 * kminus12(params, A, w[i], w[j]) * gg, [i], [j], [w[i] - w[j]])
    return acc.result("r1")


def reference_r2(m: GridMeasure, params, model) -> RateMeasure:
    acc, w, g = _Acc(m.spec), m.spec.centers, m.cell_mass
    n = len(g)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                if w[i] + w[j] < w[l]:
                    continue
                rate = params.c22 * k22(params, model, w[i], w[j], w[l]) * g[i] * g[j] * g[l]
                acc.event(rate, [i, j], [l], [w[i] + w[j] - w[l]])
    rm = acc.result("r2")
    rm.number_flux_r2 = 0.0 if acc.flux == 0.0 else acc.flux
    return rm


def reference_r3(m: GridMeasure, params, model) -> RateMeasure:
    acc, w, g = _Acc(m.spec), m.spec.centers, m.cell_mass
    A = model.frakA_of
    n = len(g)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                ggg = g[i] * g[j] * g[l]
                acc.event(params.c31 * kplus31(params, A, w[i], w[j], w[l]) * ggg,
                          [i, j, l], [], [w[i] + w[j] + w[l]])
                if w[i] >= w[j] + w[l]:
                    acc.event(3 * params.c31 * kminus31(params, A, w[i], w[j], w[l]) * ggg,
                              [i], [j, l], [w[i] - w[j] - w[l]])
    return acc.result("r3")


def reference_rhs(m: GridMeasure, params, model) -> RateMeasure:
    return reference_r1(m, params, model) + reference_r2(m, params, model) + reference_r3(m, params, model)
