"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records its measured values through the ``accept`` fixture; the
terminal summary prints one PASS/FAIL line per criterion.
"""

import cmath
import math
import time

import numpy as np
import pytest
from scipy.special import gamma

from fracflux.cli import main
from fracflux.evolution import EvolutionProblem, evolve, smoothing_probe
from fracflux.lattice import Grid, GridFunction, l2_norm
from fracflux.mittag import MLParams, SectorSpec, ml_eval, ml_sector_min_modulus
from fracflux.operator import Coefficient, assemble_operator, numerical_range_sample, resolvent_bound_probe
from fracflux.resolvent import ResolventProblem, resolvent_closed_form, resolvent_matrix, series_oracle
from fracflux.verify import (
    check_composition,
    check_energy_identity,
    check_pointwise_product,
    pointwise_slack,
    random_piecewise_linear,
)

ALPHAS = (0.3, 0.5, 0.7)


def rel(u, v):
    return l2_norm(u - v) / l2_norm(v)


def indicator(grid):
    return GridFunction(grid, (grid.nodes <= 0.5).astype(float))


# 1 -------------------------------------------------------------------------
def test_c01_closed_form_steady(accept):
    t0 = time.perf_counter()
    g = Grid(2048)
    u = resolvent_closed_form(ResolventProblem(0.0, g.constant(1.0), 0.5))
    err = rel(u, g.sample(lambda x: (1 - x**1.5) / gamma(2.5)))
    dt = time.perf_counter() - t0
    ok = accept(1, "steady profile", err <= 1e-4, f"rel L2 {err:.2e} <= 1e-4")
    ok &= accept(1, "runtime", dt < 10, f"{dt:.2f}s < 10s")
    assert ok


# 2 -------------------------------------------------------------------------
@pytest.mark.parametrize("a", ALPHAS)
@pytest.mark.parametrize("lam", [0.0, 1.0, 5 * cmath.exp(1j * math.pi / 4)], ids=["0", "1", "5e^ipi/4"])
def test_c02_triple_oracle(a, lam, accept):
    gaps = {}
    for n in (1024, 2048):
        g = Grid(n)
        prob = ResolventProblem(lam, g.constant(1.0), a)
        c, s, m = resolvent_closed_form(prob), series_oracle(prob, 60), resolvent_matrix(prob)
        gaps[n] = np.array([rel(c, s), rel(c, m), rel(s, m)])
    shrink = gaps[1024] / gaps[2048]
    ok = np.all(gaps[1024] <= 1e-2) and np.all(shrink >= 1.5)
    accept(2, f"a={a} lam={lam:.3g}", ok,
           f"gaps {np.array2string(gaps[1024], precision=2)} shrink {np.array2string(shrink, precision=2)}")
    assert ok


# 3 -------------------------------------------------------------------------
@pytest.mark.parametrize("a", ALPHAS)
def test_c03_energy_identity(a, accept):
    g = Grid(2048)
    r1 = check_energy_identity(g.constant(1.0), a, tol=1e-3)
    exact = 1 / gamma(2 - a)
    rx = check_energy_identity(g.sample(lambda x: x), a, tol=2e-2)
    rng = np.random.default_rng(2024)
    rr = [check_energy_identity(random_piecewise_linear(g, rng), a, tol=2e-2) for _ in range(20)]
    worst = max(r.metric for r in rr)
    ok = (r1.passed and abs(r1.lhs - exact) <= 1e-3 * exact and abs(r1.rhs - exact) <= 1e-3 * exact
          and rx.passed and all(r.passed for r in rr))
    accept(3, f"a={a}", ok, f"w=1 {r1.metric:.1e}, w=x {rx.metric:.1e}, random max {worst:.1e}")
    assert ok


# 4 -------------------------------------------------------------------------
def test_c04_composition(accept):
    gaps = {n: check_composition(Grid(n).sample(lambda x: x), 0.3, 0.4).metric for n in (1024, 2048)}
    order = math.log2(gaps[1024] / gaps[2048])
    ok = accept(4, "gap", gaps[2048] <= 5e-3, f"{gaps[2048]:.2e} <= 5e-3")
    ok &= accept(4, "order", order >= 0.8, f"observed {order:.7f} >= 0.8")
    assert ok


# 5 -------------------------------------------------------------------------
@pytest.mark.parametrize("p", ["one", "affine"])
def test_c05_numerical_range(p, accept):
    th = {}
    for n in (512, 1024):
        g = Grid(n)
        coeff = Coefficient.constant(g) if p == "one" else Coefficient.affine(g, 1.0, 0.5)
        th[n] = numerical_range_sample(assemble_operator(0.5, coeff, g), 1000, seed=0).max_abs_arg
    drift = abs(th[1024] / th[512] - 1)
    ok = th[512] < math.pi / 2 and th[1024] < math.pi / 2 and drift <= 0.05
    accept(5, f"numerical range p={p}", ok,
           f"max|arg| {th[512]:.4f} (n=512), {th[1024]:.4f} (n=1024), drift {drift:.1%}")
    assert ok


@pytest.mark.parametrize("p", ["one", "affine"])
def test_c05_resolvent_plateau(p, accept):
    g = Grid(512)
    coeff = Coefficient.constant(g) if p == "one" else Coefficient.affine(g, 1.0, 0.5)
    A = assemble_operator(0.5, coeff, g)
    vals = np.array([v for _, v in resolvent_bound_probe(A, 3 * math.pi / 4, np.geomspace(1, 1e4, 41))])
    spread = vals.max() / vals.min()
    ok = accept(5, f"plateau p={p}", spread <= 10,
                f"max/min {spread:.1f} <= 10 (range {vals.min():.3g}..{vals.max():.3g})")
    assert ok


@pytest.mark.parametrize("p", ["one", "affine"])
def test_c05_positive_axis(p, accept):
    g = Grid(512)
    coeff = Coefficient.constant(g) if p == "one" else Coefficient.affine(g, 1.0, 0.5)
    A = assemble_operator(0.5, coeff, g)
    vals = np.array([v for _, v in resolvent_bound_probe(A, 0.0, np.geomspace(1e-2, 1e4, 25))])
    ok = accept(5, f"positive axis p={p}", vals.max() <= 1.05, f"max {vals.max():.5f} <= 1.05")
    assert ok


# 6 -------------------------------------------------------------------------
@pytest.mark.parametrize("a", ALPHAS)
def test_c06_pointwise_product(a, accept):
    g = Grid(512)
    rng = np.random.default_rng(6)
    reps = [check_pointwise_product(random_piecewise_linear(g, rng, knots=33), a) for _ in range(100)]
    const = pointwise_slack(g.constant(-2.5), a)
    worst = min(r.metric for r in reps)
    ok = all(r.passed for r in reps) and np.all(const == 0)
    accept(6, f"a={a}", ok, f"min slack {worst:.2e}, constant slack max {np.max(np.abs(const)):.0e}")
    assert ok


# 7 -------------------------------------------------------------------------
def test_c07_contraction(accept):
    g = Grid(512)
    traj = evolve(EvolutionProblem(indicator(g), 0.5, 1.0, 256))
    inc = float(np.max(np.diff(traj.norms())))
    ok = accept(7, "monotone norm", inc <= 1e-12, f"largest step change {inc:.2e} <= 1e-12")
    assert ok


def test_c07_steady_state(accept):
    g = Grid(1024)
    traj = evolve(EvolutionProblem(g.zeros(), 0.5, 20.0, 200, f=g.constant(1.0)))
    ref = resolvent_matrix(ResolventProblem(0.0, g.constant(1.0), 0.5))
    exact = g.sample(lambda x: (1 - x**1.5) / gamma(2.5))
    d, e = l2_norm(traj.states[-1] - ref), l2_norm(traj.states[-1] - exact)
    ok = accept(7, "steady state", d <= 1e-2 and e <= 1e-2,
                f"L2 gap {d:.1e} to the discrete resolvent, {e:.1e} to the exact profile")
    assert ok


# 8 -------------------------------------------------------------------------
def test_c08_smoothing(accept):
    sups = []
    for n, steps in ((256, 256), (512, 512)):
        g = Grid(n)
        sups.append(smoothing_probe(evolve(EvolutionProblem(indicator(g), 0.5, 1.0, steps)))[0])
    change = abs(sups[1] / sups[0] - 1)
    ok = all(math.isfinite(s) for s in sups) and change <= 0.25
    accept(8, "refinement", ok, f"sup {sups[0]:.4f} -> {sups[1]:.4f}, change {change:.1%} <= 25%")
    assert ok


# 9 -------------------------------------------------------------------------
def test_c09_mittag_leffler(accept):
    e1 = abs(ml_eval(MLParams(1, 1), 1.0) - math.e)
    e2 = abs(ml_eval(MLParams(2, 1), -math.pi**2) + 1)
    ok = accept(9, "values", e1 <= 1e-12 and e2 <= 1e-12, f"errors {e1:.0e}, {e2:.0e}")
    radii = (0.0,) + tuple(np.geomspace(1e-2, 50, 60))
    for a in (0.25, 0.5, 0.75):
        m, where = ml_sector_min_modulus(a + 1, SectorSpec(math.pi * (a + 1) / 2, radii, 61))
        ok &= accept(9, f"sector a={a}", m > 0, f"min |E| {m:.3f} at {where:.3g}")
    assert ok


# 10 ------------------------------------------------------------------------
def test_c10_verify_all(tmp_path, accept):
    t0 = time.perf_counter()
    code = main(["verify-all", "--out", str(tmp_path)])
    dt = time.perf_counter() - t0
    ok = accept(10, "exit status", code == 0, f"exit {code}")
    ok &= accept(10, "runtime", dt < 300, f"{dt:.1f}s < 300s")
    assert ok
