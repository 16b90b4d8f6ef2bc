"""Numerical checks of the identities and inequalities behind the operator theory.

Each ``check_*`` function returns a :class:`CheckReport`; :func:`verify_all`
runs the whole campaign over ``alpha in {0.3, 0.5, 0.7}`` and both default
diffusivities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from .fracops import RIGHT, caputo, difference_quotient, frac_integral, rl_derivative
from .lattice import (
    Grid,
    GridFunction,
    InvalidOrderError,
    check_order,
    endpoint_power_weights,
    gagliardo_seminorm_sq,
    l2_inner,
    l2_norm,
    sobolev_norm,
    sobolev_norm_sq_batch,
    trapezoid_weights,
)
from .operator import Coefficient, assemble_operator, constrained_samples, forms

__all__ = [
    "CheckReport",
    "energy_sides",
    "check_energy_identity",
    "check_composition",
    "check_adjoint",
    "check_pointwise_product",
    "check_coercivity",
    "check_norm_equivalence",
    "random_piecewise_linear",
    "verify_all",
    "DEFAULT_ALPHAS",
]

DEFAULT_ALPHAS = (0.3, 0.5, 0.7)


@dataclass(frozen=True)
class CheckReport:
    name: str
    anchor: str  # the statement being checked
    lhs: complex
    rhs: complex
    metric: float
    tol: float
    passed: bool
    params: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": _fmt(self.lhs),
            "rhs": _fmt(self.rhs),
            "metric": repr(float(self.metric)),
            "tol": repr(float(self.tol)),
            "pass": int(self.passed),
            "params": ";".join(f"{k}={v}" for k, v in sorted(self.params.items())),
        }


def _fmt(z) -> str:
    z = complex(z)
    return repr(z.real) if z.imag == 0 else f"{z.real!r}{z.imag:+}j"


def _relgap(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _report(name, anchor, lhs, rhs, metric, tol, **params) -> CheckReport:
    return CheckReport(name, anchor, lhs, rhs, float(metric), tol, bool(metric <= tol), params)


def random_piecewise_linear(grid: Grid, rng: np.random.Generator, knots: int = 9) -> GridFunction:
    """Standard normal values at ``knots`` equispaced points, linearly interpolated."""
    xk = np.linspace(0.0, 1.0, knots)
    return GridFunction(grid, np.interp(grid.nodes, xk, rng.standard_normal(knots)))


# ---------------------------------------------------------------------------
# energy identity


def energy_sides(w: GridFunction, alpha: float) -> tuple[float, float]:
    """Both sides of ``int RL^a w * w = a/(4 G(1-a)) |w|_{a/2}^2 + 1/(2 G(1-a)) int [x^-a + (1-x)^-a] w^2``.

    The left side splits the Riemann-Liouville derivative into its Caputo
    part (trapezoid pairing) and ``w(0) x^-a / G(1-a)``, whose pairing with
    ``w`` is integrated exactly.  The right side integrates the interpolant of
    ``w**2`` exactly against both endpoint weights.
    """
    alpha = check_order(alpha)
    n = w.grid.n
    v = w.values.real
    g1 = gamma(1.0 - alpha)
    pw = endpoint_power_weights(n, alpha)
    d = caputo(w, alpha).values.real
    lhs = float(np.sum(trapezoid_weights(n) * d * v)) + v[0] / g1 * float(pw @ v)
    semi = float(gagliardo_seminorm_sq(v, n, alpha / 2.0))
    sq = v * v
    weight = float(pw @ sq + pw[::-1] @ sq)
    rhs = alpha / (4.0 * g1) * semi + weight / (2.0 * g1)
    return lhs, rhs


def check_energy_identity(w: GridFunction, alpha: float, tol: float = 2e-2) -> CheckReport:
    if not w.is_real(tol=0.0):
        raise ValueError("energy identity is checked for real-valued w")
    lhs, rhs = energy_sides(w, alpha)
    return _report(
        "energy_identity",
        "int RL^a w w = a/(4G(1-a)) |w|^2_{a/2} + 1/(2G(1-a)) int (x^-a + (1-x)^-a) w^2",
        lhs, rhs, _relgap(lhs, rhs), tol, alpha=alpha, n=w.grid.n,
    )


# ---------------------------------------------------------------------------
# composition, adjoint, pointwise product


def _interior_l2(d: np.ndarray, h: float) -> float:
    return math.sqrt(h * float(np.sum(np.abs(d[1:-1]) ** 2)))


def check_composition(
    u: GridFunction, alpha: float, beta: float, tol: float = 5e-3
) -> CheckReport:
    """``RL^a (C^b u) = C^{a+b} u`` (or ``u'`` when ``a + b = 1``) on interior nodes."""
    alpha, beta = check_order(alpha), check_order(beta)
    total = alpha + beta
    if total > 1.0 + 1e-12:
        raise InvalidOrderError(f"composition needs alpha + beta <= 1, got {total}")
    lhs_f = rl_derivative(caputo(u, beta), alpha)
    if abs(total - 1.0) <= 1e-12:
        rhs_f = difference_quotient(u)
    else:
        rhs_f = caputo(u, total)
    d = lhs_f.values - rhs_f.values
    gap = _interior_l2(d, u.grid.h)
    return _report(
        "composition",
        "RL^a C^b u = C^(a+b) u",
        _interior_l2(lhs_f.values, u.grid.h), _interior_l2(rhs_f.values, u.grid.h),
        gap, tol, alpha=alpha, beta=beta, n=u.grid.n,
    )


def check_adjoint(u: GridFunction, v: GridFunction, alpha: float, tol: float = 5e-3) -> CheckReport:
    """``(I^a u, v) = (u, I^a_- v)``.

    The gap is measured relative to the Cauchy-Schwarz scale
    ``|I^a u| |v|`` so that nearly orthogonal pairs do not inflate it.
    """
    alpha = check_order(alpha)
    iu = frac_integral(u, alpha)
    lhs = l2_inner(iu, v)
    rhs = l2_inner(u, frac_integral(v, alpha, RIGHT))
    scale = max(l2_norm(iu) * l2_norm(v), abs(lhs), abs(rhs))
    metric = 0.0 if scale == 0 else abs(lhs - rhs) / scale
    return _report(
        "adjoint", "(I^a u, v) = (u, I^a_- v)", lhs, rhs, metric, tol,
        alpha=alpha, n=u.grid.n,
    )


def pointwise_slack(f: GridFunction, alpha: float) -> np.ndarray:
    """``C^a f * f - C^a(f^2) / 2`` at every node."""
    fr = f.values.real
    sq = GridFunction(f.grid, fr * fr)
    return caputo(f, alpha).values.real * fr - 0.5 * caputo(sq, alpha).values.real


def check_pointwise_product(f: GridFunction, alpha: float) -> CheckReport:
    """``(C^a f) f >= C^a(f^2) / 2``; passes iff the interior slack is above ``-1e-8 scale``."""
    alpha = check_order(alpha)
    if not f.is_real(tol=0.0):
        raise ValueError("pointwise product inequality is checked for real-valued f")
    s = pointwise_slack(f, alpha)[1:-1]
    scale = max(1.0, float(np.max(np.abs(f.values))) ** 2)
    m = float(s.min())
    return CheckReport(
        "pointwise_product", "(C^a f) f >= C^a(f^2)/2",
        m, 0.0, m, -1e-8 * scale, bool(m >= -1e-8 * scale),
        {"alpha": alpha, "n": f.grid.n},
    )


# ---------------------------------------------------------------------------
# coercivity and norm equivalence


def coercivity_ratios(alpha: float, p: Coefficient, count: int, seed: int):
    """Per-sample ``Re(-A_h u, u) / |u|_H^2`` and ``|u|_L2^2 / |u|_H^2``, ``H = H^{(1+a)/2}``."""
    A = assemble_operator(alpha, p, p.grid)
    U = constrained_samples(A, count, seed)
    num, den = forms(A, U)
    hs = sobolev_norm_sq_batch(U, A.n, (1.0 + alpha) / 2.0)
    return num.real / hs, den / hs


def check_coercivity(alpha: float, p: Coefficient, count: int = 500, seed: int = 0) -> CheckReport:
    """Empirical Garding constants: ``Re(-A_h u, u) >= c |u|_H^2 - C |u|^2`` with ``c > 0``.

    For ``p == 1`` ``C = 0`` and ``c`` is the minimum ratio.  Otherwise ``C``
    is zero when the plain ratio already stays positive and else twice the
    smallest shift that makes every sample nonnegative.
    """
    alpha = check_order(alpha)
    if count < 1:
        raise ValueError("count must be >= 1")
    a, b = coercivity_ratios(alpha, p, count, seed)
    if p.is_unit() or a.min() > 0:
        C = 0.0
    else:
        neg = a < 0
        C = 2.0 * float(np.max(-a[neg] / b[neg]))
    c = float(np.min(a + C * b))
    return CheckReport(
        "coercivity", "Re(-A u, u) >= c |u|^2_{(1+a)/2} - C |u|^2",
        c, C, c, 0.0, bool(c > 0),
        {"alpha": alpha, "n": p.grid.n, "p": p.label, "count": count, "seed": seed},
    )


def norm_ratio(u: GridFunction, alpha: float) -> float:
    """``|I^{(1-a)/2} u'| / |u|_{H^{(1+a)/2}}``."""
    frac = frac_integral(difference_quotient(u), (1.0 - alpha) / 2.0)
    return l2_norm(frac) / sobolev_norm(u, (1.0 + alpha) / 2.0)


def check_norm_equivalence(
    alpha: float, count: int = 500, seed: int = 0, n: int = 1024, max_spread: float = 100.0
) -> CheckReport:
    """Min and max of :func:`norm_ratio` over constrained samples; pass iff ``max/min <= max_spread``."""
    alpha = check_order(alpha)
    if count < 1:
        raise ValueError("count must be >= 1")
    grid = Grid(n)
    A = assemble_operator(alpha, Coefficient.constant(grid), grid)
    U = constrained_samples(A, count, seed)
    Ux = np.empty_like(U)
    Ux[:, 1:-1] = (U[:, 2:] - U[:, :-2]) / (2 * grid.h)
    Ux[:, 0] = (-3 * U[:, 0] + 4 * U[:, 1] - U[:, 2]) / (2 * grid.h)
    Ux[:, -1] = (3 * U[:, -1] - 4 * U[:, -2] + U[:, -3]) / (2 * grid.h)
    s = (1.0 - alpha) / 2.0
    frac = np.array([frac_integral(GridFunction(grid, r), s).values for r in Ux])
    w = trapezoid_weights(n)
    num = np.sqrt((np.abs(frac) ** 2) @ w)
    r = num / np.sqrt(sobolev_norm_sq_batch(U, n, (1.0 + alpha) / 2.0))
    lo, hi = float(r.min()), float(r.max())
    spread = hi / lo if lo > 0 else math.inf
    return CheckReport(
        "norm_equivalence", "|D^{(1+a)/2} u| ~ |u|_{(1+a)/2}",
        lo, hi, spread, max_spread, bool(lo > 0 and spread <= max_spread),
        {"alpha": alpha, "n": n, "count": count, "seed": seed},
    )


# ---------------------------------------------------------------------------
# campaign


def verify_all(n: int = 1024, seed: int = 0, alphas=DEFAULT_ALPHAS, count: int = 500) -> list[CheckReport]:
    """Run every check; deterministic for fixed arguments."""
    grid = Grid(n)
    rng = np.random.default_rng(seed)
    one = grid.constant(1.0)
    lin = grid.sample(lambda t: t)
    smooth = grid.sample(lambda t: np.sin(np.pi * t / 2))
    coeffs = (Coefficient.constant(grid), Coefficient.affine(grid, 1.0, 0.5))
    out: list[CheckReport] = []
    for a in alphas:
        out.append(check_energy_identity(one, a, tol=1e-3))
        out.append(check_energy_identity(lin, a))
        for _ in range(5):
            out.append(check_energy_identity(random_piecewise_linear(grid, rng), a))
        out.append(check_composition(lin, a, (1.0 - a) / 2.0))
        out.append(check_composition(smooth, a, 1.0 - a, tol=3e-2))
        out.append(check_adjoint(one, one, a, tol=1e-4))
        out.append(check_adjoint(
            random_piecewise_linear(grid, rng), random_piecewise_linear(grid, rng), a
        ))
        out.append(check_pointwise_product(lin, a))
        for _ in range(20):
            out.append(check_pointwise_product(random_piecewise_linear(grid, rng, knots=33), a))
        for p in coeffs:
            out.append(check_coercivity(a, p, count=count, seed=seed))
        out.append(check_norm_equivalence(a, count=count, seed=seed, n=n))
    return out
