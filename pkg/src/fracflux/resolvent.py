"""Resolvent problems ``lam u - (p D^alpha u)' = g``, ``u_x(0) = 0``, ``u(1) = 0``.

Three independent routes:

``resolvent_closed_form``
    ``p == 1`` only.  ``u(x) = u0 E_{a+1}(lam x^{a+1}) - (g * y^a E_{a+1,a+1}(lam y^{a+1}))(x)``
    with ``u0`` fixed by ``u(1) = 0``.  The convolution is product
    integration against the ``y**a`` weight.

``series_oracle``
    ``p == 1`` only.  The Neumann series ``sum lam^k I^{k(a+1)}`` built
    from repeated discrete fractional integrals; no Mittag-Leffler values.

``resolvent_matrix``
    Any ``p``.  Direct solve with the assembled :class:`OperatorMatrix`.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack
from scipy.special import gammaln

from .fracops import frac_integral
from .lattice import FracFluxError, Grid, GridFunction, check_order
from .mittag import MLParams, ml_eval
from .operator import Coefficient, OperatorMatrix, SpectrumHitError, assemble_operator

__all__ = [
    "SectorError",
    "WrongSolverError",
    "NearZeroDenominatorError",
    "ResolventProblem",
    "BoundaryConstant",
    "in_sector",
    "ml_kernel_convolution",
    "boundary_constant",
    "resolvent_closed_form",
    "series_oracle",
    "series_tail_bound",
    "resolvent_matrix",
    "shifted_system",
]

ANGLE_SLACK = 1e-12
MAX_LAMBDA = 100.0
COND_LIMIT = 1e12


class SectorError(FracFluxError, ValueError):
    pass


class WrongSolverError(FracFluxError, ValueError):
    pass


class NearZeroDenominatorError(FracFluxError, ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class ResolventProblem:
    lam: complex
    g: GridFunction
    alpha: float
    p: Coefficient | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "alpha", check_order(self.alpha))
        if not cmath.isfinite(self.lam):
            raise ValueError("lambda must be finite")
        if self.p is None:
            object.__setattr__(self, "p", Coefficient.constant(self.g.grid))

    @property
    def grid(self) -> Grid:
        return self.g.grid


@dataclass(frozen=True)
class BoundaryConstant:
    value: complex


def in_sector(lam: complex, alpha: float) -> bool:
    """Is ``lam`` in ``{|arg z| <= pi (alpha+1)/2} U {0}``?"""
    lam = complex(lam)
    if lam == 0:
        return True
    return abs(cmath.phase(lam)) <= math.pi * (alpha + 1.0) / 2.0 + ANGLE_SLACK


def _check_closed_form(lam: complex, alpha: float) -> None:
    if not in_sector(lam, alpha):
        raise SectorError(
            f"lambda = {lam} lies outside the sector |arg lambda| <= "
            f"pi*(alpha+1)/2 = {math.pi * (alpha + 1) / 2:.6f}; "
            "the closed form is only guaranteed there (use the matrix solver)"
        )
    if abs(lam) > MAX_LAMBDA:
        raise SectorError(f"|lambda| = {abs(lam):g} exceeds {MAX_LAMBDA:g}")


def _power_hat_weights(n: int, a: float) -> np.ndarray:
    """``omega_k`` with ``int_0^{x_i} y^a f_lin(y) dy = sum_k omega_k f_k`` (k < i), see below.

    Returns the per-cell left/right weights stacked as ``(wl, wr)``; a full
    integral up to ``x_i`` uses cells ``0 .. i-1``.
    """
    h = 1.0 / n
    x = np.arange(n + 1) * h
    l, r = x[:-1], x[1:]
    m0 = (r ** (a + 1) - l ** (a + 1)) / (a + 1)
    m1 = (r ** (a + 2) - l ** (a + 2)) / (a + 2)
    wl = (r * m0 - m1) / h
    wr = (m1 - l * m0) / h
    return np.vstack([wl, wr])


def ml_kernel_convolution(g: GridFunction, alpha: float, lam: complex) -> np.ndarray:
    """Nodal values of ``(g * y^a E_{a+1,a+1}(lam y^{a+1}))(x_i)``.

    ``int_0^{x_i} g(x_i - y) y^a m(y) dy`` with ``m(y) = E_{a+1,a+1}(lam y^{a+1})``;
    the product ``g(x_i - y) m(y)`` is interpolated linearly and integrated
    exactly against ``y**a``.
    """
    n = g.grid.n
    y = g.grid.nodes
    m = ml_eval(MLParams(alpha + 1.0, alpha + 1.0), lam * y ** (alpha + 1.0))
    wl, wr = _power_hat_weights(n, alpha)
    full = np.zeros(n + 1)
    full[:-1] += wl
    full[1:] += wr
    km = full * m
    # conv_i = sum_{k=0..i} full_k m_k g_{i-k} - wl_i m_i g_0  (node k = i is a right end)
    conv = np.convolve(km, g.values)[: n + 1]
    corr = np.zeros(n + 1, dtype=complex)
    corr[:-1] = wl * m[:-1] * g.values[0]
    return conv - corr


def boundary_constant(lam: complex, g: GridFunction, alpha: float) -> BoundaryConstant:
    """Left-end value ``u(0)`` that makes the closed-form solution vanish at 1."""
    alpha = check_order(alpha)
    lam = complex(lam)
    _check_closed_form(lam, alpha)
    denom = ml_eval(MLParams(alpha + 1.0, 1.0), lam)
    if abs(denom) < 1e-12:
        raise NearZeroDenominatorError(f"E_(alpha+1)({lam}) = {denom} is too close to 0")
    return BoundaryConstant(complex(ml_kernel_convolution(g, alpha, lam)[-1] / denom))


def resolvent_closed_form(prob: ResolventProblem) -> GridFunction:
    if not prob.p.is_unit():
        raise WrongSolverError(
            "the Mittag-Leffler closed form needs p == 1; use resolvent_matrix"
        )
    _check_closed_form(prob.lam, prob.alpha)
    a, lam, g = prob.alpha, prob.lam, prob.g
    conv = ml_kernel_convolution(g, a, lam)
    denom = ml_eval(MLParams(a + 1.0, 1.0), lam)
    if abs(denom) < 1e-12:
        raise NearZeroDenominatorError(f"E_(alpha+1)({lam}) = {denom} is too close to 0")
    u0 = conv[-1] / denom
    x = g.grid.nodes
    u = u0 * ml_eval(MLParams(a + 1.0, 1.0), lam * x ** (a + 1.0)) - conv
    u[-1] = 0.0  # exact up to rounding; pin it
    return GridFunction(g.grid, u)


def series_tail_bound(lam: complex, alpha: float, terms: int, g_sup: float = 1.0) -> float:
    """Bound on the sup-norm of the dropped terms ``k >= terms`` of both series.

    Uses ``|lam^k I^{k(a+1)} f| <= ||f||_inf |lam|^k / Gamma(k(a+1) + 1)`` and a
    geometric bound once consecutive ratios fall below 1/2.
    """
    r = abs(complex(lam))
    if r == 0:
        return 0.0
    b = alpha + 1.0
    total = 0.0
    for shift, scale in ((0, 1.0), (1, g_sup)):
        k = terms
        while True:
            lt = k * math.log(r) - gammaln((k + shift) * b + 1.0)
            ratio = r * math.exp(gammaln((k + shift) * b + 1.0) - gammaln((k + 1 + shift) * b + 1.0))
            if ratio < 0.5:
                total += scale * 2.0 * math.exp(lt)
                break
            total += scale * math.exp(lt)
            k += 1
            if k > terms + 100_000:
                return math.inf
    return total


def series_oracle(prob: ResolventProblem, terms: int = 60) -> GridFunction:
    """Truncated Neumann-series solution, independent of the Mittag-Leffler code."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if not prob.p.is_unit():
        raise WrongSolverError("the series construction needs p == 1; use resolvent_matrix")
    _check_closed_form(prob.lam, prob.alpha)
    a, lam, g = prob.alpha, prob.lam, prob.g
    grid = g.grid

    def I_a1(v: GridFunction) -> GridFunction:
        return frac_integral(frac_integral(v, a), 1.0)

    ones = grid.constant(1.0)
    s1 = np.zeros(grid.n + 1, dtype=complex)
    s2 = np.zeros(grid.n + 1, dtype=complex)
    t1, t2 = ones, I_a1(g)
    lam_k = 1.0 + 0j
    g_sup = float(np.max(np.abs(g.values)))
    for k in range(terms):
        s1 += lam_k * t1.values
        s2 += lam_k * t2.values
        if lam == 0:
            break
        if series_tail_bound(lam, a, k + 1, g_sup) <= 1e-17 * max(
            np.max(np.abs(s1)), np.max(np.abs(s2)), 1e-300
        ):
            break
        lam_k *= lam
        t1, t2 = I_a1(t1), I_a1(t2)
    else:
        tail = series_tail_bound(lam, a, terms, g_sup)
        if tail > 1e-10 * max(np.max(np.abs(s1)), 1e-300):
            warnings.warn(
                f"series truncated at {terms} terms with tail bound {tail:.3g}",
                RuntimeWarning,
                stacklevel=2,
            )
    u0 = s2[-1] / s1[-1]
    u = u0 * s1 - s2
    u[-1] = 0.0
    return GridFunction(grid, u)


def shifted_system(A: OperatorMatrix, lam: complex) -> np.ndarray:
    """``lam I - A_h`` on interior rows plus the two constraint rows."""
    n = A.n
    M = np.array(A.entries, dtype=complex)
    idx = np.arange(1, n)
    M[idx, idx] += lam
    return M


def _solve_checked(M: np.ndarray, rhs: np.ndarray, lam: complex) -> np.ndarray:
    lu, piv = sla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    gecon = lapack.zgecon if np.iscomplexobj(lu) else lapack.dgecon
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0 or rcond * COND_LIMIT < 1.0 or not np.all(np.isfinite(lu.diagonal())):
        raise SpectrumHitError(
            f"lambda = {lam}: shifted system is singular or ill-conditioned "
            f"(1-norm condition estimate {1.0 / max(rcond, 1e-300):.3g})"
        )
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def resolvent_matrix(prob: ResolventProblem, A: OperatorMatrix | None = None) -> GridFunction:
    """Solve ``(lam I - A_h) u = g`` with the discrete boundary constraints.

    The two constrained slots are re-projected after the solve so both
    constraints hold to rounding of a three-term formula.
    """
    if A is None:
        A = assemble_operator(prob.alpha, prob.p, prob.grid)
    elif A.grid != prob.grid:
        raise FracFluxError("operator and right-hand side live on different grids")
    rhs = np.array(prob.g.values, dtype=complex)
    rhs[0] = 0.0
    rhs[-1] = 0.0
    u = _solve_checked(shifted_system(A, prob.lam), rhs, prob.lam)
    return GridFunction(prob.grid, A.project(u))
