"""Left/right fractional integrals, Caputo and Riemann-Liouville derivatives.

Every operator acts on the piecewise-linear interpolant of the nodal data
and integrates the power kernel exactly on each cell (product
integration).  Right-sided operators are the left-sided ones conjugated by
the reflection ``x -> 1 - x``.

Weight sequences are second differences of powers and would lose digits if
evaluated naively for large index; they go through ``expm1``/``log1p``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gamma

from .lattice import GridFunction, check_order

__all__ = [
    "LEFT",
    "RIGHT",
    "frac_integral",
    "caputo",
    "rl_derivative",
    "difference_quotient",
    "integral_matrix",
    "caputo_matrix",
    "caputo_midpoint_matrix",
]

LEFT = "left"
RIGHT = "right"


def _check_side(side: str) -> str:
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return side


def _pow_ratio_m1(m: np.ndarray, e: float, beta: float) -> np.ndarray:
    """``(1 + e/m)**beta - 1`` without cancellation."""
    with np.errstate(divide="ignore"):
        return np.expm1(beta * np.log1p(e / m))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=64)
def integral_weights(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Product-trapezoid weights for ``I^alpha``.

    Returns ``(t, a0)`` such that, up to the factor ``h**alpha / Gamma(alpha+2)``,
    ``I u(x_j) = a0[j] u_0 + sum_{k=1..j} t[j-k] u_k``.
    """
    beta = alpha + 1.0
    t = np.empty(n + 1)
    t[0] = 1.0
    m = np.arange(1, n + 1, dtype=float)
    # (m+1)^b - 2 m^b + (m-1)^b
    t[1:] = m**beta * (_pow_ratio_m1(m, 1.0, beta) + _pow_ratio_m1(m, -1.0, beta))
    a0 = np.zeros(n + 1)
    j = np.arange(1, n + 1, dtype=float)
    # (j-1)^b - (j-1-alpha) j^alpha
    a0[1:] = j**alpha * (j * _pow_ratio_m1(j, -1.0, beta) + beta)
    return _frozen(t), _frozen(a0)


@lru_cache(maxsize=64)
def caputo_weights(n: int, alpha: float) -> np.ndarray:
    """L1 weights ``b_m = (m+1)**(1-alpha) - m**(1-alpha)``."""
    g = 1.0 - alpha
    b = np.empty(n)
    b[0] = 1.0
    m = np.arange(1, n, dtype=float)
    b[1:] = m**g * _pow_ratio_m1(m, 1.0, g)
    return _frozen(b)


@lru_cache(maxsize=64)
def caputo_midpoint_weights(n: int, alpha: float) -> np.ndarray:
    """Weights for the Caputo derivative at the cell midpoints ``x_{j+1/2}``."""
    g = 1.0 - alpha
    c = np.empty(n)
    c[0] = 0.5**g
    m = np.arange(1, n, dtype=float)
    # (m+1/2)^g - (m-1/2)^g
    c[1:] = (m + 0.5) ** g * -_pow_ratio_m1(m + 0.5, -1.0, g)
    return _frozen(c)


def _lower_toeplitz(col: np.ndarray, size: int) -> np.ndarray:
    idx = np.arange(size)
    diff = idx[:, None] - idx[None, :]
    out = np.where(diff >= 0, col[np.clip(diff, 0, len(col) - 1)], 0.0)
    return out


@lru_cache(maxsize=8)
def integral_matrix(n: int, alpha: float) -> np.ndarray:
    """Dense left-sided ``I^alpha`` on the nodes, ``(n+1) x (n+1)``."""
    t, a0 = integral_weights(n, alpha)
    M = np.zeros((n + 1, n + 1))
    M[1:, 1:] = _lower_toeplitz(t, n)
    M[:, 0] = a0
    M *= (1.0 / n) ** alpha / gamma(alpha + 2.0)
    return _frozen(M)


@lru_cache(maxsize=8)
def caputo_matrix(n: int, alpha: float) -> np.ndarray:
    """Dense left-sided L1 Caputo matrix on the nodes."""
    b = caputo_weights(n, alpha)
    # D_j = sum_{k<j} b_{j-1-k} (u_{k+1} - u_k)
    T = np.zeros((n + 1, n))
    T[1:, :] = _lower_toeplitz(b, n)
    M = T @ _forward_difference(n)
    M *= (1.0 / n) ** -alpha / gamma(2.0 - alpha)
    return _frozen(M)


@lru_cache(maxsize=8)
def caputo_midpoint_matrix(n: int, alpha: float) -> np.ndarray:
    """Caputo derivative of the interpolant at ``x_{j+1/2}``, shape ``(n, n+1)``."""
    c = caputo_midpoint_weights(n, alpha)
    M = _lower_toeplitz(c, n) @ _forward_difference(n)
    M *= (1.0 / n) ** -alpha / gamma(2.0 - alpha)
    return _frozen(M)


def _forward_difference(n: int) -> np.ndarray:
    F = np.zeros((n, n + 1))
    i = np.arange(n)
    F[i, i] = -1.0
    F[i, i + 1] = 1.0
    return F


def _left_integral(v: np.ndarray, n: int, alpha: float) -> np.ndarray:
    t, a0 = integral_weights(n, alpha)
    out = np.zeros(n + 1, dtype=complex)
    out[1:] = np.convolve(t[:n], v[1:])[:n]
    out += a0 * v[0]
    return out * ((1.0 / n) ** alpha / gamma(alpha + 2.0))


def _left_caputo(v: np.ndarray, n: int, alpha: float) -> np.ndarray:
    b = caputo_weights(n, alpha)
    out = np.zeros(n + 1, dtype=complex)
    out[1:] = np.convolve(b, np.diff(v))[:n]
    return out * ((1.0 / n) ** -alpha / gamma(2.0 - alpha))


def _sided(op, u: GridFunction, alpha: float, side: str) -> np.ndarray:
    n = u.grid.n
    if _check_side(side) == LEFT:
        return op(u.values, n, alpha)
    return op(u.values[::-1], n, alpha)[::-1]


def frac_integral(u: GridFunction, alpha: float, side: str = LEFT) -> GridFunction:
    """Fractional integral of order ``alpha`` in (0, 1]; ``alpha = 1`` is plain integration."""
    alpha = check_order(alpha, allow_one=True)
    return GridFunction(u.grid, _sided(_left_integral, u, alpha, side))


def caputo(u: GridFunction, alpha: float, side: str = LEFT) -> GridFunction:
    """L1-scheme Caputo derivative; zero at the base node."""
    alpha = check_order(alpha)
    return GridFunction(u.grid, _sided(_left_caputo, u, alpha, side))


def rl_derivative(u: GridFunction, alpha: float, side: str = LEFT) -> GridFunction:
    """Riemann-Liouville derivative as Caputo plus the base-value term.

    Where ``u`` does not vanish at the base node the derivative is infinite
    there; that slot is ``nan`` and listed in ``singular``.
    """
    alpha = check_order(alpha)
    d = caputo(u, alpha, side).values.copy()
    x = u.grid.nodes
    if side == LEFT:
        base, dist, b_idx = u.values[0], x, 0
    else:
        base, dist, b_idx = u.values[-1], 1.0 - x, u.grid.n
    if base == 0:
        return GridFunction(u.grid, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        d += base * dist ** (-alpha) / gamma(1.0 - alpha)
    d[b_idx] = np.nan
    return GridFunction(u.grid, d, singular=(b_idx,))


def difference_quotient(u: GridFunction) -> GridFunction:
    """Nodal first derivative: centered inside, second-order one-sided at the ends."""
    v = u.values
    h = u.grid.h
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    d[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return GridFunction(u.grid, d)
