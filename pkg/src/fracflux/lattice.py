"""Uniform grids on [0, 1], nodal grid functions and the discrete norms.

All quadratures here treat a grid function as its piecewise-linear
interpolant.  Nonsingular integrals use the composite trapezoid rule;
integrals against endpoint weights such as ``1/x`` or ``x**(-a)`` are
integrated exactly against the interpolant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "FracFluxError",
    "InvalidGridError",
    "GridMismatchError",
    "InvalidOrderError",
    "DomainViolationError",
    "Grid",
    "GridFunction",
    "make_uniform_grid",
    "check_order",
    "trapezoid_weights",
    "l2_inner",
    "l2_norm",
    "gagliardo_seminorm",
    "sobolev_norm",
    "weighted_half_norm",
    "endpoint_power_weights",
    "read_csv",
    "write_csv",
]


class FracFluxError(Exception):
    """Base class for errors raised by this package."""


class InvalidGridError(FracFluxError, ValueError):
    pass


class GridMismatchError(FracFluxError, ValueError):
    pass


class InvalidOrderError(FracFluxError, ValueError):
    pass


class DomainViolationError(FracFluxError, ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform partition of [0, 1] into ``n`` intervals."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4:
            raise InvalidGridError(f"grid needs an integer n >= 4, got {self.n!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.n)

    def __len__(self) -> int:
        return self.n + 1

    def sample(self, fn) -> "GridFunction":
        """Evaluate ``fn`` at the nodes."""
        return GridFunction(self, np.asarray(fn(self.nodes), dtype=complex))

    def constant(self, value: complex = 1.0) -> "GridFunction":
        return GridFunction(self, np.full(self.n + 1, value, dtype=complex))

    def zeros(self) -> "GridFunction":
        return self.constant(0.0)


@lru_cache(maxsize=32)
def _nodes(n: int) -> np.ndarray:
    x = np.arange(n + 1, dtype=float) / n
    x.flags.writeable = False
    return x


def make_uniform_grid(n: int) -> Grid:
    return Grid(n)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex nodal samples on a :class:`Grid`.

    ``singular`` lists node indices whose value is a placeholder for a
    point singularity (e.g. a Riemann-Liouville derivative at its base
    point).  Those slots hold ``nan`` and are skipped by the norms.
    """

    grid: Grid
    values: np.ndarray
    singular: tuple[int, ...] = field(default=())

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n + 1,):
            raise InvalidGridError(
                f"expected {self.grid.n + 1} nodal values, got shape {v.shape}"
            )
        ok = np.isfinite(v)
        if self.singular:
            ok[list(self.singular)] = True
        if not ok.all():
            raise ValueError("grid function values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_real(self, tol: float = 0.0) -> bool:
        im = np.abs(self.values.imag)
        return bool(np.nanmax(im) <= tol) if len(im) else True

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            _same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values, self.singular)

    def __repr__(self) -> str:
        return f"GridFunction(n={self.grid.n}, singular={self.singular})"


def _same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.grid != v.grid:
        raise GridMismatchError(f"grids differ: n={u.grid.n} vs n={v.grid.n}")


def check_order(alpha: float, *, allow_one: bool = False) -> float:
    """Validate a fractional order in (0, 1) (or (0, 1] with ``allow_one``)."""
    a = float(alpha)
    upper_ok = a <= 1.0 if allow_one else a < 1.0
    if not (a > 0.0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidOrderError(f"order must lie in {interval}, got {alpha!r}")
    return a


@lru_cache(maxsize=32)
def trapezoid_weights(n: int) -> np.ndarray:
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    w.flags.writeable = False
    return w


def _masked(u: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    w = np.array(trapezoid_weights(u.grid.n))
    vals = np.array(u.values)
    if u.singular:
        idx = list(u.singular)
        w[idx] = 0.0
        vals[idx] = 0.0
    return w, vals


def l2_inner(u: GridFunction, v: GridFunction) -> complex:
    """Trapezoid approximation of the integral of ``u * conj(v)`` over [0, 1]."""
    _same_grid(u, v)
    if u is v:
        w, a = _masked(u)
        return complex(np.sum(w * (a.real**2 + a.imag**2)))
    wu, a = _masked(u)
    wv, b = _masked(v)
    return complex(np.sum(np.minimum(wu, wv) * a * np.conj(b)))


def l2_norm(u: GridFunction) -> float:
    w, a = _masked(u)
    return math.sqrt(float(np.sum(w * np.abs(a) ** 2)))


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 < s < 1.0:
        raise InvalidOrderError(f"smoothness index must lie in (0, 1), got {s!r}")
    return s


def gagliardo_seminorm_sq(values: np.ndarray, n: int, s: float) -> np.ndarray:
    """Squared Gagliardo seminorm of one nodal vector or a batch (rows).

    Sums ``h**2 |u_i - u_j|**2 / |x_i - x_j|**(1+2s)`` over ordered pairs
    ``i != j``, one node offset at a time so constants give exactly zero.
    """
    s = _check_s(s)
    U = np.atleast_2d(values)
    h = 1.0 / n
    out = np.zeros(U.shape[0])
    for k in range(1, n + 1):
        diff = U[:, k:] - U[:, :-k]
        out += np.sum(diff.real**2 + diff.imag**2, axis=1) * (h * k) ** (-1.0 - 2.0 * s)
    out *= 2.0 * h * h
    return out if np.ndim(values) == 2 else out[0]


def gagliardo_seminorm(u: GridFunction, s: float) -> float:
    """Discrete double-sum Gagliardo seminorm of order ``s``, diagonal excluded."""
    return math.sqrt(float(gagliardo_seminorm_sq(u.values, u.grid.n, s)))


def sobolev_norm(u: GridFunction, s: float) -> float:
    return math.sqrt(l2_norm(u) ** 2 + gagliardo_seminorm(u, s) ** 2)


def sobolev_norm_sq_batch(U: np.ndarray, n: int, s: float) -> np.ndarray:
    """Squared discrete ``H^s`` norms of the rows of ``U``."""
    w = trapezoid_weights(n)
    return (np.abs(U) ** 2) @ w + gagliardo_seminorm_sq(U, n, s)


@lru_cache(maxsize=32)
def endpoint_power_weights(n: int, a: float) -> np.ndarray:
    """Weights ``w`` with ``sum(w * f) == integral of x**(-a) * f_lin`` over [0, 1].

    ``f_lin`` is the piecewise-linear interpolant of the nodal values ``f``.
    Valid for ``a < 2`` when the interpolant vanishes fast enough at 0; for
    ``a < 1`` it is an ordinary product-integration rule.
    """
    h = 1.0 / n
    x = _nodes(n)
    left, right = x[:-1], x[1:]
    if a == 1.0:
        m0 = np.empty(n)
        m0[0] = np.inf
        m0[1:] = np.log(right[1:] / left[1:])
    else:
        m0 = (right ** (1.0 - a) - left ** (1.0 - a)) / (1.0 - a)
    m1 = (right ** (2.0 - a) - left ** (2.0 - a)) / (2.0 - a)
    # on each cell f_lin = f_k (b - x)/h + f_{k+1} (x - a)/h
    wl = (right * m0 - m1) / h
    wr = (m1 - left * m0) / h
    if a >= 1.0:
        # first cell: only the right hat survives when f(0) = 0
        wl[0] = np.nan
        wr[0] = h ** (1.0 - a) / (2.0 - a)
    w = np.zeros(n + 1)
    w[:-1] += wl
    w[1:] += wr
    w.flags.writeable = False
    return w


def weighted_half_norm(u: GridFunction, side: str = "left") -> float:
    """Norm of the half-order spaces with the ``1/x`` or ``1/(1-x)`` weight term.

    The function must vanish at the singular endpoint.
    """
    vals = u.values
    if side == "left":
        base = vals[0]
    elif side == "right":
        base = vals[-1]
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if base != 0:
        raise DomainViolationError(
            f"u must vanish at the {side} endpoint for the weighted half norm"
        )
    # |u|^2 is quadratic on each cell; integrate |u_lin|^2 / x exactly.
    x = u.grid.nodes
    h = u.grid.h
    a = vals if side == "left" else vals[::-1]
    fa, fb = a[:-1], a[1:]
    l, r = x[:-1], x[1:]
    # u_lin = c0 + c1 x on each cell
    c1 = (fb - fa) / h
    c0 = fa - c1 * l
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(l > 0, np.log(r / np.where(l > 0, l, 1.0)), 0.0)
    cell = (
        np.abs(c0) ** 2 * logs
        + 2.0 * np.real(c0 * np.conj(c1)) * (r - l)
        + np.abs(c1) ** 2 * (r**2 - l**2) / 2.0
    )
    # first cell: c0 = 0 since u vanishes at the endpoint
    cell[0] = np.abs(c1[0]) ** 2 * r[0] ** 2 / 2.0
    weighted = float(np.sum(cell))
    return math.sqrt(sobolev_norm(u, 0.5) ** 2 + weighted)


def write_csv(u: GridFunction, path: str | Path) -> None:
    """Write ``x,re,im`` rows at full double precision."""
    with open(path, "w", newline="") as fh:
        fh.write("x,re,im\n")
        for xi, vi in zip(u.x, u.values):
            fh.write(f"{float(xi)!r},{float(vi.real)!r},{float(vi.imag)!r}\n")


def read_csv(path: str | Path) -> GridFunction:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        if [c.strip() for c in header] != ["x", "re", "im"]:
            raise ValueError(f"{path}: expected header x,re,im, got {header}")
        for row in reader:
            if row:
                rows.append([float(c) for c in row])
    data = np.array(rows)
    n = len(data) - 1
    grid = Grid(n)
    if not np.allclose(data[:, 0], grid.nodes, atol=1e-12):
        raise InvalidGridError(f"{path}: nodes are not a uniform grid on [0, 1]")
    return GridFunction(grid, data[:, 1] + 1j * data[:, 2])
