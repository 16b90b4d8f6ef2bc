"""Dense discretization of ``A u = (p(x) D^alpha u)'`` on [0, 1].

Boundary conditions are ``u_x(0) = 0`` and ``u(1) = 0``.  The matrix stored
in :class:`OperatorMatrix` is ``-A_h`` on interior rows (the accretive sign)
with two constraint rows:

* row 0: one-sided second-order Neumann condition ``(-3u_0 + 4u_1 - u_2)/(2h)``
* row n: ``u_n``

Interior rows are in divergence form.  The flux ``p D^alpha u`` is evaluated
at the cell midpoints ``x_{i+1/2}`` with the Caputo derivative of the
piecewise-linear interpolant taken exactly there, and ``p`` averaged from the
two neighbouring nodes.  As ``alpha -> 1`` the stencil becomes the standard
three-point Laplacian.

Eliminating the two constraints leaves a square operator ``K`` on the
interior unknowns ``u_1 .. u_{n-1}``; resolvent and spectral probes use it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .fracops import caputo_midpoint_matrix
from .lattice import (
    FracFluxError,
    Grid,
    GridFunction,
    GridMismatchError,
    check_order,
    sobolev_norm_sq_batch,
    trapezoid_weights,
)

__all__ = [
    "AssemblyError",
    "SpectrumHitError",
    "Coefficient",
    "OperatorMatrix",
    "SectorReport",
    "assemble_operator",
    "apply_operator",
    "constrained_samples",
    "numerical_range_sample",
    "resolvent_bound_probe",
    "asymmetry",
    "write_matrix",
]


class AssemblyError(FracFluxError, ValueError):
    pass


class SpectrumHitError(FracFluxError, ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class Coefficient:
    """Nodal samples of a positive Lipschitz diffusivity ``p``."""

    grid: Grid
    values: np.ndarray
    delta: float
    lip: float
    label: str = "custom"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise AssemblyError(
                f"coefficient has {v.size} samples, grid has {self.grid.n + 1} nodes"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficient samples must be finite")
        if not self.delta > 0:
            raise ValueError(f"positivity floor must be > 0, got {self.delta}")
        if v.min() < self.delta:
            raise ValueError(
                f"coefficient drops to {v.min():.3g}, below the floor {self.delta:.3g}"
            )
        steps = np.abs(np.diff(v))
        if steps.max(initial=0.0) > self.lip * self.grid.h * (1 + 1e-12) + 1e-15:
            raise ValueError(f"coefficient violates Lipschitz bound {self.lip}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, grid: Grid, values, label: str = "custom") -> "Coefficient":
        v = np.asarray(values, dtype=float)
        lip = float(np.abs(np.diff(v)).max(initial=0.0) / grid.h)
        return cls(grid, v, float(v.min()), lip, label)

    @classmethod
    def from_function(cls, grid: Grid, fn, label: str = "custom") -> "Coefficient":
        return cls.from_values(grid, fn(grid.nodes), label)

    @classmethod
    def constant(cls, grid: Grid, c: float = 1.0) -> "Coefficient":
        return cls(grid, np.full(grid.n + 1, float(c)), float(c), 0.0, f"const:{c:g}")

    @classmethod
    def affine(cls, grid: Grid, a: float, b: float) -> "Coefficient":
        """``p(x) = a + b x``."""
        return cls.from_values(grid, a + b * grid.nodes, f"affine:{a:g},{b:g}")

    def is_unit(self, tol: float = 1e-14) -> bool:
        return bool(np.all(np.abs(self.values - 1.0) <= tol))

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.values[:-1] + self.values[1:])


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    grid: Grid
    alpha: float
    p: Coefficient

    @property
    def bc_rows(self) -> tuple[int, int]:
        return (0, self.grid.n)

    @property
    def n(self) -> int:
        return self.grid.n

    @cached_property
    def prolongation(self) -> np.ndarray:
        """Map interior unknowns to a full nodal vector satisfying both constraints."""
        n = self.n
        P = np.zeros((n + 1, n - 1))
        P[1:n, :] = np.eye(n - 1)
        P[0, 0] = 4.0 / 3.0
        P[0, 1] = -1.0 / 3.0
        return P

    @cached_property
    def reduced(self) -> np.ndarray:
        """``-A_h`` acting on interior unknowns, constraints eliminated."""
        K = self.entries[1:-1, :] @ self.prolongation
        K.flags.writeable = False
        return K

    def project(self, values: np.ndarray) -> np.ndarray:
        """Overwrite the two constrained slots so both constraints hold."""
        v = np.array(values, dtype=complex)
        v[-1] = 0.0
        v[0] = (4.0 * v[1] - v[2]) / 3.0
        return v


def assemble_operator(alpha: float, p: Coefficient, grid: Grid) -> OperatorMatrix:
    alpha = check_order(alpha)
    if p.grid != grid:
        raise AssemblyError(f"coefficient lives on n={p.grid.n}, grid has n={grid.n}")
    n, h = grid.n, grid.h
    flux = p.midpoints[:, None] * caputo_midpoint_matrix(n, alpha)  # (n, n+1)
    M = np.zeros((n + 1, n + 1))
    M[1:n, :] = -(flux[1:, :] - flux[:-1, :]) / h
    M[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2.0 * h)
    M[n, n] = 1.0
    M.flags.writeable = False
    return OperatorMatrix(M, grid, alpha, p)


def apply_operator(A: OperatorMatrix, u: GridFunction) -> GridFunction:
    """``A_h u`` on interior nodes; the two boundary slots hold constraint residuals."""
    if u.grid != A.grid:
        raise GridMismatchError(f"operator on n={A.n}, function on n={u.grid.n}")
    r = A.entries @ u.values
    out = -r
    out[0] = r[0]
    out[-1] = r[-1]
    return GridFunction(u.grid, out)


@dataclass(frozen=True)
class SectorReport:
    samples: np.ndarray
    max_abs_arg: float
    c_alpha: float
    b_alpha: float
    ratios: np.ndarray  # Re/|.| forms divided by the H^{(1+alpha)/2} norm squared

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.max_abs_arg)


def constrained_samples(
    A: OperatorMatrix, count: int, seed: int, *, real: bool = False, modes: int = 6
) -> np.ndarray:
    """Random smooth functions satisfying both discrete constraints, one per row.

    Half of each draw is a cosine series ``cos((k + 1/2) pi x)``, half a
    polynomial combination of ``1 - x**m``; both families satisfy
    ``u'(0) = 0`` and ``u(1) = 0`` before projection.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    x = A.grid.nodes
    k = np.arange(modes)
    trig = np.cos((k[:, None] + 0.5) * np.pi * x[None, :])  # (modes, n+1)
    m = np.arange(2, 2 + modes)
    poly = 1.0 - x[None, :] ** m[:, None]
    basis = np.vstack([trig, poly])
    scale = np.concatenate([1.0 / (k + 1.0), 1.0 / (m - 1.0)])
    out = np.empty((count, A.n + 1), dtype=complex)
    filled = 0
    retries = 0
    while filled < count:
        c = rng.standard_normal(2 * modes)
        if not real:
            c = c + 1j * rng.standard_normal(2 * modes)
        u = A.project((c * scale) @ basis)
        if np.sqrt(np.sum(trapezoid_weights(A.n) * np.abs(u) ** 2)) < 1e-12:
            retries += 1
            if retries > 100:
                raise FracFluxError("sampler keeps producing degenerate functions")
            continue
        out[filled] = u
        filled += 1
    return out


def forms(A: OperatorMatrix, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(-A_h u, u)`` and ``(u, u)`` for each row of ``U`` (trapezoid pairing)."""
    w = trapezoid_weights(A.n)
    KU = U @ A.entries.T
    KU[:, 0] = 0.0
    KU[:, -1] = 0.0
    num = (KU * np.conj(U)) @ w
    den = (np.abs(U) ** 2) @ w
    return num, den


def numerical_range_sample(
    A: OperatorMatrix, count: int = 1000, seed: int = 0, *, real: bool = False
) -> SectorReport:
    """Sample normalized numerical-range values of ``-A_h`` over smooth constrained functions."""
    U = constrained_samples(A, count, seed, real=real)
    num, den = forms(A, U)
    z = num / den
    hs = sobolev_norm_sq_batch(U, A.n, (1.0 + A.alpha) / 2.0)
    ratios = num / hs
    return SectorReport(
        samples=z,
        max_abs_arg=float(np.max(np.abs(np.angle(z)))),
        c_alpha=float(np.min(ratios.real)),
        b_alpha=float(np.max(np.abs(ratios))),
        ratios=ratios,
    )


def resolvent_bound_probe(
    A: OperatorMatrix, arg_lambda: float, magnitudes
) -> list[tuple[float, float]]:
    """``|lam| * ||(lam I - A_h)^{-1}||_2`` along the ray ``arg lam = arg_lambda``."""
    K = A.reduced
    eye = np.eye(K.shape[0])
    out = []
    for r in magnitudes:
        r = float(r)
        if not r > 0:
            raise SpectrumHitError(f"|lambda| must be positive, got {r}")
        lam = r * np.exp(1j * arg_lambda)
        smin = sla.svdvals(lam * eye + K, check_finite=False)[-1]
        if smin <= 1e-14 * np.linalg.norm(K, 1):
            raise SpectrumHitError(f"lambda = {lam} is (numerically) an eigenvalue")
        out.append((r, r / smin))
    return out


def asymmetry(A: OperatorMatrix) -> float:
    """``||K - K^T|| / ||K||`` in the Frobenius norm for the interior block."""
    B = A.entries[1:-1, 1:-1]
    return float(np.linalg.norm(B - B.T) / np.linalg.norm(B))


def write_matrix(A: OperatorMatrix, path) -> None:
    """Dense row-major dump of the stored matrix under a one-line ``n,alpha`` header."""
    with open(path, "w") as fh:
        fh.write(f"{A.n},{A.alpha!r}\n")
        for row in A.entries:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
