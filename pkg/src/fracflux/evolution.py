"""Backward-Euler time stepping for ``u_t = (p D^alpha u)' + f``.

Every step is one resolvent solve at ``lam = 1/tau``; the factorization of
``I - tau A_h`` is computed once per trajectory and reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.linalg as sla

from .lattice import FracFluxError, GridFunction, check_order, l2_norm
from .operator import Coefficient, OperatorMatrix, apply_operator, assemble_operator

__all__ = [
    "StepError",
    "UndefinedRatioError",
    "EvolutionProblem",
    "Trajectory",
    "step_backward_euler",
    "evolve",
    "smoothing_probe",
]

Forcing = Union[GridFunction, Callable[[float], GridFunction], None]


class StepError(FracFluxError, ArithmeticError):
    pass


class UndefinedRatioError(FracFluxError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EvolutionProblem:
    u0: GridFunction
    alpha: float
    T: float
    steps: int
    p: Coefficient | None = None
    f: Forcing = None  # None means zero forcing

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_order(self.alpha))
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"final time must be positive, got {self.T}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be an integer >= 1, got {self.steps}")
        if self.p is None:
            object.__setattr__(self, "p", Coefficient.constant(self.u0.grid))

    @property
    def tau(self) -> float:
        return self.T / self.steps

    def forcing(self, t: float) -> GridFunction:
        if self.f is None:
            return self.u0.grid.zeros()
        if isinstance(self.f, GridFunction):
            return self.f
        return self.f(t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple[GridFunction, ...]
    derivatives: tuple[GridFunction, ...]  # A_h u + f at each stored time

    def __len__(self) -> int:
        return len(self.times)

    def norms(self) -> np.ndarray:
        return np.array([l2_norm(s) for s in self.states])


def _euler_matrix(A: OperatorMatrix, tau: float) -> np.ndarray:
    # interior rows: u' + tau * (-A_h u') ; constraint rows unchanged
    M = tau * np.array(A.entries)
    M[0] = A.entries[0]
    M[-1] = A.entries[-1]
    idx = np.arange(1, A.n)
    M[idx, idx] += 1.0
    return M


def _rhs(u: GridFunction, tau: float, f_next: GridFunction) -> np.ndarray:
    b = u.values + tau * f_next.values
    b[0] = 0.0
    b[-1] = 0.0
    return b


def step_backward_euler(
    A: OperatorMatrix, u: GridFunction, tau: float, f_next: GridFunction | None = None
) -> GridFunction:
    """Solve ``(I - tau A_h) u' = u + tau f_next`` with both constraint rows."""
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    if f_next is None:
        f_next = u.grid.zeros()
    M = _euler_matrix(A, tau)
    b = _rhs(u, tau, f_next)
    try:
        out = np.linalg.solve(M, b)
    except np.linalg.LinAlgError as exc:
        raise StepError(f"implicit Euler system singular for tau={tau}") from exc
    return GridFunction(u.grid, A.project(out))


def _proxy(A: OperatorMatrix, u: GridFunction, f: GridFunction) -> GridFunction:
    v = np.array(apply_operator(A, u).values + f.values)
    v[0] = 0.0
    v[-1] = 0.0
    return GridFunction(u.grid, v)


def evolve(prob: EvolutionProblem, A: OperatorMatrix | None = None) -> Trajectory:
    grid = prob.u0.grid
    if A is None:
        A = assemble_operator(prob.alpha, prob.p, grid)
    tau = prob.tau
    lu = sla.lu_factor(_euler_matrix(A, tau))
    if not np.all(np.abs(lu[0].diagonal()) > 0):
        raise StepError(f"implicit Euler system singular at step 1 (tau={tau})")
    u = GridFunction(grid, A.project(prob.u0.values))
    times = [0.0]
    states = [u]
    derivs = [_proxy(A, u, prob.forcing(0.0))]
    for k in range(1, prob.steps + 1):
        t = k * tau
        f = prob.forcing(t)
        v = sla.lu_solve(lu, _rhs(u, tau, f))
        if not np.all(np.isfinite(v)):
            raise StepError(f"non-finite state at step {k} (t={t:g})")
        u = GridFunction(grid, A.project(v))
        times.append(t)
        states.append(u)
        derivs.append(_proxy(A, u, f))
    return Trajectory(np.array(times), tuple(states), tuple(derivs))


def smoothing_probe(traj: Trajectory) -> tuple[float, np.ndarray]:
    """``sup_{t > 0} t ||u_t(t)|| / ||u0||`` and the per-time table ``(t, value)``."""
    n0 = l2_norm(traj.states[0])
    if n0 == 0:
        raise UndefinedRatioError("initial datum has zero norm; the ratio is undefined")
    t = traj.times[1:]
    vals = np.array([l2_norm(d) for d in traj.derivatives[1:]]) * t / n0
    table = np.column_stack([t, vals])
    return float(vals.max()), table
