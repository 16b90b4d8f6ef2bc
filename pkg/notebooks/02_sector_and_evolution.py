# %% [markdown]
# # Sector probes and the implicit-Euler semigroup
#
# The numerical range of `-A_h` stays inside a sector of half-angle below
# `pi/2`, and the scaled resolvent norm is bounded by 1 on the positive axis.
# Along the ray `arg lam = 3 pi/4` the scaled norm is not flat: the discrete
# eigenvalues approach that ray as `|lam|` grows.

# %%
import math

import numpy as np

from fracflux import (
    Coefficient,
    EvolutionProblem,
    Grid,
    GridFunction,
    assemble_operator,
    evolve,
    numerical_range_sample,
    resolvent_bound_probe,
    smoothing_probe,
)

# %%
g = Grid(512)
for label, p in (("p=1", Coefficient.constant(g)), ("p=1+x/2", Coefficient.affine(g, 1.0, 0.5))):
    A = assemble_operator(0.5, p, g)
    rep = numerical_range_sample(A, 1000, seed=0)
    pos = max(v for _, v in resolvent_bound_probe(A, 0.0, np.geomspace(1e-2, 1e4, 13)))
    ray = [v for _, v in resolvent_bound_probe(A, 3 * math.pi / 4, np.geomspace(1, 1e4, 5))]
    print(f"{label:8s} max|arg| {rep.angle_deg:.1f} deg  positive axis {pos:.4f}  "
          f"3pi/4 ray {np.round(ray, 2)}")

# %% [markdown]
# ## Contraction and smoothing
# Indicator initial data, zero forcing.  The L2 norm never grows, and
# `sup t ||u_t|| / ||u0||` hardly moves when the grid and the step count
# are doubled together.

# %%
for n in (256, 512):
    g = Grid(n)
    u0 = GridFunction(g, (g.nodes <= 0.5).astype(float))
    traj = evolve(EvolutionProblem(u0, 0.5, 1.0, n))
    sup, _ = smoothing_probe(traj)
    print(f"n=steps={n}  max norm increment {np.diff(traj.norms()).max():.2e}  smoothing sup {sup:.4f}")
