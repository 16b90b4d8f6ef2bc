# %% [markdown]
# # Three ways to solve the resolvent problem
#
# `lam u - (D^alpha u)' = g` with `u_x(0) = 0`, `u(1) = 0` and `p == 1`.
# The Mittag-Leffler closed form, the Neumann series and the dense matrix
# solve are built from disjoint code paths, so their agreement is a check
# on all three.

# %%
import cmath
import math

from scipy.special import gamma

from fracflux import Grid, ResolventProblem, l2_norm, resolvent_closed_form, resolvent_matrix, series_oracle


def rel(u, v):
    return l2_norm(u - v) / l2_norm(v)


# %% [markdown]
# ## Steady state against the analytic profile
# For `lam = 0` and `g == 1` the solution is `(1 - x^(1+a)) / Gamma(2+a)`.

# %%
for n in (256, 1024, 4096):
    g = Grid(n)
    exact = g.sample(lambda x: (1 - x**1.5) / gamma(2.5))
    prob = ResolventProblem(0.0, g.constant(1.0), 0.5)
    print(f"n={n:5d}  closed {rel(resolvent_closed_form(prob), exact):.1e}  "
          f"series {rel(series_oracle(prob), exact):.1e}  matrix {rel(resolvent_matrix(prob), exact):.1e}")

# %% [markdown]
# ## Pairwise gaps for complex lambda
# The series and closed form agree to second order; the matrix solve is
# first order, so its gaps halve under refinement.

# %%
lam = 5 * cmath.exp(1j * math.pi / 4)
for n in (512, 1024, 2048):
    g = Grid(n)
    prob = ResolventProblem(lam, g.constant(1.0), 0.5)
    c, s, m = resolvent_closed_form(prob), series_oracle(prob), resolvent_matrix(prob)
    print(f"n={n:5d}  closed-series {rel(c, s):.2e}  closed-matrix {rel(c, m):.2e}")
