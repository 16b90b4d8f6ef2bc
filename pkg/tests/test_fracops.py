import numpy as np
import pytest
from scipy.special import gamma

from fracflux.fracops import (
    LEFT,
    RIGHT,
    caputo,
    caputo_matrix,
    difference_quotient,
    frac_integral,
    integral_matrix,
    rl_derivative,
)
from fracflux.lattice import Grid, GridFunction, InvalidOrderError, l2_norm


def test_integral_of_one(g1024):
    one = g1024.constant(1.0)
    left = frac_integral(one, 0.5, LEFT)
    right = frac_integral(one, 0.5, RIGHT)
    assert abs(left.values[-1] - 1 / gamma(1.5)) <= 1e-6
    assert abs(right.values[0] - 1 / gamma(1.5)) <= 1e-6
    np.testing.assert_allclose(right.values, left.values[::-1], atol=1e-14)
    assert left.values[0] == 0 and right.values[-1] == 0
    assert np.all(frac_integral(g1024.zeros(), 0.5).values == 0)


def test_integral_order_one_is_plain_integration():
    g = Grid(64)
    u = frac_integral(g.sample(lambda x: x), 1.0)
    np.testing.assert_allclose(u.values.real, g.nodes**2 / 2, atol=1e-15)


@pytest.mark.parametrize("a", [0.0, 1.0, 1.5, -0.1])
def test_order_checks(a):
    g = Grid(8)
    with pytest.raises(InvalidOrderError):
        caputo(g.constant(1.0), a)
    with pytest.raises(InvalidOrderError):
        rl_derivative(g.constant(1.0), a)


def test_caputo_examples(g1024):
    assert np.all(caputo(g1024.constant(4.0), 0.3).values == 0)
    lin = caputo(g1024.sample(lambda x: x), 0.5)
    assert abs(lin.values[-1] - 1 / gamma(1.5)) <= 1e-6
    sq = caputo(g1024.sample(lambda x: x**2), 0.5)
    assert abs(sq.values[-1] - gamma(3) / gamma(2.5)) <= 1e-4


def test_right_caputo_mirrors(rng):
    g = Grid(64)
    u = GridFunction(g, rng.standard_normal(65))
    mirrored = GridFunction(g, u.values[::-1])
    np.testing.assert_allclose(caputo(u, 0.4, RIGHT).values, caputo(mirrored, 0.4).values[::-1])


def test_rl_examples(g1024, g2048):
    one = rl_derivative(g1024.constant(1.0), 0.5)
    assert one.singular == (0,)
    assert np.isnan(one.values[0])
    assert one.values[256].real == pytest.approx(2 / np.sqrt(np.pi), rel=1e-13)
    u = g1024.sample(lambda x: np.sin(3 * x))
    np.testing.assert_allclose(rl_derivative(u, 0.5).values, caputo(u, 0.5).values, atol=1e-12)
    # x^{1/2}: only the grid-scale neighbourhood of 0 sees the derivative singularity
    root = rl_derivative(g2048.sample(np.sqrt), 0.5)
    x = g2048.nodes
    mask = (x >= 0.01) & (x < 1)
    assert np.max(np.abs(root.values[mask] - gamma(1.5))) <= 5e-3


def test_matrix_forms_agree(rng):
    n = 40
    g = Grid(n)
    u = GridFunction(g, rng.standard_normal(n + 1))
    np.testing.assert_allclose(integral_matrix(n, 0.35) @ u.values, frac_integral(u, 0.35).values, atol=1e-13)
    np.testing.assert_allclose(caputo_matrix(n, 0.35) @ u.values, caputo(u, 0.35).values, atol=1e-11)


def test_linearity(rng):
    g = Grid(128)
    u, v = (GridFunction(g, rng.standard_normal(129)) for _ in range(2))
    for op in (frac_integral, caputo):
        lhs = op(u * 2.0 + v, 0.6).values
        rhs = 2.0 * op(u, 0.6).values + op(v, 0.6).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(rhs))


def test_integral_semigroup_order():
    errs = []
    for n in (128, 256, 512):
        g = Grid(n)
        u = g.sample(lambda x: np.cos(2 * x))
        errs.append(l2_norm(frac_integral(frac_integral(u, 0.3), 0.4) - frac_integral(u, 0.7)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders >= 0.9)


def test_left_inverse():
    g = Grid(1024)
    u = g.sample(lambda x: 1 + x - x**2)
    back = rl_derivative(frac_integral(u, 0.4), 0.4)
    x = g.nodes
    mask = (x > 0.05) & (x < 1)
    assert np.max(np.abs(back.values[mask] - u.values[mask])) < 5e-3


def test_difference_quotient_exact_on_quadratics():
    g = Grid(16)
    d = difference_quotient(g.sample(lambda x: 3 * x**2 - x))
    np.testing.assert_allclose(d.values.real, 6 * g.nodes - 1, atol=1e-12)
