import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feec4d.tensorpoly import (
    TensorPoly4,
    from_legendre,
    gauss_legendre,
    integrate,
    legendre_family,
    tabulate_grid,
)

from conftest import C, X


def legendre_by_recurrence(n, x):
    """P_n(x) and P_n'(x) straight from the three-term recurrence."""
    p0, p1 = np.ones_like(x), x
    if n == 0:
        return p0, np.zeros_like(x)
    for m in range(1, n):
        p0, p1 = p1, ((2 * m + 1) * x * p1 - m * p0) / (m + 1)
    dp = n * (x * p1 - p0) / (x**2 - 1)
    return p1, dp


def newton_roots(n):
    x = np.cos(np.pi * (np.arange(n) + 0.75) / (n + 0.5))
    for _ in range(50):
        p, dp = legendre_by_recurrence(n, x)
        x = x - p / dp
    return np.sort(x)


def test_legendre_low_orders():
    fam = legendre_family(2)
    assert np.allclose(fam[0].coef, [1.0])
    assert np.allclose(fam[1].coef, [0.0, 1.0])
    assert np.allclose(fam[2].coef, [-0.5, 0.0, 1.5])


def test_legendre_orthogonality_with_three_point_rule():
    fam = legendre_family(2)
    rule = gauss_legendre(3)
    assert abs(rule.integrate(fam[1](rule.nodes) * fam[2](rule.nodes))) < 1e-15


def test_legendre_family_matches_recurrence_oracle():
    x = np.linspace(-0.9, 0.9, 7)
    for n, p in enumerate(legendre_family(6)):
        assert np.allclose(p(x), legendre_by_recurrence(n, x)[0], atol=1e-13)


def test_gauss_one_point():
    rule = gauss_legendre(1)
    assert rule.nodes[0] == 0.0 and rule.weights[0] == 2.0


def test_gauss_two_point_matches_newton_oracle():
    rule = gauss_legendre(2)
    assert np.allclose(rule.nodes, newton_roots(2), atol=1e-15)
    assert np.allclose(rule.nodes, [-0.5773502691896258, 0.5773502691896258], atol=1e-15)
    assert np.allclose(rule.weights, [1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_gauss_nodes_match_newton_oracle(n):
    assert np.allclose(gauss_legendre(n).nodes, newton_roots(n), atol=1e-14)


def test_gauss_three_point_x4():
    rule = gauss_legendre(3)
    assert abs(rule.integrate(rule.nodes**4) - 0.4) < 1e-14


def test_gauss_rejects_zero_points():
    with pytest.raises(ValueError):
        gauss_legendre(0)


def test_eval_examples():
    assert C(1.0)(np.array([0.3, -0.2, 0.9, -1.0])) == 1.0
    p = X(0) * X(3)
    assert p.degrees == (1, 0, 0, 1)
    assert p(np.array([-1.0, 0.0, 0.0, 1.0])) == -1.0
    assert (X(1) * X(1))(np.array([0.0, 0.5, 0.0, 0.0])) == 0.25


def test_product_examples():
    bubble = (1.0 - X(0) * X(0)) * C(1.0)
    assert bubble.degrees == (2, 0, 0, 0)
    for s in (-1.0, 1.0):
        assert bubble(np.array([s, 0.3, 0.1, -0.4])) == 0.0
    assert (X(0) * X(0)).allclose(TensorPoly4.from_monomial((2, 0, 0, 0)))
    assert ((1 + X(2)) * (1 - X(2))).allclose(1 - TensorPoly4.from_monomial((0, 0, 2, 0)))


def test_diff_examples():
    assert (X(0) * X(0)).diff(0).allclose(2 * X(0))
    assert (X(0) * X(3)).diff(3).allclose(X(0))
    assert C(3.0).diff(1).max_abs_coeff() == 0.0


def test_integrate_examples():
    assert abs(integrate(C(1.0)) - 16.0) < 1e-14
    assert abs(integrate(X(0))) < 1e-15
    p = TensorPoly4.from_monomial((2, 2, 0, 0))
    assert abs(integrate(p) - 16.0 / 9.0) < 1e-14


def test_restrict():
    p = X(0) + X(3)
    q = p.restrict(3, -1.0)
    assert q.allclose(X(0) - 1.0)


def test_tabulate_grid_matches_pointwise_eval(rng):
    p = TensorPoly4(rng.uniform(-1, 1, (3, 2, 4, 2)))
    grids = [rng.uniform(-1, 1, n) for n in (2, 3, 2, 4)]
    vals = tabulate_grid(p.coeffs, grids)
    mesh = np.meshgrid(*grids, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    assert np.allclose(vals.reshape(-1), p(pts), atol=1e-14)


def test_from_legendre_single_mode():
    L = np.zeros((3, 1, 1, 2))
    L[2, 0, 0, 1] = 1.0
    p = from_legendre(L)
    x = np.array([[0.3, 0.1, -0.2, 0.7]])
    assert np.allclose(p(x), 0.5 * (3 * 0.3**2 - 1) * 0.7)


def test_compose_affine_matches_direct_evaluation(rng):
    p = TensorPoly4(rng.uniform(-1, 1, (3, 3, 3, 3)))
    A = np.eye(4) + 0.3 * rng.uniform(-1, 1, (4, 4))
    b = rng.uniform(-1, 1, 4)
    q = p.compose_affine(A, b)
    x = rng.uniform(-1, 1, (30, 4))
    assert np.allclose(q(x), p(x @ A.T + b), atol=1e-12)


coeff_arrays = st.tuples(*[st.integers(1, 3)] * 4).flatmap(
    lambda shape: st.lists(
        st.floats(-2, 2, allow_nan=False), min_size=int(np.prod(shape)), max_size=int(np.prod(shape))
    ).map(lambda v: np.array(v).reshape(shape))
)


@settings(max_examples=40, deadline=None)
@given(coeff_arrays, coeff_arrays)
def test_product_rule(a, b):
    p, q = TensorPoly4(a), TensorPoly4(b)
    for axis in range(4):
        lhs = (p * q).diff(axis)
        rhs = p.diff(axis) * q + p * q.diff(axis)
        assert lhs.allclose(rhs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(coeff_arrays)
def test_integral_of_derivative_is_boundary_difference(a):
    p = TensorPoly4(a)
    for axis in range(4):
        lhs = integrate(p.diff(axis))
        rhs = integrate(p.restrict(axis, 1.0)) / 2 - integrate(p.restrict(axis, -1.0)) / 2
        assert abs(lhs - rhs) < 1e-11
