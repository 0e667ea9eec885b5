import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hyperlasso.basis import basis_for, chebyshev_product_basis, legendre_basis
from hyperlasso.errors import InvalidArgument
from hyperlasso.estimators import (Expansion, cube_analysis, cube_synthesis, evaluate,
                                   filtered_coefficients, hyper_coefficients,
                                   laplace_beltrami_penalty, lambda_max, lasso_coefficients,
                                   soft_threshold, tikhonov_coefficients, trig_filter)
from hyperlasso.quadrature import (Domain, cube_rule, disc_rule, gauss_legendre_rule,
                                   sphere_product_rule)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("a,k,out", [(2.0, 0.5, 1.5), (-0.3, 0.5, 0.0), (-2.5, 1.0, -1.5)])
def test_soft_threshold_examples(a, k, out):
    assert soft_threshold(a, k) == out


def test_soft_threshold_negative_threshold():
    with pytest.raises(InvalidArgument):
        soft_threshold(1.0, -0.1)


@given(finite, st.floats(0, 1e6))
def test_soft_threshold_dominance(a, k):
    s = soft_threshold(a, k)
    assert abs(s) <= abs(a)
    assert np.sign(s) in (0.0, np.sign(a))
    if abs(a) <= k:
        assert s == 0.0


# -- hyperinterpolation -------------------------------------------------------------


def test_interval_l1_oracle():
    alpha = hyper_coefficients(gauss_legendre_rule(2), legendre_basis(1), gauss_legendre_rule(2).nodes[:, 0])
    np.testing.assert_allclose(alpha, [0.0, math.sqrt(2 / 3)], atol=1e-15)


def test_zero_samples():
    r = disc_rule(4)
    assert np.all(hyper_coefficients(r, basis_for("disc", 4), np.zeros(r.size)) == 0)


def test_basis_element_gives_unit_vector():
    r, b = gauss_legendre_rule(6), legendre_basis(5)
    alpha = hyper_coefficients(r, b, b.evaluate(r.nodes)[:, 3])
    np.testing.assert_allclose(alpha, np.eye(6)[3], atol=1e-14)


def test_hyper_input_checks():
    r, b = gauss_legendre_rule(4), legendre_basis(3)
    with pytest.raises(InvalidArgument):
        hyper_coefficients(r, b, np.zeros(3))
    with pytest.raises(InvalidArgument):
        hyper_coefficients(gauss_legendre_rule(3), b, np.zeros(3))
    with pytest.raises(InvalidArgument):
        hyper_coefficients(r, b, np.zeros(4), method="transform")


@pytest.mark.parametrize("L", [1, 2, 5, 10])
def test_cube_transform_matches_direct_sum(L, rng):
    r, b = cube_rule(L), chebyshev_product_basis(L)
    f = rng.standard_normal(r.size)
    fast = hyper_coefficients(r, b, f, method="transform")
    direct = hyper_coefficients(r, b, f, method="direct")
    assert np.abs(fast - direct).max() <= 1e-10


def test_cube_synthesis_matches_evaluation(rng):
    r, b = cube_rule(9), chebyshev_product_basis(9)
    c = rng.standard_normal(b.size)
    np.testing.assert_allclose(cube_synthesis(b, c, r), b.evaluate(r.nodes) @ c, atol=1e-12)
    np.testing.assert_allclose(cube_analysis(b, r, r.weights * cube_synthesis(b, c, r)), c, atol=1e-12)


# -- transforms ----------------------------------------------------------------------


def test_lasso_l1_oracle():
    beta = lasso_coefficients([0.0, 0.81650], 0.5, [1.0, 1.0])
    np.testing.assert_allclose(beta, [0.0, 0.31650], atol=1e-15)


def test_lasso_large_lambda_zeroes_everything():
    a = np.array([0.5, -2.0, 0.1])
    assert not np.any(lasso_coefficients(a, lambda_max(a)))
    assert np.count_nonzero(lasso_coefficients(a, 0.99 * lambda_max(a))) == 1


def test_lasso_rejects_nonpositive_lambda():
    for lam in (0.0, -1.0):
        with pytest.raises(InvalidArgument):
            lasso_coefficients([1.0], lam)
    with pytest.raises(InvalidArgument):
        lasso_coefficients([1.0, 2.0], 0.1, [1.0, 0.0])


@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-10, 10)),
       st.floats(1e-6, 5), st.floats(1e-6, 5))
def test_lasso_sparsity_monotone_in_lambda(alpha, l1, l2):
    lo, hi = sorted((l1, l2))
    assert np.count_nonzero(lasso_coefficients(alpha, hi)) <= np.count_nonzero(lasso_coefficients(alpha, lo))


@given(arrays(np.float64, st.integers(1, 6), elements=st.floats(-5, 5)),
       arrays(np.float64, 6, elements=st.floats(0.1, 3)),
       st.floats(1e-3, 2))
def test_lasso_kkt(alpha, mu, lam):
    mu = mu[: alpha.size]
    beta = lasso_coefficients(alpha, lam, mu)
    k = lam * mu
    nz = beta != 0
    r = beta[nz] - alpha[nz] + k[nz] * np.sign(beta[nz])
    assert np.all(np.abs(r) <= 4 * np.spacing(np.maximum(np.abs(alpha[nz]), k[nz])))
    assert np.all(np.abs(alpha[~nz]) <= k[~nz])


def test_trig_filter_values():
    np.testing.assert_allclose(trig_filter([0.0, 0.25, 0.5, 0.75, 1.0, 1.5]),
                               [1, 1, 1, 0.5, 0, 0], atol=1e-15)


def test_filtered_coefficients():
    b = legendre_basis(8)
    beta = filtered_coefficients(np.ones(9), b)
    assert beta[2] == 1.0  # degree L/4
    assert beta[6] == pytest.approx(0.5)  # degree 3L/4
    assert beta[8] == 0.0  # degree L
    with pytest.raises(InvalidArgument):
        filtered_coefficients([1.0], legendre_basis(0))


def test_tikhonov_closed_form(rng):
    a = rng.standard_normal(5)
    assert np.array_equal(tikhonov_coefficients(a, 0.0), a)
    assert tikhonov_coefficients([0.8], 1.0)[0] == pytest.approx(0.4)
    h = rng.uniform(0.5, 3, 5)
    dense = np.linalg.solve(np.eye(5) + 0.7 * np.diag(h), a)
    np.testing.assert_allclose(tikhonov_coefficients(a, 0.7, h), dense, atol=1e-12)


def test_laplace_beltrami_penalty():
    h = laplace_beltrami_penalty(basis_for("sphere", 2))
    np.testing.assert_allclose(h, [1, 9, 9, 9, 49, 49, 49, 49, 49])
    with pytest.raises(InvalidArgument):
        laplace_beltrami_penalty(legendre_basis(2))


def test_lambda_max():
    assert lambda_max([0.5, -2.0, 0.1]) == 2.0
    assert lambda_max(np.zeros(3)) == 0.0
    with pytest.raises(InvalidArgument):
        lambda_max([])


# -- evaluation ----------------------------------------------------------------------


def test_evaluate_zero_and_oracle():
    b = legendre_basis(1)
    assert np.all(Expansion(b, np.zeros(2))(np.linspace(-1, 1, 5)) == 0)
    e = Expansion(b, [0.0, 0.31650])
    assert e([1.0])[0] == pytest.approx(0.31650 * math.sqrt(1.5))
    with pytest.raises(InvalidArgument):
        e([1.5])


def test_expansion_shape_check():
    with pytest.raises(InvalidArgument):
        Expansion(legendre_basis(3), np.zeros(3))


def _rule(domain, L):
    return {
        Domain.INTERVAL: lambda: gauss_legendre_rule(L + 1),
        Domain.DISC: lambda: disc_rule(L),
        Domain.SPHERE: lambda: sphere_product_rule(L),
        Domain.CUBE: lambda: cube_rule(L),
    }[domain]()


def _random_points(domain, n, rng):
    if domain is Domain.INTERVAL:
        return rng.uniform(-1, 1, (n, 1))
    if domain is Domain.DISC:
        r, t = np.sqrt(rng.uniform(0, 1, n)), rng.uniform(0, 2 * np.pi, n)
        return np.column_stack([r * np.cos(t), r * np.sin(t)])
    if domain is Domain.SPHERE:
        p = rng.standard_normal((n, 3))
        return p / np.linalg.norm(p, axis=1, keepdims=True)
    return rng.uniform(-1, 1, (n, 3))


@pytest.mark.parametrize("domain", list(Domain))
def test_polynomial_reproduction_pointwise(domain, rng):
    L = 6
    b, r = basis_for(domain, L), _rule(domain, L)
    c = rng.standard_normal(b.size)
    alpha = hyper_coefficients(r, b, Expansion(b, c).on_rule(r))
    pts = _random_points(domain, 100, rng)
    assert np.abs(evaluate(Expansion(b, alpha), pts) - evaluate(Expansion(b, c), pts)).max() <= 1e-9


@pytest.mark.parametrize("domain", list(Domain))
def test_parseval(domain, rng):
    L = 5
    b = basis_for(domain, L)
    fine = _rule(domain, 2 * L + 4)
    c = rng.standard_normal(b.size)
    v = Expansion(b, c).on_rule(fine)
    assert math.sqrt(np.dot(fine.weights, v * v)) == pytest.approx(Expansion(b, c).norm(), abs=1e-7)
