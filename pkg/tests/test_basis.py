import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlasso.basis import (basis_for, chebyshev_product_basis, chebyshev_table, dimension,
                              eval_all, legendre_basis, legendre_table, ridge_basis,
                              spherical_harmonic_basis)
from hyperlasso.errors import InvalidArgument
from hyperlasso.quadrature import (Domain, cube_rule, discrete_gram, disc_rule, gauss_legendre_rule,
                                   sphere_product_rule)


@pytest.mark.parametrize("domain,L,d", [
    ("interval", 250, 251),
    ("disc", 16, 153),
    ("sphere", 15, 256),
    ("cube", 50, 23426),
    # 22100 = dim P_49 (the nonzero count of a filtered L=50 cube fit)
    ("cube", 49, 22100),
])
def test_dimension(domain, L, d):
    assert dimension(domain, L) == d
    if L < 60:
        assert basis_for(domain, L).size == d


def test_dimension_rejects_negative():
    with pytest.raises(InvalidArgument):
        dimension("disc", -1)


@pytest.mark.parametrize("domain", list(Domain))
def test_degrees_sorted_and_bounded(domain):
    b = basis_for(domain, 7)
    assert np.all(np.diff(b.element_degree) >= 0)
    assert b.element_degree.max() == 7


def test_element_degrees_match_indices():
    assert np.array_equal(ridge_basis(5).element_degree, ridge_basis(5).indices[:, 0])
    assert np.array_equal(spherical_harmonic_basis(5).element_degree, spherical_harmonic_basis(5).indices[:, 0])
    cb = chebyshev_product_basis(5)
    assert np.array_equal(cb.element_degree, cb.indices.sum(axis=1))


def test_cube_ordering_graded_lexicographic():
    idx = [tuple(r) for r in chebyshev_product_basis(4).indices]
    key = [(sum(t), t[0], t[1]) for t in idx]
    assert key == sorted(key)


# -- interval ----------------------------------------------------------------------


def test_legendre_low_order_values():
    b = legendre_basis(2)
    np.testing.assert_allclose(eval_all(b, 0.0), [1 / math.sqrt(2), 0.0, -math.sqrt(5 / 8)], atol=1e-15)
    assert b.evaluate([0.5])[0, 1] == pytest.approx(math.sqrt(1.5) * 0.5)


def test_legendre_p2_unit_norm():
    r = gauss_legendre_rule(4)
    v = legendre_basis(2).evaluate(r.nodes)[:, 2]
    assert np.dot(r.weights, v * v) == pytest.approx(1.0, abs=1e-14)


def test_legendre_endpoint_values():
    t = legendre_table(250, np.array([-1.0, 1.0]))
    expect = np.sqrt((2 * np.arange(251) + 1) / 2)
    np.testing.assert_allclose(np.abs(t), np.vstack([expect, expect]), rtol=1e-9)


def test_legendre_matches_numpy():
    x = np.linspace(-1, 1, 17)
    ours = legendre_table(12, x)
    for l in range(13):
        ref = np.polynomial.legendre.legval(x, np.eye(13)[l]) * math.sqrt((2 * l + 1) / 2)
        np.testing.assert_allclose(ours[:, l], ref, atol=1e-13)


# -- disc --------------------------------------------------------------------------


def test_ridge_constant_and_origin():
    b = ridge_basis(3)
    row = eval_all(b, [0.0, 0.0])
    assert row[0] == 1.0
    assert row[1] == 0.0  # U_1(0)


def test_ridge_gram_identity():
    G = discrete_gram(disc_rule(16), ridge_basis(16))
    assert np.abs(G - np.eye(153)).max() <= 1e-10


# -- sphere ------------------------------------------------------------------------


def test_harmonic_constant():
    b = spherical_harmonic_basis(3)
    assert eval_all(b, [0.0, 0.0, 1.0])[0] == pytest.approx(1 / math.sqrt(4 * math.pi))


def test_harmonic_degree_one_is_linear():
    # Y_{1,-1}, Y_{1,0}, Y_{1,1} = sqrt(3/(4 pi)) (y, z, x)
    p = np.array([[0.6, 0.0, 0.8], [0.0, -1.0, 0.0]])
    v = spherical_harmonic_basis(1).evaluate(p)[:, 1:]
    np.testing.assert_allclose(v, math.sqrt(3 / (4 * math.pi)) * p[:, [1, 2, 0]], atol=1e-15)


def test_harmonic_gram_identity():
    G = discrete_gram(sphere_product_rule(15), spherical_harmonic_basis(15))
    assert np.abs(G - np.eye(256)).max() <= 1e-8


def test_harmonic_high_degree_finite():
    pts = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8]])
    assert np.all(np.isfinite(spherical_harmonic_basis(100).evaluate(pts)))


# -- cube --------------------------------------------------------------------------


def test_chebyshev_values():
    assert chebyshev_table(2, np.array([1.0]))[0, 2] == pytest.approx(math.sqrt(2))
    b = chebyshev_product_basis(2)
    row = eval_all(b, [1.0, 1.0, 1.0])
    assert row[0] == 1.0
    k = [tuple(r) for r in b.indices].index((1, 0, 0))
    assert row[k] == pytest.approx(math.sqrt(2))


def test_cube_basis_gram_small():
    G = discrete_gram(cube_rule(6), chebyshev_product_basis(6))
    assert np.abs(G - np.eye(G.shape[0])).max() <= 1e-12


# -- continuous orthonormality, checked with a rule of higher exactness ------------


@pytest.mark.parametrize("domain,L,rule", [
    ("interval", 40, gauss_legendre_rule(60)),
    ("disc", 12, disc_rule(20)),
    ("sphere", 12, sphere_product_rule(20)),
    ("cube", 8, cube_rule(14)),
])
def test_orthonormal_under_finer_rule(domain, L, rule):
    b = basis_for(domain, L)
    G = discrete_gram(rule, b)[:200, :200]
    assert np.abs(G - np.eye(G.shape[0])).max() <= 1e-8


# -- properties ---------------------------------------------------------------------


@given(st.floats(-1, 1), st.floats(0, 2 * math.pi))
def test_eval_all_matches_evaluate_disc(r, t):
    p = [abs(r) * math.cos(t), abs(r) * math.sin(t)]
    b = ridge_basis(6)
    np.testing.assert_array_equal(eval_all(b, p), b.evaluate([p])[0])


def test_out_of_domain_rejected():
    with pytest.raises(InvalidArgument):
        eval_all(spherical_harmonic_basis(2), [0.0, 0.0, 2.0])
    with pytest.raises(InvalidArgument):
        eval_all(legendre_basis(2), [0.1, 0.2])
