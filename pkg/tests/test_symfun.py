import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dsflow.errors import ArgumentError, ConeViolationError, SingularQuotientError
from dsflow.symfun import (cone_membership, curvature_tuple, elementary_gradient, elementary_table,
                           is_strictly_convex, newton_chain, quotient_F, quotient_gradient, sym_table)

from conftest import cone_points

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def brute_E(kappa):
    n = len(kappa)
    return [sum(math.prod(c) for c in combinations(kappa, m)) / math.comb(n, m) for m in range(n + 1)]


def test_table_examples():
    E = elementary_table([1.0, 2.0, 3.0])
    assert np.allclose(E, [1, 2, 11 / 3, 6, 0])
    assert np.allclose(elementary_table(np.ones(5)), [1, 1, 1, 1, 1, 1, 0])


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(2, 6), elements=finite))
def test_table_matches_brute_force(kappa):
    E = elementary_table(kappa)
    ref = brute_E(list(kappa))
    scale = max(1.0, float(np.max(np.abs(kappa)))) ** len(kappa)
    assert np.allclose(E[:-1], ref, rtol=1e-12, atol=1e-12 * scale)
    assert E[-1] == 0.0


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(2, 6), elements=finite), st.floats(0.1, 10))
def test_homogeneity(kappa, c):
    n = len(kappa)
    E, Ec = elementary_table(kappa), elementary_table(c * kappa)
    scale = max(1.0, float(np.max(np.abs(kappa)))) ** np.arange(n + 2)
    assert np.allclose(Ec, c ** np.arange(n + 2) * E, rtol=1e-12, atol=1e-12 * (c ** np.arange(n + 2)) * scale)


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(2, 6), elements=finite))
def test_decomposition_identity(kappa):
    n = len(kappa)
    E, dE = elementary_table(kappa), elementary_gradient(kappa)
    scale = max(1.0, float(np.max(np.abs(kappa)))) ** n
    for k in range(1, n + 1):
        rhs = (n - k + 1) / k * dE[:, k] + kappa * dE[:, k - 1]
        assert np.allclose(rhs, E[k - 1], rtol=1e-12, atol=1e-12 * scale)


def test_cone_membership_examples():
    assert cone_membership([1, 1, 1], 3) == ("inside", 1.0)
    assert cone_membership([-1, 3, 3], 1)[0] == "inside"
    assert cone_membership([-1, 3, 3], 2)[0] == "inside"
    status, margin = cone_membership([-1, 3, 3], 3)
    assert status == "outside" and margin == pytest.approx(-9.0)
    assert cone_membership([0.0, 1.0], 2)[0] == "boundary"
    with pytest.raises(ArgumentError):
        cone_membership([1, 2], 3)


def test_strict_convexity():
    assert is_strictly_convex([0.1, 2.0, 3.0])
    assert not is_strictly_convex([0.0, 2.0, 3.0])
    assert not is_strictly_convex([-0.1, 2.0, 3.0])


def test_quotient_examples():
    E = elementary_table([1.0, 2.0, 3.0])
    assert quotient_F(E, 2) == pytest.approx(11 / 6)
    assert quotient_F(elementary_table(np.ones(4)), 3) == pytest.approx(1.0)
    with pytest.raises(SingularQuotientError):
        quotient_F(elementary_table([0.0, 0.0, 0.0]), 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_gradient_at_umbilic_sums_to_one(n):
    for k in range(1, n + 1):
        assert np.sum(quotient_gradient(np.ones(n), k)) == pytest.approx(1.0, abs=1e-13)


def test_gradient_sum_identity():
    kap = cone_points(4, 3, 200, seed=3)
    E = elementary_table(kap)
    for k in range(2, 5):
        pts = kap[np.all(E[:, 1 : k + 1] > 0, axis=1)]
        Ek = elementary_table(pts)
        lhs = np.sum(quotient_gradient(pts, k), axis=-1)
        rhs = k - (k - 1) * Ek[:, k] * Ek[:, k - 2] / Ek[:, k - 1] ** 2
        assert np.allclose(lhs, rhs, rtol=1e-11)


def test_gradient_rejects_cone_exit():
    with pytest.raises(ConeViolationError):
        quotient_gradient([-1.0, 3.0, 3.0], 3)


def test_newton_chain_strict_for_distinct_entries():
    kap = cone_points(5, 5, 300, seed=4)
    ratios = newton_chain(elementary_table(kap), 4)
    assert np.all(np.diff(ratios, axis=-1) < 0)
    umb = newton_chain(elementary_table(np.full(5, 0.7)), 4)
    assert np.allclose(np.diff(umb[:-1]), 0.0)


def test_sym_table_and_canonical_order():
    t = sym_table([3.0, 1.0, 2.0], 2)
    assert t.F == pytest.approx(11 / 6)
    assert np.all(t.gradF > 0)
    assert np.array_equal(curvature_tuple([3.0, 1.0, 2.0]), [1.0, 2.0, 3.0])
