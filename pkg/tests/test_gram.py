from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sector_doubler.gram import (
    GramError, canonical_columns, factor_gram, min_norm_dims, split_fractions, square_partitions,
)


def brute_square_partitions(n):
    out = set()

    def rec(rest, cap, acc):
        if rest == 0:
            out.add(tuple(acc))
            return
        for v in range(min(cap, int(rest ** 0.5) + 1), 0, -1):
            if v * v <= rest:
                rec(rest - v * v, v, acc + [v])

    rec(n, n, [])
    return out


@pytest.mark.parametrize("n", range(0, 13))
def test_square_partitions_against_brute_force(n):
    got = [tuple(p) for p in square_partitions(n)]
    assert len(got) == len(set(got))
    assert set(got) == brute_square_partitions(n)


def test_identity_factors_trivially():
    sols = factor_gram(np.eye(4, dtype=int))
    assert len(sols) == 1
    assert np.array_equal(canonical_columns(sols[0]), np.eye(4, dtype=int))


def test_diagonal_two_has_two_factorizations():
    # [2] = 1^2 + 1^2 only (2 is not a square)
    sols = factor_gram(np.array([[2]]), max_solutions=5)
    assert [s.tolist() for s in sols] == [[[1, 1]]]
    # [4] = 2^2 or 1+1+1+1
    sols = factor_gram(np.array([[4]]), max_solutions=5)
    assert sorted(s.shape[1] for s in sols) == [1, 4]


def test_e6_style_block():
    """Two generators sharing one piece and each with a private piece."""
    B = np.array([[1, 1, 0], [1, 0, 1]])
    G = B @ B.T
    sols = factor_gram(G, max_solutions=5)
    assert any(np.array_equal(canonical_columns(s), canonical_columns(B)) for s in sols)
    for s in sols:
        assert np.array_equal(s @ s.T, G)


def test_rejects_bad_input():
    with pytest.raises(GramError):
        factor_gram(np.array([[1, 0], [1, 1]]))
    with pytest.raises(GramError):
        factor_gram(np.array([[1, -1], [-1, 1]]))
    with pytest.raises(GramError):
        factor_gram(np.ones((2, 3), dtype=int))


def test_infeasible_returns_empty():
    # G = [[1,1],[1,1]] with an extra row orthogonal to the first and not the second is impossible
    G = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    assert factor_gram(G) == []


def test_node_budget():
    G = 3 * np.eye(8, dtype=int) + np.ones((8, 8), dtype=int)
    with pytest.raises(GramError):
        factor_gram(G, max_solutions=10 ** 6, node_limit=50)


def test_min_norm_equal_split():
    B = np.array([[1, 1, 1]])
    x = min_norm_dims(B, [6.0])
    assert np.allclose(x, [2, 2, 2])
    assert split_fractions(B, [6.0]) == [(0, Fraction(1, 3))] * 3


@given(arrays(np.int64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=st.integers(0, 2)))
def test_factorization_reproduces_gram(B):
    B = B[:, B.any(axis=0)]
    B = B[B.any(axis=1)]
    if B.size == 0:
        return
    G = B @ B.T
    sols = factor_gram(G, max_solutions=2, node_limit=200_000)
    assert sols, "a factorization exists by construction"
    for s in sols:
        assert np.array_equal(s @ s.T, G)
        assert np.all(s >= 0)
        assert s.any(axis=0).all()


@given(st.integers(1, 4), st.integers(1, 3))
def test_permutation_matrices_factor_to_themselves(n, reps):
    P = np.eye(n, dtype=int)
    sols = factor_gram(P * reps * reps)
    assert any(np.array_equal(canonical_columns(s), P * reps) for s in sols)


def test_canonical_columns_is_permutation_invariant():
    B = np.array([[1, 0, 2], [0, 1, 1], [1, 1, 0]])
    ref = canonical_columns(B)
    for perm in product(range(3), repeat=3):
        if len(set(perm)) == 3:
            assert np.array_equal(canonical_columns(B[:, list(perm)]), ref)
