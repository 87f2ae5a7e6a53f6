"""Antisymmetric matrix algebra, permutation actions, and rank tools."""

import math

import numpy as np
import pytest
from conftest import rational_rank

from invspan.errors import DimensionError
from invspan.lie_core import (
    Permutation,
    bracket,
    conjugate_by_permutation,
    flatten_antisym,
    hermitian_product,
    matrix_exponential,
    numerical_rank,
    permutation_matrix,
    plane_rotation,
    so_basis,
    so_dim,
    unflatten_antisym,
)


def _coord_rotation(n, i, j):
    a = np.zeros((n, n))
    a[i, j] = 1.0
    a[j, i] = -1.0
    return a


def test_so_basis_counts():
    assert len(so_basis(3)) == 3
    assert len(so_basis(4)) == 6
    basis5 = so_basis(5)
    assert len(basis5) == 10
    for b in basis5:
        assert np.array_equal(b, -b.T)


def test_so_basis_rejects_small_n():
    with pytest.raises(DimensionError):
        so_basis(1)


def test_so_dim_formula():
    assert [so_dim(n) for n in (2, 3, 4, 13)] == [1, 3, 6, 78]


def test_bracket_self_is_zero():
    a = _coord_rotation(4, 0, 2)
    assert np.array_equal(bracket(a, a), np.zeros((4, 4)))


def test_bracket_coordinate_rotations():
    # [E12-E21, E23-E32] = E13-E31 up to sign, by direct 3x3 multiplication
    a = _coord_rotation(3, 0, 1)
    b = _coord_rotation(3, 1, 2)
    expected = _coord_rotation(3, 0, 2)
    np.testing.assert_array_equal(bracket(a, b), expected)


def test_bracket_is_antisymmetric_and_bilinear():
    rng = np.random.default_rng(5)
    m1 = rng.standard_normal((5, 5))
    m2 = rng.standard_normal((5, 5))
    a = m1 - m1.T
    b = m2 - m2.T
    c = bracket(a, b)
    assert np.array_equal(c, -c.T)
    np.testing.assert_allclose(c, a @ b - b @ a, atol=1e-12)
    np.testing.assert_allclose(bracket(b, a), -c, atol=0)


def test_bracket_shape_mismatch():
    with pytest.raises(DimensionError):
        bracket(_coord_rotation(3, 0, 1), _coord_rotation(4, 0, 1))


def test_bracket_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        bracket(np.eye(3), _coord_rotation(3, 0, 1))


def test_permutation_matrix_identity():
    np.testing.assert_array_equal(
        permutation_matrix(Permutation.identity(4)), np.eye(4)
    )


def test_permutation_matrix_dets():
    swap = Permutation.transposition(4, 0, 1)
    assert np.linalg.det(permutation_matrix(swap)) == pytest.approx(-1.0)
    cycle = Permutation((1, 2, 0))
    assert np.linalg.det(permutation_matrix(cycle)) == pytest.approx(1.0)
    assert swap.sign == -1
    assert cycle.sign == 1


def test_permutation_matrix_moves_coordinates():
    perm = Permutation((2, 0, 1))
    x = np.array([10.0, 20.0, 30.0])
    moved = permutation_matrix(perm) @ x
    # entry sent to perm(i) comes from i
    np.testing.assert_array_equal(moved, np.array([20.0, 30.0, 10.0]))


def test_conjugate_identity_is_noop():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((5, 5))
    a = m - m.T
    np.testing.assert_array_equal(
        conjugate_by_permutation(Permutation.identity(5), a), a
    )


def test_conjugate_swaps_rows_and_columns():
    # swapping labels 0,1 sends the (0,2) entry to position (1,2)
    a = _coord_rotation(4, 0, 2)
    out = conjugate_by_permutation(Permutation.transposition(4, 0, 1), a)
    np.testing.assert_array_equal(out, _coord_rotation(4, 1, 2))


def test_conjugate_matches_matrix_sandwich():
    rng = np.random.default_rng(8)
    m = rng.standard_normal((6, 6))
    a = m - m.T
    perm = Permutation.random(6, rng)
    e = permutation_matrix(perm)
    np.testing.assert_allclose(
        conjugate_by_permutation(perm, a), e @ a @ e.T, atol=1e-14
    )


def test_conjugate_composition_action():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((5, 5))
    a = m - m.T
    sigma = Permutation.random(5, rng)
    tau = Permutation.random(5, rng)
    left = conjugate_by_permutation(tau, conjugate_by_permutation(sigma, a))
    right = conjugate_by_permutation(tau.compose(sigma), a)
    np.testing.assert_array_equal(left, right)


def test_conjugate_dimension_mismatch():
    with pytest.raises(DimensionError):
        conjugate_by_permutation(Permutation.identity(3), _coord_rotation(4, 0, 1))


def test_matrix_exponential_at_zero():
    a = _coord_rotation(3, 0, 1)
    np.testing.assert_array_equal(matrix_exponential(a, 0.0), np.eye(3))


def test_matrix_exponential_quarter_turn():
    # exp((pi/2)(E12-E21)) is the 90 degree rotation block
    # [[cos, sin], [-sin, cos]] in coordinates 1,2
    q = matrix_exponential(_coord_rotation(3, 0, 1), math.pi / 2.0)
    expected = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    np.testing.assert_allclose(q, expected, atol=1e-15)


def test_matrix_exponential_inverse():
    rng = np.random.default_rng(10)
    m = rng.standard_normal((5, 5))
    a = m - m.T
    q = matrix_exponential(a) @ matrix_exponential(a, -1.0)
    np.testing.assert_allclose(q, np.eye(5), atol=1e-10)


def test_matrix_exponential_rejects_non_finite():
    a = _coord_rotation(3, 0, 1)
    with pytest.raises(ValueError):
        matrix_exponential(a, math.inf)
    bad = a.copy()
    bad[0, 1] = math.nan
    bad[1, 0] = math.nan
    with pytest.raises(ValueError):
        matrix_exponential(bad)


def test_hermitian_product_positive_definite():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((4, 4))
    a = m - m.T
    assert hermitian_product(a, a) > 0.0


def test_hermitian_product_disjoint_support():
    a = _coord_rotation(3, 0, 1)
    b = _coord_rotation(3, 0, 2)
    assert hermitian_product(a, b) == 0.0


def test_hermitian_product_conjugation_invariant():
    rng = np.random.default_rng(12)
    m1 = rng.standard_normal((5, 5))
    m2 = rng.standard_normal((5, 5))
    m3 = rng.standard_normal((5, 5))
    a = m1 - m1.T
    b = m2 - m2.T
    q = matrix_exponential(m3 - m3.T)
    before = hermitian_product(a, b)
    after = hermitian_product(q @ a @ q.T, q @ b @ q.T)
    assert after == pytest.approx(before, abs=1e-12)


def test_plane_rotation_generator():
    u = np.array([1.0, -1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, -1.0, 0.0])
    a = plane_rotation(u, v)
    assert np.array_equal(a, -a.T)
    np.testing.assert_array_equal(a, np.outer(u, v) - np.outer(v, u))
    # the plane rotation annihilates vectors orthogonal to its plane
    np.testing.assert_array_equal(a @ np.ones(4), np.zeros(4))


def test_flatten_round_trip_preserves_product():
    rng = np.random.default_rng(13)
    m1 = rng.standard_normal((6, 6))
    m2 = rng.standard_normal((6, 6))
    a = m1 - m1.T
    b = m2 - m2.T
    fa = flatten_antisym(a)
    fb = flatten_antisym(b)
    np.testing.assert_allclose(unflatten_antisym(fa), a, atol=1e-15)
    np.testing.assert_allclose(unflatten_antisym(fa, 6), a, atol=1e-15)
    assert fa @ fb == pytest.approx(hermitian_product(a, b), abs=1e-12)


def test_unflatten_rejects_bad_length():
    with pytest.raises(DimensionError):
        unflatten_antisym(np.zeros(4))
    with pytest.raises(DimensionError):
        unflatten_antisym(np.zeros(6), n=5)


def test_numerical_rank_canonical_basis():
    basis = numerical_rank([flatten_antisym(b) for b in so_basis(3)])
    assert basis.rank == 3
    assert basis.n == 3


def test_numerical_rank_duplicates():
    v = flatten_antisym(_coord_rotation(4, 0, 1))
    assert numerical_rank([v, v]).rank == 1


def test_numerical_rank_random_so5_matches_exact_oracle():
    rng = np.random.default_rng(2024)
    flats = []
    for _ in range(10):
        m = rng.standard_normal((5, 5))
        flats.append(flatten_antisym(m - m.T))
    rows = np.array(flats)
    basis = numerical_rank(rows)
    assert basis.rank == 10
    # floats convert to fractions exactly, so this rank is exact
    assert rational_rank(rows) == 10


def test_numerical_rank_rejects_empty():
    with pytest.raises(ValueError):
        numerical_rank([])


def test_numerical_rank_deterministic_basis():
    rng = np.random.default_rng(15)
    rows = np.array(
        [flatten_antisym(m - m.T) for m in rng.standard_normal((4, 5, 5))]
    )
    b1 = numerical_rank(rows)
    b2 = numerical_rank(rows)
    np.testing.assert_array_equal(b1.vectors, b2.vectors)
    gram = b1.vectors @ b1.vectors.T
    np.testing.assert_allclose(gram, np.eye(b1.rank), atol=1e-12)


def test_subspace_residual():
    basis = numerical_rank([flatten_antisym(_coord_rotation(3, 0, 1))])
    inside = flatten_antisym(_coord_rotation(3, 0, 1)) * 2.5
    outside = flatten_antisym(_coord_rotation(3, 1, 2))
    assert basis.residual(inside) == pytest.approx(0.0, abs=1e-12)
    assert basis.residual(outside) == pytest.approx(np.linalg.norm(outside))


def test_permutation_inverse_and_call():
    perm = Permutation((2, 0, 3, 1))
    inv = perm.inverse()
    for i in range(4):
        assert inv(perm(i)) == i
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))
