from __future__ import annotations

from functools import reduce
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koopman_criteria.commlab import (
    T_SIGMA1,
    T_SIGMA2,
    FiniteRep,
    commutant_basis,
    commutant_of,
    cyclic_table,
    dixmier_check,
    generated_algebra,
    nullspace,
    permutation_matrix,
    regular_representations,
    s3_coset_example,
    schur_weyl_check,
    span_basis,
    symmetric_table,
    tensor_permutation,
    validate_group_table,
)
from koopman_criteria.errors import DimensionMismatch, InvalidGroupTable, SingularMatrix, SizeLimitExceeded

from oracles import exact_commutant_dim, exact_rank, pair_orbit_count


# -- linear algebra helpers -----------------------------------------------------------


def test_nullspace_and_span():
    ns = nullspace(np.array([[1.0, 1.0, 0.0]]))
    assert ns.shape == (2, 3)
    assert np.allclose(ns @ [1, 1, 0], 0)
    assert len(span_basis([np.eye(2), 2 * np.eye(2), np.ones((2, 2))])) == 2
    assert span_basis([np.zeros((2, 2))]) == []


def test_finite_rep_validation():
    with pytest.raises(DimensionMismatch):
        FiniteRep(3, [np.eye(2)])
    with pytest.raises(SingularMatrix):
        FiniteRep(2, [[[1, 1], [1, 1]]])
    with pytest.raises(DimensionMismatch):
        FiniteRep(2, [np.eye(2)], elements=[np.eye(2), 2 * np.eye(2)])
    FiniteRep(3, [T_SIGMA1], elements=[np.eye(3), T_SIGMA1])


# -- commutant examples ------------------------------------------------------------------


def test_identity_commutant_is_everything():
    assert commutant_basis(FiniteRep(3, [np.eye(3)])).dimension == 9


def test_s3_coset_example():
    rep = s3_coset_example()
    assert rep["T_sigma1"] == [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    assert rep["T_sigma2"] == [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert rep["sigma1_squared_is_identity"] and rep["sigma2_squared_is_identity"]
    assert rep["braid_relation"]
    assert rep["invariant_vector"] == [1, 1, 1] and rep["invariant_vector_fixed"]
    assert rep["commutant_dimension"] == 2
    assert rep["commutant_residual"] < 1e-12
    assert rep["permutation_centralizer_trivial"] and rep["permutation_centralizer_size"] == 1
    # independent routes: exact rank and orbit count on pairs of cosets
    assert exact_commutant_dim([T_SIGMA1, T_SIGMA2]) == 2
    assert pair_orbit_count([(0, 2, 1), (1, 0, 2)], 3) == 2


def test_s3_relations_exact():
    T1, T2 = T_SIGMA1.astype(int), T_SIGMA2.astype(int)
    assert np.array_equal(T1 @ T1, np.eye(3, dtype=int))
    assert np.array_equal(T2 @ T2, np.eye(3, dtype=int))
    assert np.array_equal(T1 @ T2 @ T1, T2 @ T1 @ T2)


def test_irreducible_two_dim_s3_rep_has_scalar_commutant():
    # standard representation on the sum-zero plane in the basis e0 - e2, e1 - e2
    swap = np.array([[0, 1], [1, 0]])
    cycle = np.array([[0, -1], [1, -1]])
    assert np.array_equal(np.linalg.matrix_power(cycle, 3), np.eye(2))
    comm = commutant_basis(FiniteRep(2, [swap, cycle]))
    assert comm.dimension == 1
    assert comm.projection_residual(np.eye(2)) < 1e-12
    assert exact_commutant_dim([swap, cycle]) == 1


# -- Dixmier -----------------------------------------------------------------------------


@pytest.mark.parametrize("table,order", [
    (cyclic_table(2), 2),
    (cyclic_table(4), 4),
    (symmetric_table(3), 6),
    (cyclic_table(3), 3),
])
def test_dixmier_dimensions(table, order):
    rep = dixmier_check(table)
    assert rep["holds"]
    assert rep["commutant_of_right_dimension"] == rep["left_algebra_dimension"] == order
    assert rep["left_in_commutant_residual"] < 1e-10
    # oracles: exact rank and Burnside count of orbits of G on G x G
    left, right = regular_representations(table)
    assert exact_commutant_dim([R.astype(int) for R in right]) == order
    assert exact_rank([L.astype(int).ravel() for L in left]) == order
    right_perms = [tuple(int(np.argmax(R[:, h])) for h in range(order)) for R in right]
    assert pair_orbit_count(right_perms, order) == order


def test_s3_sum_of_squared_degrees():
    # 1 + 1 + 2^2
    assert dixmier_check(symmetric_table(3))["left_algebra_dimension"] == 1 + 1 + 4


def test_regular_representations_are_homomorphisms():
    table = symmetric_table(3)
    left, right = regular_representations(table)
    for g in range(6):
        for h in range(6):
            gh = table[g][h]
            assert np.array_equal(left[g] @ left[h], left[gh])
            assert np.array_equal(right[g] @ right[h], right[gh])


@pytest.mark.parametrize("table", [
    [[0, 1], [1, 1]],  # 1 has no inverse
    [[1, 1], [0, 0]],  # no identity
    [[0, 1, 2], [1, 2, 0], [2, 1, 0]],  # not associative
    [[0, 5], [5, 0]],
    [[0, 1, 2]],
    [],
])
def test_invalid_group_tables(table):
    with pytest.raises(InvalidGroupTable):
        validate_group_table(table)


def test_group_size_limit():
    with pytest.raises(SizeLimitExceeded):
        dixmier_check(cyclic_table(25))
    validate_group_table(symmetric_table(4))


# -- Schur-Weyl ----------------------------------------------------------------------------


@pytest.mark.parametrize("m,n,expected", [(2, 2, 2), (2, 3, 5), (3, 2, 2), (2, 4, 14)])
def test_schur_weyl_dimensions(m, n, expected):
    rep = schur_weyl_check(m, n)
    assert rep["permutation_span_dimension"] == expected
    assert rep["commutant_of_gl_dimension"] == expected
    assert rep["mutual_commutants"] and rep["double_commutant_closure"]
    assert rep["gl_algebra_stable"]
    assert rep["generator_projection_residual"] < 1e-9


@pytest.mark.parametrize("m,n,expected", [(2, 2, 2), (2, 3, 5), (3, 2, 2)])
def test_schur_weyl_exact_oracle(m, n, expected):
    perms = [tensor_permutation(m, n, p).astype(int) for p in permutations(range(n))]
    assert exact_rank([P.ravel() for P in perms]) == expected
    rng = np.random.default_rng(5)
    gs = [rng.integers(-3, 4, (m, m)) for _ in range(3)]
    powers = [reduce(np.kron, [g] * n) for g in gs]
    assert exact_commutant_dim(powers) == expected


def test_tensor_permutation_acts_on_factors():
    u, v = np.array([1.0, 2.0]), np.array([3.0, -1.0])
    assert np.allclose(tensor_permutation(2, 2, (1, 0)) @ np.kron(u, v), np.kron(v, u))


def test_schur_weyl_size_limits():
    with pytest.raises(SizeLimitExceeded):
        schur_weyl_check(3, 5)
    with pytest.raises(SizeLimitExceeded):
        schur_weyl_check(0, 2)
    # 3^4 = 81 passes the tensor cap but not the commutant solver cap of 64
    with pytest.raises(SizeLimitExceeded):
        schur_weyl_check(3, 4)
    with pytest.raises(SizeLimitExceeded):
        commutant_of([np.eye(65)])


# -- properties ------------------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.lists(st.permutations(list(range(5))), min_size=1, max_size=3))
def test_permutation_rep_commutant_counts_pair_orbits(perms):
    mats = [permutation_matrix(p) for p in perms]
    comm = commutant_of(mats)
    assert comm.dimension == pair_orbit_count([tuple(p) for p in perms], 5)
    assert comm.residual(mats) < 1e-9
    # double commutant = generated unital algebra, and contains the generators
    cc = commutant_of(comm.basis)
    assert cc.dimension == len(generated_algebra(mats))
    assert max(cc.projection_residual(M) for M in mats) < 1e-9
