"""Finite-dimensional commutant computations.

Commutants are nullspaces of the stacked Sylvester operators
B -> B T - T B over the generators, with rank decided by singular values.
Used for the S_3 coset counterexample, the commutation theorem for the
regular representations of a finite group and Schur-Weyl duality on small
tensor powers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import permutations

import numpy as np

from .errors import DimensionMismatch, InvalidGroupTable, SingularMatrix, SizeLimitExceeded

RANK_RTOL = 1e-8
MAX_DIM = 64
MAX_TENSOR_DIM = 81
MAX_GROUP = 24


@dataclass
class FiniteRep:
    d: int
    generators: list
    elements: list | None = None

    def __post_init__(self):
        gens = [np.asarray(g, dtype=float) for g in self.generators]
        for g in gens:
            if g.shape != (self.d, self.d):
                raise DimensionMismatch(f"generator of shape {g.shape}, expected {(self.d, self.d)}")
            if abs(np.linalg.det(g)) < 1e-12:
                raise SingularMatrix("generators must be invertible")
        self.generators = gens
        if self.elements is not None:
            els = [np.asarray(g, dtype=float) for g in self.elements]
            for a in els:
                for b in els:
                    p = a @ b
                    if not any(np.allclose(p, c, rtol=0, atol=1e-10) for c in els):
                        raise DimensionMismatch("element list is not closed under products")
            self.elements = els


@dataclass
class CommutantBasis:
    basis: list  # orthonormal in the Frobenius inner product
    dimension: int = field(init=False)

    def __post_init__(self):
        self.dimension = len(self.basis)

    def residual(self, mats) -> float:
        """Largest |B T - T B| over basis elements and the given matrices."""
        worst = 0.0
        for B in self.basis:
            for T in mats:
                worst = max(worst, float(np.abs(B @ T - T @ B).max()))
        return worst

    def projection_residual(self, M) -> float:
        """Frobenius distance from M to the span, relative to |M|."""
        M = np.asarray(M, dtype=float)
        if not self.basis:
            return 1.0 if np.any(M) else 0.0
        V = np.stack([B.ravel() for B in self.basis])
        v = M.ravel()
        r = v - V.T @ (V @ v)
        n = np.linalg.norm(v)
        return float(np.linalg.norm(r) / n) if n else 0.0


def nullspace(M: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal rows spanning ker M; rank from singular values > rtol * max."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    if M.shape[0] > M.shape[1]:
        M = np.linalg.qr(M, mode="r")  # same singular values and right vectors
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0:
        return vh
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:]


def span_basis(mats, rtol: float = RANK_RTOL) -> list:
    """Orthonormal basis of span(mats)."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    if not mats:
        return []
    shape = mats[0].shape
    A = np.stack([m.ravel() for m in mats])
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        return []
    rank = int(np.sum(s > rtol * s[0]))
    return [vh[i].reshape(shape) for i in range(rank)]


def span_dim(mats) -> int:
    return len(span_basis(mats))


def _sylvester(T: np.ndarray) -> np.ndarray:
    # row-major vec: vec(B T) = (I kron T^T) vec B, vec(T B) = (T kron I) vec B
    d = T.shape[0]
    eye = np.eye(d)
    return np.kron(eye, T.T) - np.kron(T, eye)


def commutant_of(mats) -> CommutantBasis:
    mats = [np.asarray(m, dtype=float) for m in mats]
    if not mats:
        raise DimensionMismatch("need at least one matrix")
    d = mats[0].shape[0]
    if d > MAX_DIM:
        raise SizeLimitExceeded(f"dimension {d} exceeds {MAX_DIM}")
    K = np.vstack([_sylvester(T) for T in mats])
    ns = nullspace(K)
    return CommutantBasis([v.reshape(d, d) for v in ns])


def commutant_basis(rep: FiniteRep) -> CommutantBasis:
    """Basis of {B : B T_g = T_g B for every generator}."""
    if rep.d > MAX_DIM:
        raise SizeLimitExceeded(f"dimension {rep.d} exceeds {MAX_DIM}")
    return commutant_of(rep.generators)


def generated_algebra(mats, max_rounds: int = 64) -> list:
    """Orthonormal basis of the unital algebra generated by mats."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    d = mats[0].shape[0]
    basis = span_basis([np.eye(d)] + mats)
    for _ in range(max_rounds):
        grown = span_basis(basis + [B @ g for B in basis for g in mats])
        if len(grown) == len(basis):
            return grown
        basis = grown
    return basis


# -- the S_3 coset example ---------------------------------------------------------

T_SIGMA1 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
T_SIGMA2 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)


def permutation_matrix(p) -> np.ndarray:
    """P e_i = e_{p[i]}."""
    n = len(p)
    P = np.zeros((n, n))
    P[list(p), range(n)] = 1.0
    return P


def s3_coset_example() -> dict:
    """S_3 acting on the three cosets of S_2: relations, invariant vector, commutant."""
    T1, T2 = T_SIGMA1, T_SIGMA2
    eye = np.eye(3)
    v = np.ones(3)
    rep = FiniteRep(3, [T1, T2])
    comm = commutant_basis(rep)
    perms = [permutation_matrix(p) for p in permutations(range(3))]
    centralizer = [P for P in perms if np.array_equal(P @ T1, T1 @ P) and np.array_equal(P @ T2, T2 @ P)]
    return {
        "T_sigma1": T1.astype(int).tolist(),
        "T_sigma2": T2.astype(int).tolist(),
        "sigma1_squared_is_identity": bool(np.array_equal(T1 @ T1, eye)),
        "sigma2_squared_is_identity": bool(np.array_equal(T2 @ T2, eye)),
        "braid_relation": bool(np.array_equal(T1 @ T2 @ T1, T2 @ T1 @ T2)),
        "invariant_vector": v.astype(int).tolist(),
        "invariant_vector_fixed": bool(np.array_equal(T1 @ v, v) and np.array_equal(T2 @ v, v)),
        "commutant_dimension": comm.dimension,
        "commutant_residual": comm.residual([T1, T2]),
        "permutation_centralizer_size": len(centralizer),
        "permutation_centralizer_trivial": len(centralizer) == 1 and np.array_equal(centralizer[0], eye),
    }


# -- regular representations --------------------------------------------------------


def validate_group_table(table) -> tuple[np.ndarray, int, np.ndarray]:
    """(table, identity, inverses); table[g][h] is the index of g h."""
    try:
        T = np.asarray(table, dtype=int)
    except (TypeError, ValueError) as exc:
        raise InvalidGroupTable("table must be a square integer array") from exc
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise InvalidGroupTable("table must be a nonempty square array")
    n = T.shape[0]
    if n > MAX_GROUP:
        raise SizeLimitExceeded(f"group order {n} exceeds {MAX_GROUP}")
    if T.min() < 0 or T.max() >= n:
        raise InvalidGroupTable("entries must be element indices 0..n-1")
    ids = [e for e in range(n) if np.array_equal(T[e], np.arange(n)) and np.array_equal(T[:, e], np.arange(n))]
    if not ids:
        raise InvalidGroupTable("no identity element")
    e = ids[0]
    inv = np.full(n, -1)
    for g in range(n):
        hs = np.flatnonzero((T[g] == e) & (T[:, g] == e))
        if hs.size == 0:
            raise InvalidGroupTable(f"element {g} has no inverse")
        inv[g] = hs[0]
    # associativity: (g h) k == g (h k)
    lhs = T[T[:, :, None], np.arange(n)[None, None, :]]
    rhs = T[np.arange(n)[:, None, None], T[None, :, :]]
    if not np.array_equal(lhs, rhs):
        raise InvalidGroupTable("multiplication is not associative")
    return T, e, inv


def regular_representations(table):
    """Left L_g e_h = e_{g h} and right R_g e_h = e_{h g^-1} permutation matrices."""
    T, _, inv = validate_group_table(table)
    n = T.shape[0]
    left = [permutation_matrix(T[g]) for g in range(n)]
    right = [permutation_matrix(T[:, inv[g]]) for g in range(n)]
    return left, right


def cyclic_table(n: int) -> list:
    return [[(g + h) % n for h in range(n)] for g in range(n)]


def symmetric_table(k: int = 3) -> list:
    """Multiplication table of S_k with (p q)(i) = p(q(i))."""
    els = list(permutations(range(k)))
    index = {p: i for i, p in enumerate(els)}
    return [[index[tuple(p[q[i]] for i in range(k))] for q in els] for p in els]


def dixmier_check(group_table) -> dict:
    """The commutant of the right regular algebra is the left regular algebra."""
    left, right = regular_representations(group_table)
    n = len(left)
    comm_r = commutant_of(right)
    left_alg = generated_algebra(left)
    comm_l = commutant_of(left)
    right_alg = generated_algebra(right)
    left_in = max(comm_r.projection_residual(L) for L in left)
    commute = max(float(np.abs(L @ R - R @ L).max()) for L in left for R in right)
    cc = commutant_of(comm_r.basis)
    return {
        "order": n,
        "commutant_of_right_dimension": comm_r.dimension,
        "left_algebra_dimension": len(left_alg),
        "commutant_of_left_dimension": comm_l.dimension,
        "right_algebra_dimension": len(right_alg),
        "left_in_commutant_residual": left_in,
        "left_right_commutator_max": commute,
        "double_commutant_dimension": cc.dimension,
        "holds": (comm_r.dimension == len(left_alg) and comm_l.dimension == len(right_alg)
                  and left_in < 1e-10 and commute < 1e-10 and cc.dimension == len(right_alg)),
    }


# -- Schur-Weyl ------------------------------------------------------------------------


def tensor_permutation(m: int, n: int, perm) -> np.ndarray:
    """Operator permuting the n tensor factors of (R^m)^{tensor n}."""
    d = m**n
    E = np.eye(d).reshape([m] * n + [d])
    return E.transpose(list(perm) + [n]).reshape(d, d)


def tensor_power(g: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [g] * n)


def schur_weyl_check(m: int, n: int, seed: int = 0, samples: int = 3) -> dict:
    """Permutation and GL tensor-power algebras on (R^m)^{tensor n} are mutual commutants."""
    if m < 1 or n < 1:
        raise SizeLimitExceeded("m and n must be positive")
    d = m**n
    if d > MAX_TENSOR_DIM:
        raise SizeLimitExceeded(f"m^n = {d} exceeds {MAX_TENSOR_DIM}")
    if d > MAX_DIM:
        # fail before building the algebras: the commutant solves are capped at MAX_DIM
        raise SizeLimitExceeded(f"m^n = {d} exceeds the commutant solver limit {MAX_DIM}")
    perms = [tensor_permutation(m, n, p) for p in permutations(range(n))]
    perm_span = span_basis(perms)
    rng = np.random.default_rng(seed)
    gs = [rng.standard_normal((m, m)) for _ in range(samples + 1)]
    powers = [tensor_power(g, n) for g in gs]
    gl_alg = generated_algebra(powers[:samples])
    gl_alg_more = generated_algebra(powers)
    comm_perm = commutant_of(perms)
    comm_gl = commutant_of(powers[:samples])
    cc_perm = commutant_of(comm_perm.basis)
    cc_gl = commutant_of(comm_gl.basis)
    gen_residual = max(
        max(cc_perm.projection_residual(P) for P in perms),
        max(cc_gl.projection_residual(G) for G in powers[:samples]),
    )
    return {
        "m": m,
        "n": n,
        "dimension": d,
        "permutation_span_dimension": len(perm_span),
        "gl_algebra_dimension": len(gl_alg),
        "gl_algebra_stable": len(gl_alg_more) == len(gl_alg),
        "commutant_of_permutations_dimension": comm_perm.dimension,
        "commutant_of_gl_dimension": comm_gl.dimension,
        "double_commutant_permutations_dimension": cc_perm.dimension,
        "double_commutant_gl_dimension": cc_gl.dimension,
        "generator_projection_residual": gen_residual,
        "mutual_commutants": (comm_perm.dimension == len(gl_alg) and comm_gl.dimension == len(perm_span)),
        "double_commutant_closure": (cc_perm.dimension == len(perm_span) and cc_gl.dimension == len(gl_alg)),
    }
