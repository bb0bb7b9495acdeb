"""Small-matrix identities: minors, Gram determinants, det(I + X^T X),
the weighted expansion of det(diag(lam) + X^T X), the structured matrix
D(lam) = diag(lam) + ones and the Delta functional.

Sizes are tiny (m <= 8), so everything is dense float64.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import (
    IndexOutOfRange,
    LengthMismatch,
    NonPositiveLambda,
    ZeroBaseVector,
    ZeroLambda,
)

MAX_M = 8


def rel_close(value: float, reference: float, tol: float) -> bool:
    """|value - reference| <= tol * max(1, |reference|)."""
    return abs(value - reference) <= tol * max(1.0, abs(reference))


@dataclass(frozen=True)
class MinorIndex:
    """1-based sorted row and column sets of equal size."""

    rows: tuple
    cols: tuple

    def __post_init__(self):
        rows, cols = tuple(self.rows), tuple(self.cols)
        if len(rows) != len(cols) or not rows:
            raise IndexOutOfRange("row and column sets must be non-empty and of equal size")
        for s in (rows, cols):
            if any(b <= a for a, b in zip(s, s[1:])):
                raise IndexOutOfRange(f"index set {s} is not strictly increasing")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)


def colex_subsets(m: int, r: int):
    """r-subsets of {0..m-1} in colexicographic order."""
    return sorted(combinations(range(m), r), key=lambda s: tuple(reversed(s)))


def minor(X, idx: MinorIndex) -> float:
    X = np.asarray(X, dtype=float)
    nr, nc = X.shape
    if idx.rows[0] < 1 or idx.rows[-1] > nr or idx.cols[0] < 1 or idx.cols[-1] > nc:
        raise IndexOutOfRange(f"minor index {idx} out of range for a {nr}x{nc} matrix")
    sub = X[np.ix_([i - 1 for i in idx.rows], [j - 1 for j in idx.cols])]
    return float(np.linalg.det(sub))


def minors_of_order(X, r: int) -> np.ndarray:
    """All r x r minors; entry [I, J] for row subset I and column subset J (colex)."""
    X = np.asarray(X, dtype=float)
    rows = colex_subsets(X.shape[0], r)
    cols = colex_subsets(X.shape[1], r)
    if r == 1:
        return X[np.ix_([s[0] for s in rows], [s[0] for s in cols])].copy()
    ri = np.array(rows)
    ci = np.array(cols)
    blocks = X[ri[:, None, :, None], ci[None, :, None, :]]
    return np.linalg.det(blocks)


def _check_square(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise LengthMismatch(f"expected a square matrix, got shape {X.shape}")
    if X.shape[0] > MAX_M:
        raise IndexOutOfRange(f"m = {X.shape[0]} exceeds the cap {MAX_M}")
    return X


def det_I_plus_XtX(X) -> float:
    """1 + sum over all equal-size row/column subsets of the squared minors."""
    X = _check_square(X)
    m = X.shape[0]
    total = 1.0
    for r in range(1, m + 1):
        total += float(np.sum(minors_of_order(X, r) ** 2))
    return total


def column_gram_dets(X, r: int) -> np.ndarray:
    """Gamma of the column subsets of size r: sum over row subsets of squared minors."""
    return np.sum(minors_of_order(X, r) ** 2, axis=0)


def f_lambda(X, lam, form: str = "expansion") -> float:
    """det(diag(lam) + X^T X).

    The expansion form is prod(lam) * (1 + sum_I Gamma(x_I) / prod_{i in I} lam_i),
    the sum running over non-empty column subsets I.
    """
    X = _check_square(X)
    lam = np.asarray(lam, dtype=float)
    m = X.shape[0]
    if lam.shape != (m,):
        raise LengthMismatch("lambda must have length m")
    direct = float(np.linalg.det(np.diag(lam) + X.T @ X))
    if form == "direct":
        return direct
    if np.any(lam == 0):
        raise ZeroLambda("expansion form needs every lambda_k != 0", direct)
    total = 1.0
    for r in range(1, m + 1):
        gammas = column_gram_dets(X, r)
        weights = np.array([np.prod(lam[list(s)]) for s in colex_subsets(m, r)])
        total += float(np.sum(gammas / weights))
    return float(np.prod(lam)) * total


def gram(vectors) -> tuple[np.ndarray, float]:
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if len({v.shape for v in vecs}) > 1:
        raise LengthMismatch("vectors must have equal length")
    if not vecs:
        return np.zeros((0, 0)), 1.0
    A = np.vstack(vecs)
    G = A @ A.T
    return G, float(np.linalg.det(G))


def gram_via_minors(vectors) -> float:
    """Gamma(x_1..x_r) as the sum of squared maximal minors of the r x d coordinate matrix."""
    A = np.vstack([np.asarray(v, dtype=float) for v in vectors])
    r, d = A.shape
    if r > d:
        return 0.0
    return float(sum(np.linalg.det(A[:, list(c)]) ** 2 for c in combinations(range(d), r)))


def _pair(f, g):
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise LengthMismatch(f"lengths differ: {f.shape} vs {g.shape}")
    return f, g


def lagrange_gram2(f, g) -> float:
    """sum_{k<n} (f_k g_n - f_n g_k)^2."""
    f, g = _pair(np.asarray(f, dtype=float), np.asarray(g, dtype=float))
    M = np.outer(f, g) - np.outer(g, f)
    return float(np.sum(np.triu(M, 1) ** 2))


def _dot(u, v):
    return np.dot(u, v)


def gram2(f, g):
    """Gamma(f, g) = |f|^2 |g|^2 - (f, g)^2, evaluated without cancellation.

    Uses |g|^2 * |f - c g|^2 with c = (f, g)/|g|^2, which is the same number
    and keeps full relative accuracy for nearly collinear pairs. Works on
    float arrays and on object arrays of mpmath numbers.
    """
    f, g = _pair(f, g)
    gg = _dot(g, g)
    if gg == 0:
        return gg * 0
    c = _dot(f, g) / gg
    r = f - c * g
    return gg * _dot(r, r)


def dist_to_line(f2, f1) -> float:
    """Squared distance of f2 from the line through f1: Gamma(f1, f2) / Gamma(f1)."""
    f2, f1 = _pair(f2, f1)
    g1 = _dot(f1, f1)
    if g1 == 0:
        raise ZeroBaseVector("base vector is zero")
    return gram2(f2, f1) / g1


def d_lambda_matrix(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return np.diag(lam) + np.ones((lam.size, lam.size))


def d_lambda(lam, mu) -> tuple[float, float]:
    """Closed forms for D(lam) = diag(lam) + ones:

    det = prod(lam) (1 + sum 1/lam),
    (D^{-1} mu, mu) = (sum mu^2/lam + sum_{k<n} (mu_k - mu_n)^2/(lam_k lam_n)) / (1 + sum 1/lam).
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.shape != mu.shape:
        raise LengthMismatch("lambda and mu lengths differ")
    if np.any(lam <= 0):
        raise NonPositiveLambda("every lambda_k must be positive")
    inv = 1.0 / lam
    s = 1.0 + inv.sum()
    with np.errstate(over="ignore"):
        det = float(np.prod(lam) * s)  # inf for very large windows of large lam
    diff = mu[:, None] - mu[None, :]
    pair = np.triu(diff**2 * np.outer(inv, inv), 1).sum()
    quad = float((np.sum(mu**2 * inv) + pair) / s)
    return det, quad


def delta_functional(f, g):
    """Delta(f, g) = (Gamma(f) + Gamma(f, g)) / (Gamma(g) + 1)."""
    f, g = _pair(f, g)
    if f.size == 0:
        return 0.0
    return (_dot(f, f) + gram2(f, g)) / (_dot(g, g) + 1)


def principal_minor(C, subset) -> float:
    subset = sorted(subset)
    if not subset:
        return 1.0
    C = np.asarray(C, dtype=float)
    return float(np.linalg.det(C[np.ix_(subset, subset)]))


def hadamard_fischer_gap(C, alpha, beta) -> float:
    """det [[M(a), M(a & b)], [M(a | b), M(b)]] = M(a)M(b) - M(a & b)M(a | b); >= 0 for C > 0."""
    a, b = set(alpha), set(beta)
    return principal_minor(C, a) * principal_minor(C, b) - principal_minor(C, a & b) * principal_minor(C, a | b)


def subset_count(m: int) -> int:
    return sum(comb(m, r) ** 2 for r in range(1, m + 1))
