"""Independent reference computations used by the tests.

Nothing here imports koopman_criteria: determinants come from exact
rational elimination or a single dense LU call, integrals from tensor
Gauss-Hermite quadrature or sympy expansion against Gaussian moments,
series sums from direct summation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import sympy
from numpy.polynomial.hermite import hermgauss

GH_NODES = 64


def exact_det(M) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for k in range(c, n):
                A[r][k] -= f * A[c][k]
    return det


def lu_det(M) -> float:
    return float(np.linalg.det(np.asarray(M, dtype=float)))


def det_I_plus_XtX_direct(X) -> float:
    X = np.asarray(X, dtype=float)
    return lu_det(np.eye(X.shape[0]) + X.T @ X)


def gram_det_direct(vectors) -> float:
    A = np.asarray(vectors, dtype=float)
    return lu_det(A @ A.T)


def quad_direct(lam, mu) -> float:
    """(D^{-1} mu, mu) with D = diag(lam) + ones, by a dense solve."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    D = np.diag(lam) + np.ones((lam.size, lam.size))
    return float(mu @ np.linalg.solve(D, mu))


def brute_minor(X, rows, cols) -> Fraction:
    """1-based minor via exact elimination."""
    return exact_det([[X[i - 1][j - 1] for j in cols] for i in rows])


def minor_expansion_exact(X) -> Fraction:
    """1 + sum of squared minors over all equal-size row/column subsets, exactly."""
    m = len(X)
    total = Fraction(1)
    for r in range(1, m + 1):
        for rows in combinations(range(1, m + 1), r):
            for cols in combinations(range(1, m + 1), r):
                total += brute_minor(X, rows, cols) ** 2
    return total


# -- Gaussian densities and quadrature ---------------------------------------------


def gaussian_density(P, mean, x) -> float:
    """(det P / pi^m)^(1/2) exp(-(P(x-a), x-a))."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    d = np.atleast_1d(np.asarray(x, dtype=float)) - np.atleast_1d(np.asarray(mean, dtype=float))
    return math.sqrt(np.linalg.det(P) / math.pi ** P.shape[0]) * math.exp(-d @ P @ d)


def quad_integral(fn, P_ref, center, nodes: int = GH_NODES) -> float:
    """Integral of fn over R^m (m <= 2) with Gauss-Hermite nodes adapted to exp(-(P_ref y, y)).

    x = center + L^{-T} z with L L^T = P_ref turns exp(-(P_ref(x-c), x-c))
    into exp(-|z|^2).
    """
    P_ref = np.atleast_2d(np.asarray(P_ref, dtype=float))
    m = P_ref.shape[0]
    z, w = hermgauss(nodes)
    L = np.linalg.cholesky(P_ref)
    Linv_T = np.linalg.inv(L).T
    jac = 1.0 / abs(np.linalg.det(L))
    c = np.atleast_1d(np.asarray(center, dtype=float))
    total = 0.0
    if m == 1:
        for zi, wi in zip(z, w):
            x = c + Linv_T @ np.array([zi])
            total += wi * math.exp(zi * zi) * fn(x)
    elif m == 2:
        for zi, wi in zip(z, w):
            for zj, wj in zip(z, w):
                v = np.array([zi, zj])
                x = c + Linv_T @ v
                total += wi * wj * math.exp(v @ v) * fn(x)
    else:
        raise ValueError("quadrature oracle supports m <= 2")
    return total * jac


def hellinger_quadrature(B, a, C, c) -> float:
    """Integral of sqrt(p_B,a * p_C,c) by quadrature."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    ref = 0.5 * (B + C)
    center = 0.5 * (np.atleast_1d(a) + np.atleast_1d(c))

    def integrand(x):
        return math.sqrt(gaussian_density(B, a, x) * gaussian_density(C, c, x))

    return quad_integral(integrand, ref, center)


# -- sums and families ------------------------------------------------------------------


def direct_sum(fn, N: int, index_set: str = "Z") -> float:
    ns = range(-N, N + 1) if index_set == "Z" else range(1, N + 1)
    return math.fsum(fn(n) for n in ns)


def hermite_moment(b: Fraction, e: int) -> Fraction:
    """E[y^e] for y ~ N(0, 1/(2b)), from the Gaussian moment recursion E[y^e] = (e-1) v E[y^{e-2}]."""
    if e % 2:
        return Fraction(0)
    v = Fraction(1) / (2 * b)
    out = Fraction(1)
    for k in range(e, 0, -2):
        out *= (k - 1) * v
    return out


def apply_D(poly, y, b):
    """d/dx - b (x - a) acting on a sympy polynomial in the centred variable y = x - a."""
    return sympy.expand(sympy.diff(poly, y) - b * y * poly)


def gaussian_expectation(poly, precisions: dict) -> Fraction:
    """E[poly] for independent centred y ~ N(0, 1/(2b)), ``precisions`` mapping y -> b."""
    poly = sympy.Poly(sympy.expand(poly), *precisions.keys())
    total = Fraction(0)
    for powers, coef in poly.terms():
        val = Fraction(str(sympy.Rational(coef)))
        for (y, b), e in zip(precisions.items(), powers):
            val *= hermite_moment(Fraction(b), e)
        total += val
    return total


def exact_rank(rows) -> int:
    """Rank of an integer or rational matrix by Fraction elimination."""
    M = [[Fraction(x) for x in row] for row in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank]
        for r in range(rank + 1, len(M)):
            if M[r][c] != 0:
                f = M[r][c] / p[c]
                M[r] = [x - f * y for x, y in zip(M[r], p)]
        rank += 1
    return rank


def exact_commutant_dim(generators) -> int:
    """d^2 minus the rank of {B -> B T - T B} over integer generators, entrywise."""
    d = len(generators[0])
    rows = []
    for T in generators:
        for i in range(d):
            for j in range(d):
                # (B T - T B)_{ij} = sum_k B_ik T_kj - T_ik B_kj
                row = [0] * (d * d)
                for k in range(d):
                    row[i * d + k] += int(T[k][j])
                    row[k * d + j] -= int(T[i][k])
                rows.append(row)
    return d * d - exact_rank(rows)


def pair_orbit_count(perms, n: int) -> int:
    """Orbits of the group generated by ``perms`` on {0..n-1}^2 (Burnside: commutant dimension)."""
    seen, orbits = set(), 0
    for start in ((i, j) for i in range(n) for j in range(n)):
        if start in seen:
            continue
        orbits += 1
        stack = [start]
        seen.add(start)
        while stack:
            i, j = stack.pop()
            for p in perms:
                nxt = (p[i], p[j])
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return orbits
