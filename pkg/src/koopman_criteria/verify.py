"""Seeded self-check of the identity layer: each expansion against the
direct dense computation on random instances."""

from __future__ import annotations

import zlib

import numpy as np

from .identities import (
    d_lambda,
    d_lambda_matrix,
    delta_functional,
    det_I_plus_XtX,
    f_lambda,
    gram,
    gram2,
    gram_via_minors,
    lagrange_gram2,
    rel_close,
)

TOL = 1e-9


def _det_star(rng):
    m = int(rng.integers(1, 6))
    X = rng.standard_normal((m, m))
    return det_I_plus_XtX(X), float(np.linalg.det(np.eye(m) + X.T @ X))


def _f_lambda(rng):
    m = int(rng.integers(1, 6))
    X = rng.standard_normal((m, m))
    lam = rng.uniform(0.2, 3.0, m)
    return f_lambda(X, lam), f_lambda(X, lam, form="direct")


def _gram_minors(rng):
    r = int(rng.integers(1, 5))
    d = int(rng.integers(r, 7))
    vecs = rng.standard_normal((r, d))
    return gram_via_minors(vecs), gram(vecs)[1]


def _lagrange(rng):
    d = int(rng.integers(2, 9))
    f, g = rng.standard_normal(d), rng.standard_normal(d)
    return lagrange_gram2(f, g), float(gram2(f, g))


def _d_det(rng):
    m = int(rng.integers(1, 7))
    lam = rng.uniform(0.2, 3.0, m)
    return d_lambda(lam, np.zeros(m))[0], float(np.linalg.det(d_lambda_matrix(lam)))


def _d_quad(rng):
    m = int(rng.integers(1, 7))
    lam = rng.uniform(0.2, 3.0, m)
    mu = rng.standard_normal(m)
    return d_lambda(lam, mu)[1], float(mu @ np.linalg.solve(d_lambda_matrix(lam), mu))


def _delta_d(rng):
    m = int(rng.integers(1, 7))
    lam = rng.uniform(0.2, 3.0, m)
    mu = rng.standard_normal(m)
    return float(delta_functional(mu / np.sqrt(lam), 1 / np.sqrt(lam))), d_lambda(lam, mu)[1]


SUITES = {
    "det_I_plus_XtX": _det_star,
    "F_lambda": _f_lambda,
    "gram_via_minors": _gram_minors,
    "lagrange": _lagrange,
    "D_lambda_det": _d_det,
    "D_lambda_quadform": _d_quad,
    "delta_vs_D_lambda": _delta_d,
}


def run_identity_suites(seed: int = 0, count: int = 200, tol: float = TOL) -> dict:
    """{suite: {"instances", "failures", "max_rel_error", "passed"}}."""
    out = {}
    for name, fn in SUITES.items():
        rng = np.random.default_rng([seed, zlib.crc32(name.encode())])
        fails, worst = 0, 0.0
        for _ in range(count):
            got, ref = fn(rng)
            err = abs(got - ref) / max(1.0, abs(ref))
            worst = max(worst, err)
            if not rel_close(got, ref, tol):
                fails += 1
        out[name] = {"instances": count, "failures": fails, "max_rel_error": worst, "passed": fails == 0}
    return out
