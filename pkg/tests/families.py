"""Engineered and randomized symbolic families shared by the irred and acceptance tests."""

from __future__ import annotations

import numpy as np

# b2 / b1 spanning power-law and exponential ratios
RATIO_FAMILIES = [
    ("1", "1"),
    ("1", "2"),
    ("1", "1 + 1/(1+abs(n))"),
    ("1", "1 + 1/(1+abs(n))^2"),
    ("1", "1 + (1+abs(n))^(-1/2)"),
    ("1", "1+abs(n)"),
    ("1", "(1+abs(n))^2"),
    ("1", "(1+abs(n))^(1/2)"),
    ("1+abs(n)", "1"),
    ("(1+abs(n))^3", "(1+abs(n))^2"),
    ("(1+abs(n))^2", "(1+abs(n))^2 + 1"),
    ("(1+abs(n))^2", "(1+abs(n))^2 + abs(n)"),
    ("1", "exp(abs(n))"),
    ("1", "exp(abs(n)/8)"),
    ("exp(abs(n)/2)", "1"),
    ("exp(-abs(n)/4)", "exp(abs(n)/4)"),
    ("exp(abs(n)/3)", "exp(abs(n)/3) * (1 + 1/(1+abs(n)))"),
    ("exp(abs(n)/3)", "2*exp(abs(n)/3)"),
    ("1", "3/2 + alt(n)/2"),
    ("2 + alt(n)", "2 - alt(n)"),
    ("1", "1 + alt(n)/(2+abs(n))"),
    ("1", "1 + exp(-abs(n))"),
    ("(1+abs(n))^(-1)", "(1+abs(n))^(-1) + (1+abs(n))^(-2)"),
    ("(1+abs(n))^(-2)", "1"),
    ("5", "5 + 1/(1+abs(n))^(3/2)"),
    ("1/3", "3"),
    ("1", "1 + 2/(1+abs(n))"),
    ("exp(abs(n)/5)", "exp(abs(n)/5) + 1"),
    ("1+n^2", "1+n^2+abs(n)"),
    ("1+abs(n)", "2+2*abs(n)"),
]

# Sigma_1(s) diverges for every s: the ratio b2/b1 has no positive limit, or alternates
PARK_FAMILIES = [
    ("1", "1+abs(n)"),
    ("1", "exp(abs(n))"),
    ("1", "(1+abs(n))^2"),
    ("1+abs(n)", "1"),
    ("exp(abs(n)/2)", "1"),
    ("1", "3/2 + alt(n)/2"),
    ("2 + alt(n)", "2 - alt(n)"),
    ("1", "(1+abs(n))^(1/2)"),
    ("(1+abs(n))^(-1)", "1"),
    ("exp(-abs(n)/4)", "exp(abs(n)/4)"),
]

# b1 = b2, so Sigma_1(1) = 0 converges; means chosen so that Sigma_2(C) diverges for every C
LAST_FAMILIES = [
    (("1", "1"), ("1", "alt(n)")),
    (("1", "1"), ("1", "abs(n)")),
    (("1+abs(n)", "1+abs(n)"), ("1", "n/(1+abs(n))")),
    (("1+abs(n)", "1+abs(n)"), ("alt(n)", "1")),
    (("2", "2"), ("1", "(1+abs(n))^(1/2)")),
    (("1", "1"), ("abs(n)", "1")),
    (("exp(abs(n)/4)", "exp(abs(n)/4)"), ("1", "alt(n)")),
    (("1", "1"), ("1+abs(n)", "alt(n)")),
    (("3", "3"), ("alt(n)", "1+abs(n)")),
    (("(1+abs(n))^2", "(1+abs(n))^2"), ("1/(1+abs(n))", "alt(n)/(1+abs(n))")),
]

# families whose mean vectors f, g satisfy |f|^2 = |g|^2 = |C1 f + C2 g|^2 = inf (index set k >= 1)
PROJECTION_FAMILIES = [
    ("1", "alt(n)"),
    ("1", "n"),
    ("alt(n)", "1 + n^(1/2)"),
    ("n^(1/2)", "alt(n)*n^(1/2)"),
    ("1", "alt(n) + 1/n"),
]

_B_POOL = ["1", "2", "1+abs(n)", "(1+abs(n))^2", "(1+abs(n))^(1/2)", "exp(abs(n)/4)", "exp(abs(n))",
           "exp(-abs(n)/4)", "3/2 + alt(n)/2", "1 + 1/(1+abs(n))", "(1+abs(n))^(-1)", "2 + alt(n)"]
_A_POOL = ["0", "1", "alt(n)", "abs(n)", "1/(1+abs(n))", "(1+abs(n))^(-2)", "alt(n)/(1+abs(n))",
           "exp(-abs(n)/3)", "2", "(1+abs(n))^(1/2)", "1 + alt(n)", "n"]


def random_families(count: int, seed: int):
    """Seeded (b, a) pairs drawn from the symbolic pools."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        b = [_B_POOL[i] for i in rng.integers(0, len(_B_POOL), 2)]
        a = [_A_POOL[i] for i in rng.integers(0, len(_A_POOL), 2)]
        out.append((b, a))
    return out
