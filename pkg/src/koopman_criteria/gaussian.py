"""Gaussian blocks with density (det B / pi^m)^(1/2) exp(-(B(x-a), x-a)),
their left-action pushforwards, Hellinger integrals and the product-measure
dichotomy primitives.

Note the convention: B is the precision up to a factor 2, i.e. the
covariance is (2B)^{-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidHellingerValue,
    NotPositiveDefinite,
    SingularMatrix,
)
from .identities import det_I_plus_XtX
from .seqlang import Call, Const, Expr, Pow, evaluate_array, rational
from .series import (
    DEFAULT_POLICY,
    DivergencePolicy,
    DivergenceVerdict,
    MeanShift,
    MeasureFamilySpec,
    PartialSumTrace,
    classify_symbolic,
    classify_trace,
    partial_sums,
    trace_from_values,
)

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class GaussianBlock:
    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if b.shape != a.shape or b.ndim != 1:
            raise DimensionMismatch("b and a must be vectors of equal length")
        if np.any(b <= 0):
            raise NotPositiveDefinite("every b_k must be positive")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def m(self) -> int:
        return self.b.size

    @property
    def precision(self) -> np.ndarray:
        return np.diag(self.b)

    @property
    def mean(self) -> np.ndarray:
        return self.a


@dataclass(frozen=True)
class PushedGaussian:
    precision: np.ndarray
    mean: np.ndarray

    @property
    def m(self) -> int:
        return self.mean.size


def density(g, x) -> float:
    """Density of a GaussianBlock or PushedGaussian at x."""
    P = np.asarray(g.precision, dtype=float)
    mu = np.asarray(g.mean, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != mu.shape:
        raise DimensionMismatch(f"point has shape {x.shape}, block has dimension {mu.size}")
    d = x - mu
    return float(math.sqrt(np.linalg.det(P) / math.pi ** mu.size) * math.exp(-d @ P @ d))


def _check_invertible(t: np.ndarray) -> float:
    det = float(np.linalg.det(t))
    scale = max(1.0, float(np.linalg.norm(t)) ** t.shape[0])
    if abs(det) <= SINGULAR_TOL * scale:
        raise SingularMatrix(f"|det t| = {abs(det):.3g} is numerically zero")
    return det


def _square(t, m: int) -> np.ndarray:
    t = np.atleast_2d(np.asarray(t, dtype=float))
    if t.shape != (m, m):
        raise DimensionMismatch(f"t must be {m}x{m}, got {t.shape}")
    return t


def pushforward_left(g: GaussianBlock, t) -> PushedGaussian:
    """Precision t^T B t and mean t^{-1} a."""
    t = _square(t, g.m)
    _check_invertible(t)
    P = t.T @ np.diag(g.b) @ t
    return PushedGaussian(0.5 * (P + P.T), np.linalg.solve(t, g.a))


def _cholesky_logdet(M: np.ndarray) -> float:
    if not np.allclose(M, M.T, rtol=1e-12, atol=1e-14):
        raise NotPositiveDefinite("matrix is not symmetric")
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def hellinger_pair(B, C) -> float:
    """(det B det C / det^2((B+C)/2))^(1/4) for centered blocks."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if B.shape != C.shape:
        raise DimensionMismatch("precision matrices differ in shape")
    lb, lc = _cholesky_logdet(B), _cholesky_logdet(C)
    lm = _cholesky_logdet(0.5 * (B + C))
    return float(min(1.0, math.exp(0.25 * (lb + lc) - 0.5 * lm)))


def x_matrix(b, t) -> np.ndarray:
    """X = B^{1/2} t B^{-1/2}, i.e. X_rs = t_rs sqrt(b_r / b_s)."""
    sb = np.sqrt(np.asarray(b, dtype=float))
    return (sb[:, None] * np.asarray(t, dtype=float)) / sb[None, :]


def hellinger_left_action(b, t) -> float:
    """(det(I + X^T X) / (2^m |det t|))^(-1/2), X = B^{1/2} t B^{-1/2}."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if np.any(b <= 0):
        raise NotPositiveDefinite("every b_k must be positive")
    t = _square(t, b.size)
    det = _check_invertible(t)
    ratio = det_I_plus_XtX(x_matrix(b, t)) / (2.0 ** b.size * abs(det))
    return float(min(1.0, ratio ** -0.5))


def mean_shift_series(spec: MeasureFamilySpec, t, N: int) -> PartialSumTrace:
    """Partial sums of sum_n sum_r b_rn (sum_s (t_rs - delta_rs) a_sn)^2."""
    t = _square(t, spec.m)
    return partial_sums(spec, MeanShift(t), N)


def zero_one_law(a_fam: Expr, b_fam: Expr, index_set: str = "N", n_max: int = 4096,
                 policy: DivergencePolicy = DEFAULT_POLICY):
    """mu_b(l2(a)) in {0, 1}: 1 iff sum a_k / b_k converges."""
    summand = a_fam / b_fam
    verdict = classify_symbolic(summand, index_set)
    if verdict is None:
        ns = np.arange(-n_max, n_max + 1) if index_set == "Z" else np.arange(1, n_max + 1)
        verdict = classify_trace(trace_from_values(evaluate_array(summand, ns), index_set, n_max), policy)
    if verdict.converges:
        return 1
    if verdict.diverges:
        return 0
    return "Inconclusive"


@dataclass(frozen=True)
class KakutaniResult:
    primary: DivergenceVerdict  # sum (H^-2 - 1)
    log_check: DivergenceVerdict  # -sum log H

    @property
    def agree(self) -> bool:
        return self.primary.tag == self.log_check.tag


def _kakutani_both(hellinger_terms, policy, index_set, n_max):
    if isinstance(hellinger_terms, Expr):
        H = hellinger_terms
        ns = np.arange(-n_max, n_max + 1) if index_set == "Z" else np.arange(1, n_max + 1)
        vals = evaluate_array(H, ns)
        _check_h(vals)
        primary = Pow(H, rational(-2.0)) - Const(1.0)
        logform = -Call("log1p", H - Const(1.0))
        out = []
        for summand in (primary, logform):
            v = classify_symbolic(summand, index_set)
            if v is None:
                v = classify_trace(trace_from_values(evaluate_array(summand, ns), index_set, n_max), policy)
            out.append(v)
        return out
    vals = np.asarray(hellinger_terms, dtype=float)
    _check_h(vals)
    n = vals.size
    with np.errstate(divide="ignore"):
        primary = trace_from_values(vals ** -2.0 - 1.0, "N", n)
        logform = trace_from_values(-np.log(vals), "N", n)
    return [classify_trace(primary, policy), classify_trace(logform, policy)]


def _check_h(vals):
    bad = ~((vals > 0) & (vals <= 1.0))
    if bad.any():
        raise InvalidHellingerValue(f"Hellinger value {vals[bad][0]!r} outside (0, 1]")


def kakutani_check(hellinger_terms, policy: DivergencePolicy = DEFAULT_POLICY,
                   index_set: str = "N", n_max: int = 4096) -> KakutaniResult:
    primary, log_check = _kakutani_both(hellinger_terms, policy, index_set, n_max)
    return KakutaniResult(primary, log_check)


def kakutani_orthogonality(hellinger_terms, classifier: DivergencePolicy = DEFAULT_POLICY,
                           index_set: str = "N", n_max: int = 4096) -> DivergenceVerdict:
    """Diverges (product measures orthogonal) iff sum (H_n^{-2} - 1) diverges.

    ``hellinger_terms`` is either an array H_1, H_2, ... or an expression in n.
    The -sum log H_n verdict is attached to the detail as a cross-check.
    """
    res = kakutani_check(hellinger_terms, classifier, index_set, n_max)
    v = res.primary
    note = f"log cross-check {res.log_check.tag}" + ("" if res.agree else " (disagrees)")
    detail = f"{v.detail}; {note}" if v.detail else note
    return DivergenceVerdict(v.tag, v.method, v.exponent, v.remainder_bound, v.grid_sampled, detail)
