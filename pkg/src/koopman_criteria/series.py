"""Criterion series: summand construction, dyadic partial-sum traces and
divergence classification.

Summands are built as expression trees in n by substituting the measure
families into templates in the variables b1, b2, a1, a2. The symbolic
classifier reads the leading term of the summand on every ray; the
numeric classifier fits the tail exponent of dyadic block sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedKindForM
from .identities import colex_subsets
from .seqlang.evaluate import first_nonpositive
from .seqlang import (
    Const,
    Expr,
    evaluate_array,
    leading_terms,
    parse_family,
    substitute,
    unparse,
)

ROW_VARS = ("b1", "b2", "a1", "a2")

DEFAULT_T_GRID = (-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0)
DEFAULT_S_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_PHI_GRID = tuple(k * math.pi / 8 for k in range(16))
DEFAULT_C_GRID = tuple((math.cos(k * math.pi / 8), math.sin(k * math.pi / 8)) for k in range(8))

SNAP = 1e-12


def snap(x: float) -> float:
    """Round trig-type constants that are zero up to rounding."""
    return 0.0 if abs(x) < SNAP else float(x)


@dataclass(frozen=True)
class Grids:
    t: tuple = DEFAULT_T_GRID
    s: tuple = DEFAULT_S_GRID
    phi: tuple = DEFAULT_PHI_GRID
    C: tuple = DEFAULT_C_GRID


@dataclass(frozen=True)
class DivergencePolicy:
    delta: float = 0.05
    min_levels: int = 4
    fit_levels: int = 5
    dip_tolerance: float = 0.10


DEFAULT_POLICY = DivergencePolicy()


# -- measure families --------------------------------------------------------


@dataclass(frozen=True)
class MeasureFamilySpec:
    """Rows k = 1..m of precision families b[k] > 0 and mean families a[k]."""

    m: int
    n_max: int
    b: tuple
    a: tuple
    index_set: str = "Z"

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "a", tuple(self.a))
        if self.m < 1 or len(self.b) != self.m or len(self.a) != self.m:
            raise DomainError(f"need m >= 1 and m families in b and a (m={self.m})")
        if self.n_max < 1:
            raise DomainError("n_max must be positive")
        if self.index_set not in ("Z", "N"):
            raise DomainError("index_set must be 'Z' or 'N'")
        ns = self.indices()
        for k, fam in enumerate(self.b, 1):
            idx = first_nonpositive(fam, ns)
            if idx is not None:
                raise DomainError(f"b[{k}] = {unparse(fam)} is not positive at n = {int(ns[idx])}")
        for fam in self.a:
            evaluate_array(fam, ns)

    @classmethod
    def from_strings(cls, m: int, n_max: int, b: Sequence[str], a: Sequence[str], index_set: str = "Z"):
        return cls(m, n_max, tuple(parse_family(s) for s in b), tuple(parse_family(s) for s in a), index_set)

    def indices(self, N: int | None = None) -> np.ndarray:
        N = self.n_max if N is None else N
        if self.index_set == "Z":
            return np.arange(-N, N + 1)
        return np.arange(1, N + 1)

    def row_mapping(self) -> dict:
        out = {}
        for k in range(self.m):
            out[f"b{k + 1}"] = self.b[k]
            out[f"a{k + 1}"] = self.a[k]
        return out

    def describe(self) -> dict:
        return {
            "m": self.m,
            "n_max": self.n_max,
            "index_set": self.index_set,
            "b": [unparse(f) for f in self.b],
            "a": [unparse(f) for f in self.a],
        }


# -- series kinds ------------------------------------------------------------


@dataclass(frozen=True)
class SeriesKind:
    tag: str
    params: tuple = ()

    def label(self) -> str:
        if not self.params:
            return self.tag
        parts = []
        for p in self.params:
            if isinstance(p, tuple):
                parts.append("[" + ",".join(_fmt(x) for x in np.ravel(p)) + "]")
            else:
                parts.append(_fmt(p))
        return f"{self.tag}({','.join(parts)})"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def SL(k: int, n: int) -> SeriesKind:
    return SeriesKind("SL", (k, n))


def SLminus(k: int, n: int, t: float) -> SeriesKind:
    return SeriesKind("SLminus", (k, n, float(t)))


def Sigma1(s: float) -> SeriesKind:
    return SeriesKind("Sigma1", (float(s),))


def Sigma2minus(phi: float, s: float) -> SeriesKind:
    return SeriesKind("Sigma2minus", (float(phi), float(s)))


def Sigma12minus(phi: float, s: float) -> SeriesKind:
    return SeriesKind("Sigma12minus", (float(phi), float(s)))


def Sigma2C(c1: float, c2: float) -> SeriesKind:
    return SeriesKind("Sigma2C", (float(c1), float(c2)))


def Sigma2s(s: float) -> SeriesKind:
    """Sigma_2(s) of the Sigma_1/Sigma_2 equivalence lemma."""
    return SeriesKind("Sigma2s", (float(s),))


SL11 = SeriesKind("SL11")
SL22 = SeriesKind("SL22")
RatioB12 = SeriesKind("RatioB12")
RatioB21 = SeriesKind("RatioB21")
NormF = SeriesKind("NormF")
NormG = SeriesKind("NormG")
NormF1 = SeriesKind("NormF1")
NormG1 = SeriesKind("NormG1")
NormF2 = SeriesKind("NormF2")
NormG2 = SeriesKind("NormG2")


def FplusSG(s: float) -> SeriesKind:
    return SeriesKind("FplusSG", (float(s),))


def NormCombo(c1: float, c2: float) -> SeriesKind:
    """|C1 f + C2 g|^2 for the mean-vector pair f, g."""
    return SeriesKind("NormCombo", (float(c1), float(c2)))


def F1minusCG1(c: float) -> SeriesKind:
    return SeriesKind("F1minusCG1", (float(c),))


def F2minusCG2(c: float) -> SeriesKind:
    return SeriesKind("F2minusCG2", (float(c),))


def MeanShift(t) -> SeriesKind:
    t = np.asarray(t, dtype=float)
    return SeriesKind("MeanShift", (tuple(map(tuple, t.tolist())),))


def HellingerCentered(t) -> SeriesKind:
    """sum_n (H_n^{-2} - 1) for the centered blocks under the left action of t."""
    t = np.asarray(t, dtype=float)
    return SeriesKind("HellingerCentered", (tuple(map(tuple, t.tolist())),))


_TEMPLATE_VARS = ROW_VARS + ("t", "s2", "is2", "s4", "is4", "sh", "ch", "sh2", "ch2", "sinphi2", "c1", "c2", "C")

_TEMPLATES = {
    "SL": "b{k}/2 * (1/(2*b{n}) + a{n}^2)",
    "SLminus": "t^2/4 * b{k}/b{n} + b{k}/2 * (t*a{n} - 2*a{k})^2",
    "Sigma1": "(s2*(b1/b2)^(1/2) - is2*(b2/b1)^(1/2))^2",
    "Sigma2minus": "(4*sh2*b1 + 4*ch2*is4*b2) * (sh*a1 - s2*ch*a2)^2",
    "Sigma2C": "(c1^2*b1 + c2^2*b2) * (c1*a1 + c2*a2)^2",
    "Sigma2s": "(s4*b1/b2 - 1)^2 + (is4*b2/b1 - 1)^2",
    "SL11": "4*b1*a1^2",
    "SL22": "4*b2*a2^2",
    "RatioB12": "b1/b2",
    "RatioB21": "b2/b1",
    "NormF": "a1^2 / (1/(2*b1) + 1/(2*b2))",
    "NormG": "a2^2 / (1/(2*b1) + 1/(2*b2))",
    "NormCombo": "(c1*a1 + c2*a2)^2 / (1/(2*b1) + 1/(2*b2))",
    "NormF1": "b1^2 / (b1^2 + 2*b1*b2)",
    "NormG1": "b2^2 / (b1^2 + 2*b1*b2)",
    "NormF2": "b2^2 / (b2^2 + 2*b1*b2)",
    "NormG2": "b1^2 / (b2^2 + 2*b1*b2)",
    "F1minusCG1": "(b1 - C*b2)^2 / (b1^2 + 2*b1*b2)",
    "F2minusCG2": "(b2 - C*b1)^2 / (b2^2 + 2*b1*b2)",
}

_M2_ONLY = set(_TEMPLATES) - {"SL11"} | {"Sigma12minus", "FplusSG"}


def _template(text: str, consts: dict, rows: dict) -> Expr:
    expr = parse_family(text, variables=_TEMPLATE_VARS)
    mapping = {k: Const(snap(v)) for k, v in consts.items()}
    mapping.update(rows)
    return substitute(expr, mapping)


def _half_angle(phi: float) -> dict:
    sh, ch = snap(math.sin(phi / 2)), snap(math.cos(phi / 2))
    return {"sh": sh, "ch": ch, "sh2": sh * sh, "ch2": ch * ch}


def summand_expr(spec: MeasureFamilySpec, kind: SeriesKind) -> Expr:
    """The series summand as an expression in n."""
    rows = spec.row_mapping()
    tag, p = kind.tag, kind.params
    if tag in ("MeanShift", "HellingerCentered"):
        t = np.asarray(p[0], dtype=float)
        if t.shape != (spec.m, spec.m):
            from .errors import DimensionMismatch

            raise DimensionMismatch(f"t must be {spec.m}x{spec.m}")
        return mean_shift_expr(spec, t) if tag == "MeanShift" else hellinger_centered_expr(spec, t)
    if tag in _M2_ONLY and spec.m != 2:
        raise UnsupportedKindForM(f"{kind.label()} requires m = 2 (got m = {spec.m})")
    if tag == "SL11" and spec.m not in (1, 2):
        raise UnsupportedKindForM("SL11 requires m <= 2")
    if tag == "SL":
        k, n = p
        return _template(_TEMPLATES["SL"].format(k=k, n=n), {}, rows)
    if tag == "SLminus":
        k, n, t = p
        return _template(_TEMPLATES["SLminus"].format(k=k, n=n), {"t": t}, rows)
    if tag in ("Sigma1", "Sigma2s"):
        s = p[0]
        _positive_s(s)
        return _template(_TEMPLATES[tag], {"s2": s**2, "is2": s**-2, "s4": s**4, "is4": s**-4}, rows)
    if tag == "Sigma2minus":
        phi, s = p
        _positive_s(s)
        return _template(_TEMPLATES[tag], {"s2": s**2, "is4": s**-4, **_half_angle(phi)}, rows)
    if tag == "Sigma12minus":
        phi, s = p
        sin2 = snap(math.sin(phi)) ** 2
        left = summand_expr(spec, Sigma1(s))
        right = summand_expr(spec, Sigma2minus(phi, s))
        return Const(sin2) * left + right
    if tag in ("Sigma2C", "NormCombo"):
        return _template(_TEMPLATES[tag], {"c1": p[0], "c2": p[1]}, rows)
    if tag == "FplusSG":
        return _template(_TEMPLATES["NormCombo"], {"c1": 1.0, "c2": p[0]}, rows)
    if tag in ("F1minusCG1", "F2minusCG2"):
        return _template(_TEMPLATES[tag], {"C": p[0]}, rows)
    if tag in _TEMPLATES:
        return _template(_TEMPLATES[tag], {}, rows)
    raise ValueError(f"unknown series kind {tag}")


def _positive_s(s: float):
    if not s > 0:
        raise DomainError("s must be positive")


def mean_shift_expr(spec: MeasureFamilySpec, t) -> Expr:
    """sum_r b_r (sum_s (t_rs - delta_rs) a_s)^2 as an expression in n."""
    t = np.asarray(t, dtype=float)
    d = t - np.eye(spec.m)
    total: Expr | None = None
    for r in range(spec.m):
        inner: Expr | None = None
        for s in range(spec.m):
            if d[r, s] == 0:
                continue
            term = Const(float(d[r, s])) * spec.a[s]
            inner = term if inner is None else inner + term
        if inner is None:
            continue
        piece = spec.b[r] * inner ** 2
        total = piece if total is None else total + piece
    return Const(0.0) if total is None else total


def hellinger_centered_expr(spec: MeasureFamilySpec, t) -> Expr:
    """H_n^{-2} - 1 = det(I + X^T X)/(2^m |det t|) - 1 with X_rs = t_rs sqrt(b_r/b_s).

    Minors of X are minors of t times prod_{i in I} sqrt(b_i) / prod_{j in J} sqrt(b_j),
    so each squared minor contributes M_IJ(t)^2 prod_{I\\J} b / prod_{J\\I} b.
    Diagonal blocks I = J are collected into one constant.
    """
    t = np.asarray(t, dtype=float)
    m = spec.m
    norm = 2.0**m * abs(np.linalg.det(t))
    const_parts = [1.0 / norm, -1.0]
    ratio_terms: dict = {}
    for r in range(1, m + 1):
        subsets = colex_subsets(m, r)
        for I in subsets:
            for J in subsets:
                M = float(np.linalg.det(t[np.ix_(I, J)]))
                w = M * M / norm
                if w == 0:
                    continue
                up = tuple(sorted(set(I) - set(J)))
                down = tuple(sorted(set(J) - set(I)))
                if not up and not down:
                    const_parts.append(w)
                else:
                    ratio_terms.setdefault((up, down), []).append(w)
    c0 = math.fsum(const_parts)
    if abs(c0) <= SNAP * max(abs(c) for c in const_parts):
        c0 = 0.0
    total: Expr = Const(c0)
    for (up, down), ws in sorted(ratio_terms.items()):
        num: Expr = Const(math.fsum(ws))
        for i in up:
            num = num * spec.b[i]
        den: Expr | None = None
        for j in down:
            den = spec.b[j] if den is None else den * spec.b[j]
        total = total + (num / den if den is not None else num)
    return total


# -- traces --------------------------------------------------------------------


def dyadic_checkpoints(N: int) -> tuple:
    if N < 16:
        return (N,)
    out = []
    k = 4
    while 2**k <= N:
        out.append(2**k)
        k += 1
    return tuple(out)


@dataclass(frozen=True)
class PartialSumTrace:
    """Partial sums S_N over the window |n| <= N (n >= 1 on the index set N)."""

    checkpoints: tuple
    sums: tuple
    increments: tuple  # sum over checkpoints[i] < |n| <= checkpoints[i+1]
    min_summand: float
    negative_count: int
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "checkpoints": list(self.checkpoints),
            "sums": [_json_float(x) for x in self.sums],
            "min_summand": _json_float(self.min_summand),
            "negative_count": self.negative_count,
        }


def _json_float(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def fold_by_abs(values: np.ndarray, index_set: str) -> np.ndarray:
    """w[k] = total summand at |n| = k (k = 0..N on Z, k = 1..N on N with w[0] = 0)."""
    if index_set == "Z":
        N = (values.size - 1) // 2
        w = values[N:].copy()
        with np.errstate(over="ignore"):
            w[1:] += values[:N][::-1]
        return w
    return np.concatenate([[0.0], values])


def trace_from_values(values: np.ndarray, index_set: str, N: int, label: str = "") -> PartialSumTrace:
    values = np.asarray(values, dtype=float)
    scale = np.nanmax(np.abs(values)) if values.size and np.isfinite(values).any() else 0.0
    tiny = (values < 0) & (values >= -SNAP * max(scale, 1.0))
    negative = int(np.sum(values < 0) - np.sum(tiny))
    values = np.where(tiny, 0.0, values)
    w = fold_by_abs(values, index_set)
    with np.errstate(all="ignore"):
        cum = np.cumsum(w)
    cps = dyadic_checkpoints(N)
    sums = tuple(float(cum[c]) for c in cps)
    incs = []
    for lo, hi in zip(cps, cps[1:]):
        with np.errstate(all="ignore"):
            incs.append(float(np.sum(w[lo + 1 : hi + 1])))
    finite = values[np.isfinite(values)]
    return PartialSumTrace(
        cps, sums, tuple(incs), float(finite.min()) if finite.size else float("nan"), negative, label
    )


def partial_sums(spec: MeasureFamilySpec, kind: SeriesKind, N: int | None = None) -> PartialSumTrace:
    N = spec.n_max if N is None else N
    if N > spec.n_max:
        raise DomainError("N exceeds the configured window")
    expr = summand_expr(spec, kind)
    values = evaluate_array(expr, spec.indices(N))
    return trace_from_values(values, spec.index_set, N, kind.label())


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class DivergenceVerdict:
    tag: str  # Diverges | Converges | Inconclusive
    method: str  # Symbolic | Numeric
    exponent: float | None = None
    remainder_bound: float | None = None
    grid_sampled: bool = False
    detail: str = ""

    @property
    def diverges(self) -> bool:
        return self.tag == "Diverges"

    @property
    def converges(self) -> bool:
        return self.tag == "Converges"

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "method": self.method}
        if self.exponent is not None:
            out["exponent"] = _json_float(self.exponent)
        if self.remainder_bound is not None:
            out["remainder_bound"] = _json_float(self.remainder_bound)
        if self.grid_sampled:
            out["grid_sampled"] = True
        if self.detail:
            out["detail"] = self.detail
        return out


def classify_symbolic(summand: Expr, index_set: str = "Z") -> DivergenceVerdict | None:
    """Leading-term rule on every ray; None when any ray is not expandable.

    A ray with leading order x^p e^(r x) contributes a divergent tail iff
    r > 0, or r = 0 and p >= -1. Exactly vanishing rays contribute nothing.
    """
    lead = leading_terms(summand, index_set)
    worst = None
    for ray, v in lead.items():
        if v is None:
            return None
        if v == "zero":
            continue
        key, coef = v
        if coef < 0:
            return None
        worst = key if worst is None else max(worst, key)
    if worst is None:
        return DivergenceVerdict("Converges", "Symbolic", exponent=float("-inf"), remainder_bound=0.0,
                                 detail="summand vanishes identically for large |n|")
    rate, p = worst
    exponent = float(p) if rate == 0 else (float("inf") if rate > 0 else float("-inf"))
    if rate > 0 or (rate == 0 and p >= -1):
        return DivergenceVerdict("Diverges", "Symbolic", exponent=exponent, detail=_order_text(worst))
    return DivergenceVerdict("Converges", "Symbolic", exponent=exponent, detail=_order_text(worst))


def _order_text(key) -> str:
    rate, p = key
    parts = []
    if p != 0:
        parts.append(f"|n|^{p}")
    if rate != 0:
        parts.append(f"exp({rate}|n|)")
    return "leading order " + ("*".join(parts) if parts else "constant")


def classify_trace(trace: PartialSumTrace, policy: DivergencePolicy = DEFAULT_POLICY) -> DivergenceVerdict:
    """Tail exponent p from a log-log fit of the dyadic block sums S_2N - S_N ~ N^(p+1)."""
    if len(trace.checkpoints) < policy.min_levels:
        return DivergenceVerdict("Inconclusive", "Numeric", detail="too few dyadic levels")
    if trace.negative_count:
        return DivergenceVerdict("Inconclusive", "Numeric", detail="negative summands")
    incs = np.asarray(trace.increments[-policy.fit_levels :], dtype=float)
    Ns = np.asarray(trace.checkpoints[:-1][-policy.fit_levels :], dtype=float)
    if np.isnan(incs).any() or np.isnan(trace.sums).any():
        return DivergenceVerdict("Inconclusive", "Numeric", detail="nan in trace")
    if np.isinf(incs).any() or np.isinf(trace.sums[-1]):
        return DivergenceVerdict("Diverges", "Numeric", exponent=float("inf"), detail="partial sums overflow")
    if np.all(incs == 0):
        return DivergenceVerdict("Converges", "Numeric", exponent=float("-inf"), remainder_bound=0.0)
    pos = incs > 0
    if pos.sum() < 3:
        return DivergenceVerdict("Inconclusive", "Numeric", detail="too few positive increments")
    if not pos[-1]:
        return DivergenceVerdict("Converges", "Numeric", exponent=float("-inf"), remainder_bound=0.0,
                                 detail="block sums underflow to zero")
    slope = float(np.polyfit(np.log(Ns[pos]), np.log(incs[pos]), 1)[0])
    p_hat = slope - 1.0
    if p_hat >= -1 + policy.delta:
        return DivergenceVerdict("Diverges", "Numeric", exponent=p_hat)
    if p_hat <= -1 - policy.delta:
        ratio = 2.0 ** (p_hat + 1)
        bound = float(incs[-1] * ratio / (1 - ratio))
        if math.isfinite(bound):
            return DivergenceVerdict("Converges", "Numeric", exponent=p_hat, remainder_bound=bound)
    return DivergenceVerdict("Inconclusive", "Numeric", exponent=p_hat, detail="exponent within delta of -1")


def classify(obj, index_set: str = "Z", n_max: int = 4096, policy: DivergencePolicy = DEFAULT_POLICY) -> DivergenceVerdict:
    """Classify a trace numerically, or a summand symbolically with numeric fallback."""
    if isinstance(obj, PartialSumTrace):
        return classify_trace(obj, policy)
    verdict = classify_symbolic(obj, index_set)
    if verdict is not None:
        return verdict
    ns = np.arange(-n_max, n_max + 1) if index_set == "Z" else np.arange(1, n_max + 1)
    trace = trace_from_values(evaluate_array(obj, ns), index_set, n_max)
    return classify_trace(trace, policy)


@dataclass(frozen=True)
class SeriesResult:
    kind: SeriesKind
    trace: PartialSumTrace
    verdict: DivergenceVerdict
    symbolic: bool = field(default=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind.label(), "verdict": self.verdict.to_dict(), "trace": self.trace.to_dict()}


def evaluate_series(spec: MeasureFamilySpec, kind: SeriesKind, policy: DivergencePolicy = DEFAULT_POLICY) -> SeriesResult:
    """Trace plus verdict; symbolic when the summand is expandable, else numeric."""
    expr = summand_expr(spec, kind)
    values = evaluate_array(expr, spec.indices())
    trace = trace_from_values(values, spec.index_set, spec.n_max, kind.label())
    verdict = classify_symbolic(expr, spec.index_set)
    if verdict is None:
        return SeriesResult(kind, trace, classify_trace(trace, policy), False)
    return SeriesResult(kind, trace, verdict, True)


def check_sigma1_sigma2_equivalence(spec: MeasureFamilySpec, s: float):
    """Verdicts of Sigma_1(s) and Sigma_2(s); agree iff both diverge or both converge."""
    if spec.m != 2:
        raise UnsupportedKindForM("the Sigma_1/Sigma_2 equivalence needs m = 2")
    _positive_s(s)
    v1 = evaluate_series(spec, Sigma1(s)).verdict
    v2 = evaluate_series(spec, Sigma2s(s)).verdict
    agree = v1.tag == v2.tag and v1.tag != "Inconclusive"
    return v1, v2, agree


# -- quantifiers ---------------------------------------------------------------


def combine_forall(verdicts: Sequence[DivergenceVerdict]) -> DivergenceVerdict:
    """'Diverges for every parameter' over sampled parameters."""
    conv = [v for v in verdicts if v.converges]
    if conv:
        sym = [v for v in conv if v.method == "Symbolic"]
        w = (sym or conv)[0]
        return DivergenceVerdict("Converges", w.method, w.exponent, w.remainder_bound, True, w.detail)
    if all(v.diverges for v in verdicts):
        method = "Symbolic" if all(v.method == "Symbolic" for v in verdicts) else "Numeric"
        return DivergenceVerdict("Diverges", method, grid_sampled=True)
    return DivergenceVerdict("Inconclusive", "Numeric", grid_sampled=True)


def _lead_by_ray(expr: Expr, index_set: str) -> dict:
    return leading_terms(expr, index_set)


def critical_t(spec: MeasureFamilySpec, k: int, n: int) -> list:
    """t where the leading orders of t*a_n and 2*a_k cancel on some ray."""
    la = _lead_by_ray(spec.a[n - 1], spec.index_set)
    lk = _lead_by_ray(spec.a[k - 1], spec.index_set)
    out = set()
    for ray in la:
        u, v = la[ray], lk[ray]
        if u in (None, "zero") or v in (None, "zero"):
            continue
        if u[0] == v[0]:
            out.add(round(2 * v[1] / u[1], 15))
    return sorted(out)


def critical_s(spec: MeasureFamilySpec) -> list:
    """s = (lim b2/b1)^(1/4) on rays where the ratio tends to a positive constant."""
    ratio = spec.b[1] / spec.b[0]
    out = set()
    for v in _lead_by_ray(ratio, spec.index_set).values():
        if v in (None, "zero"):
            continue
        key, c = v
        if key == (Fraction(0), Fraction(0)) and c > 0:
            out.add(round(c**0.25, 15))
    return sorted(out)


def critical_ratio(spec: MeasureFamilySpec, num: int, den: int) -> list:
    """Positive constants C with b_num - C b_den cancelling at leading order on some ray."""
    ratio = spec.b[num - 1] / spec.b[den - 1]
    out = set()
    for v in _lead_by_ray(ratio, spec.index_set).values():
        if v in (None, "zero"):
            continue
        key, c = v
        if key == (Fraction(0), Fraction(0)) and c > 0:
            out.add(round(c, 15))
    return sorted(out)


def _mean_leads(spec: MeasureFamilySpec):
    l1 = _lead_by_ray(spec.a[0], spec.index_set)
    l2 = _lead_by_ray(spec.a[1], spec.index_set)
    for ray in l1:
        u, v = l1[ray], l2[ray]
        if u in (None, "zero") or v in (None, "zero"):
            continue
        if u[0] == v[0]:
            yield u[1], v[1]


def critical_phi(spec: MeasureFamilySpec, s: float) -> list:
    """phi with sin(phi/2) a1 - s^2 cos(phi/2) a2 cancelling at leading order."""
    out = set()
    for c1, c2 in _mean_leads(spec):
        half = math.atan(s * s * c2 / c1) % math.pi
        out.add(round(2 * half, 15))
    return sorted(out)


def critical_C(spec: MeasureFamilySpec) -> list:
    """Unit directions (C1, C2) with C1 a1 + C2 a2 cancelling at leading order."""
    out = set()
    for c1, c2 in _mean_leads(spec):
        r = math.hypot(c1, c2)
        d = (c2 / r, -c1 / r)
        if d[0] < 0 or (d[0] == 0 and d[1] < 0):
            d = (-d[0], -d[1])
        out.add((round(d[0], 15), round(d[1], 15)))
    return sorted(out)


def merged(grid, extra) -> list:
    seen = []
    for x in list(grid) + list(extra):
        if not any(np.allclose(x, y, rtol=0, atol=1e-14) for y in seen):
            seen.append(x)
    return seen
