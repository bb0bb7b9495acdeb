"""Approximation criteria for m = 2 and the irreducibility verdict.

The criteria are growth statements about the statistic
Delta(f, g) = (Gamma(f) + Gamma(f, g)) / (Gamma(g) + 1) on explicit vector
families built from the measure parameters. The generator Gram matrices
factor as diag * D(lambda) * diag, so their quadratic forms reduce to the
closed form for D(lambda); a small Gaussian-moment calculus checks the
Gram entries themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    PrerequisiteNotMet,
    SingularGram,
    UnsupportedKindForM,
    UnsupportedTermShape,
)
from .identities import d_lambda, delta_functional, dist_to_line
from ._parallel import pmap
from .ortho import OrthogonalityReport, canonical_battery_m1, canonical_battery_m2
from .seqlang import Const, Expr, evaluate_array, leading_terms, parse_family, substitute
from .series import (
    DEFAULT_C_GRID,
    DEFAULT_POLICY,
    DivergencePolicy,
    DivergenceVerdict,
    Grids,
    MeasureFamilySpec,
    NormF,
    NormG,
    NormG1,
    NormG2,
    PartialSumTrace,
    RatioB12,
    RatioB21,
    Sigma1,
    Sigma2C,
    classify,
    classify_trace,
    combine_forall,
    critical_C,
    critical_s,
    dyadic_checkpoints,
    evaluate_series,
    merged,
)

MAX_WINDOW = 64
COND_LIMIT = 1e13


def _window_spec(spec: MeasureFamilySpec, N: int | None) -> MeasureFamilySpec:
    if N is None or N == spec.n_max:
        return spec
    return MeasureFamilySpec(spec.m, N, spec.b, spec.a, spec.index_set)


def _need_m2(spec: MeasureFamilySpec, what: str):
    if spec.m != 2:
        raise UnsupportedKindForM(f"{what} needs m = 2 (got m = {spec.m})")


# -- criterion vectors ---------------------------------------------------------

_VECTOR_TEMPLATES = {
    "f1": "b1 / (b1^2 + 2*b1*b2)^(1/2)",
    "g1": "b2 / (b1^2 + 2*b1*b2)^(1/2)",
    "f2": "b2 / (b2^2 + 2*b1*b2)^(1/2)",
    "g2": "b1 / (b2^2 + 2*b1*b2)^(1/2)",
    "f": "a1 / (1/(2*b1) + 1/(2*b2))^(1/2)",
    "g": "a2 / (1/(2*b1) + 1/(2*b2))^(1/2)",
}


def vector_exprs(spec: MeasureFamilySpec) -> dict:
    """Component formulas of f1, g1, f2, g2, f, g as expressions in n."""
    _need_m2(spec, "criterion vectors")
    rows = spec.row_mapping()
    return {
        name: substitute(parse_family(text, variables=("b1", "b2", "a1", "a2")), rows)
        for name, text in _VECTOR_TEMPLATES.items()
    }


def _values(expr: Expr, ns: np.ndarray):
    """Float values, or an mpf object array when float64 overflows."""
    v = evaluate_array(expr, ns)
    if np.isfinite(v).all():
        return v
    return evaluate_array(expr, ns, exact=True)


@dataclass
class CriterionVectors:
    """The six vector families on the window |k| <= N (k = 1..N on the index set N)."""

    N: int
    indices: np.ndarray
    f1: np.ndarray
    g1: np.ndarray
    f2: np.ndarray
    g2: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @classmethod
    def materialize(cls, spec: MeasureFamilySpec, N: int | None = None) -> "CriterionVectors":
        N = spec.n_max if N is None else N
        ns = spec.indices(N)
        ex = vector_exprs(spec)
        return cls(N, ns, **{k: _values(e, ns) for k, e in ex.items()})

    def pair(self, which: str):
        return {
            "XX1": (self.f1, self.g1),
            "XX2": (self.f2, self.g2),
            "D1": (self.f, self.g),
            "D2": (self.g, self.f),
        }[which]


# -- Delta traces ----------------------------------------------------------------

CRITERIA = ("XX1", "XX2", "D1", "D2")


def _window_mask(indices: np.ndarray, N: int) -> np.ndarray:
    return np.abs(indices) <= N


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def delta_trace(f, g, indices, checkpoints, label: str = "",
                policy: DivergencePolicy = DEFAULT_POLICY) -> PartialSumTrace:
    """Delta(f_(N), g_(N)) at each checkpoint N, packed as a pseudo partial-sum trace.

    Increments are differences of consecutive Delta values. A dip smaller
    than the policy's dip tolerance (relative to the earlier value) is
    clamped to zero; a larger dip is recorded as a negative increment.
    """
    deltas = []
    for N in checkpoints:
        mask = _window_mask(indices, N)
        deltas.append(delta_functional(f[mask], g[mask]))
    vals = [_to_float(d) for d in deltas]
    incs, negative = [], 0
    for prev, cur in zip(deltas, deltas[1:]):
        d = cur - prev
        if d < 0:
            if -d <= policy.dip_tolerance * abs(prev):
                d = 0
            else:
                negative += 1
        incs.append(_to_float(d))
    finite = [x for x in incs if math.isfinite(x)]
    return PartialSumTrace(tuple(checkpoints), tuple(vals), tuple(incs),
                           min(finite) if finite else math.nan, negative, label)


@dataclass(frozen=True)
class DeltaResult:
    which: str
    trace: PartialSumTrace
    verdict: DivergenceVerdict

    @property
    def tends_to_infinity(self) -> bool:
        return self.verdict.diverges

    def to_dict(self) -> dict:
        return {"criterion": self.which, "trace": self.trace.to_dict(), "verdict": self.verdict.to_dict()}


def criterion_delta(spec: MeasureFamilySpec, which: str, N: int | None = None,
                    policy: DivergencePolicy = DEFAULT_POLICY,
                    vectors: CriterionVectors | None = None) -> DeltaResult:
    """Delta trace of XX1 = Delta(f1, g1), XX2 = Delta(f2, g2), D1 = Delta(f, g), D2 = Delta(g, f).

    Diverges means Delta tends to infinity; Converges means it stays bounded.
    """
    _need_m2(spec, "criterion_delta")
    if which not in CRITERIA:
        raise UnsupportedKindForM(f"unknown criterion {which!r}; expected one of {CRITERIA}")
    N = spec.n_max if N is None else N
    vec = vectors if vectors is not None and vectors.N >= N else CriterionVectors.materialize(spec, N)
    f, g = vec.pair(which)
    trace = delta_trace(f, g, vec.indices, dyadic_checkpoints(N), f"Delta {which}", policy)
    return DeltaResult(which, trace, classify_delta_trace(trace, policy))


def classify_delta_trace(trace: PartialSumTrace, policy: DivergencePolicy = DEFAULT_POLICY) -> DivergenceVerdict:
    """Diverges when Delta grows like a divergent partial sum; Converges when it levels off.

    Increments below rounding level (1e-12 relative to Delta) count as zero, so
    a Delta that settles to a constant within the window is bounded.
    """
    if trace.negative_count == 0 and len(trace.checkpoints) >= policy.min_levels:
        incs = np.asarray(trace.increments, dtype=float)
        level = np.abs(np.asarray(trace.sums[1:], dtype=float))
        flat = incs <= 1e-12 * level
        if flat[-2:].all():
            return DivergenceVerdict("Converges", "Numeric", exponent=float("-inf"), remainder_bound=0.0,
                                     detail="Delta constant to rounding over the last levels")
    return classify_trace(trace, policy)


def ratio_test(spec: MeasureFamilySpec, which: str, N: int | None = None,
               policy: DivergencePolicy = DEFAULT_POLICY) -> DivergenceVerdict:
    """Verdict on sum b1/b2 (B12) or sum b2/b1 (B21)."""
    _need_m2(spec, "ratio_test")
    kind = {"B12": RatioB12, "B21": RatioB21}.get(which)
    if kind is None:
        raise UnsupportedKindForM(f"unknown ratio {which!r}; expected B12 or B21")
    return evaluate_series(_window_spec(spec, N), kind, policy).verdict


# -- generator Gram matrices -----------------------------------------------------


class GramResult(NamedTuple):
    matrix: np.ndarray
    closed_form_quadform: float
    oracle_quadform: float


def _window_indices(window) -> np.ndarray:
    if isinstance(window, (int, np.integer)):
        w = int(window)
        idx = np.arange(w) - w // 2
    else:
        idx = np.asarray(list(window), dtype=int)
    if idx.size < 1:
        raise LengthMismatch("window is empty")
    if idx.size > MAX_WINDOW:
        raise LengthMismatch(f"window size {idx.size} exceeds {MAX_WINDOW}")
    return idx


def gram_parameters(spec: MeasureFamilySpec, lemma: str, window):
    """(matrix, rhs, lam, mu, (s, v)) for the lemma's Gram matrix on the window.

    D1: A_kk = 1/(2b1)+1/(2b2)+a2^2, A_kr = a2_k a2_r, rhs a1,
        lam = (1/(2b1)+1/(2b2))/a2^2, mu = a1/a2.
    XX1: A_kk = (b1+b2)^2, A_kr = b2_k b2_r, rhs b1,
        lam = (1+b1/b2)^2 - 1, mu = b1/b2.
    D2 and XX2 swap the two rows. lam and mu are None when a mean
    component vanishes (the factorization needs a nonzero diagonal); the
    last entry is then the split A = diag(s) + v v^T used by the Delta route.
    """
    _need_m2(spec, "generator_gram")
    idx = _window_indices(window)
    b = [evaluate_array(e, idx) for e in spec.b]
    a = [evaluate_array(e, idx) for e in spec.a]
    if lemma in ("D2", "XX2"):
        b, a = b[::-1], a[::-1]
    if lemma in ("D1", "D2"):
        s = 1 / (2 * b[0]) + 1 / (2 * b[1])
        A = np.outer(a[1], a[1]) + np.diag(s)
        rhs = a[0]
        if np.all(a[1] != 0):
            lam, mu = s / a[1] ** 2, a[0] / a[1]
        else:
            lam = mu = None
        return A, rhs, lam, mu, (s, a[1])
    if lemma in ("XX1", "XX2"):
        A = np.outer(b[1], b[1])
        A[np.diag_indices_from(A)] = (b[0] + b[1]) ** 2
        r = b[0] / b[1]
        # (1 + r)^2 - 1 written without cancellation for small r
        return A, b[0], r * (2 + r), r, None
    raise UnsupportedKindForM(f"unknown lemma {lemma!r}")


def generator_gram(spec: MeasureFamilySpec, lemma: str, window) -> GramResult:
    """Gram matrix of the lemma's functionals and (A^{-1} b, b) by two routes.

    The closed form is (D(lam)^{-1} mu, mu); where a mean component vanishes
    it is Delta(a1/sqrt(s), a2/sqrt(s)), the same quantity by the
    Sherman-Morrison formula. The oracle is a dense LU solve.
    """
    A, rhs, lam, mu, split = gram_parameters(spec, lemma, window)
    if lam is not None:
        closed = d_lambda(lam, mu)[1]
    else:
        s, v = split
        closed = delta_functional(rhs / np.sqrt(s), v / np.sqrt(s))
    try:
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SingularGram(f"Gram matrix is numerically singular (cond = {cond:.3g})")
        oracle = float(rhs @ np.linalg.solve(A, rhs))
    except np.linalg.LinAlgError as exc:
        raise SingularGram("Gram matrix is singular") from exc
    return GramResult(A, float(closed), oracle)


# -- Gaussian moment calculus ----------------------------------------------------


@dataclass(frozen=True)
class Factor:
    kind: str  # "x" multiplies by the coordinate, "D" is d/dx - b (x - a)
    row: int
    index: int

    @property
    def var(self) -> tuple:
        return (self.row, self.index)


class OpTerm:
    """Linear combination of words in x_{rk} and D_{rk}, applied right to left to 1."""

    def __init__(self, terms: dict | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c != 0}

    @staticmethod
    def scalar(c) -> "OpTerm":
        return OpTerm({(): c})

    def __add__(self, other):
        other = _as_term(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return OpTerm(out)

    __radd__ = __add__

    def __neg__(self):
        return OpTerm({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_term(other))

    def __rsub__(self, other):
        return _as_term(other) - self

    def __mul__(self, other):
        other = _as_term(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return OpTerm(out)

    def __rmul__(self, other):
        return _as_term(other) * self

    def __repr__(self):
        parts = []
        for w, c in self.terms.items():
            word = "".join(f"{f.kind}{f.row}{f.index}" for f in w) or "1"
            parts.append(f"{c}*{word}")
        return " + ".join(parts) or "0"


def _as_term(x) -> OpTerm:
    return x if isinstance(x, OpTerm) else OpTerm.scalar(x)


def X(row: int, index: int) -> OpTerm:
    return OpTerm({(Factor("x", row, index),): 1})


def D(row: int, index: int) -> OpTerm:
    return OpTerm({(Factor("D", row, index),): 1})


def _exact(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return Fraction(int(v))
    return v


def _check_shape(word):
    nx = sum(1 for f in word if f.kind == "x")
    nd = len(word) - nx
    if nx > 2 or nd > 2:
        raise UnsupportedTermShape(f"word with {nx} coordinate and {nd} D factors (limit 2 and 2)")


# Polynomials in the centered variables y_v = x_v - a_v: {monomial: coef},
# monomial = sorted tuple of (var, power).


def _mono_mul(m: tuple, var, p: int = 1) -> tuple:
    d = dict(m)
    d[var] = d.get(var, 0) + p
    return tuple(sorted(d.items()))


def _apply_word(word, blocks) -> dict:
    poly = {(): Fraction(1)}
    for fac in reversed(word):
        b, a = blocks[fac.var]
        out: dict = {}
        for mono, c in poly.items():
            if fac.kind == "x":
                terms = [(_mono_mul(mono, fac.var), c)]
                if a != 0:
                    terms.append((mono, c * a))
            else:
                terms = []
                d = dict(mono)
                e = d.get(fac.var, 0)
                if e:
                    d[fac.var] = e - 1
                    if d[fac.var] == 0:
                        del d[fac.var]
                    terms.append((tuple(sorted(d.items())), c * e))
                terms.append((_mono_mul(mono, fac.var), -c * b))
            for mm, cc in terms:
                out[mm] = out.get(mm, 0) + cc
        poly = {k: v for k, v in out.items() if v != 0}
    return poly


def _apply(term: OpTerm, blocks) -> dict:
    poly: dict = {}
    for word, c in term.terms.items():
        _check_shape(word)
        for mono, cc in _apply_word(word, blocks).items():
            poly[mono] = poly.get(mono, 0) + c * cc
    return poly


def _moment(b, e: int):
    """E[y^e] for y centered normal with variance 1/(2b)."""
    if e % 2:
        return 0
    j = e // 2
    dfact = 1
    for i in range(1, 2 * j, 2):
        dfact *= i
    return dfact * (1 / (2 * b)) ** j if j else 1


def moment_inner_product(term_left: OpTerm, term_right: OpTerm, blocks: dict):
    """(term_left 1, term_right 1) in L^2 of the product Gaussian measure.

    ``blocks`` maps (row, index) to (b, a) for every variable used; the
    variable (row, index) is normal with mean a and variance 1/(2b),
    independent of the others. Integer and Fraction inputs give exact
    Fraction results.
    """
    blocks = {k: (_exact(b), _exact(a)) for k, (b, a) in blocks.items()}
    for t in (term_left, term_right):
        for word in t.terms:
            for f in word:
                if f.var not in blocks:
                    raise UnsupportedTermShape(f"no block for variable x_{f.row}{f.index}")
    p = _apply(_as_term(term_left), blocks)
    q = _apply(_as_term(term_right), blocks)
    total = 0
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            d = dict(m1)
            for v, e in m2:
                d[v] = d.get(v, 0) + e
            val = c1 * c2
            for v, e in d.items():
                val = val * _moment(blocks[v][0], e)
                if val == 0:
                    break
            total += val
    return total


def d1_functional(k: int, n: int, blocks: dict) -> OpTerm:
    """[(x_1k - a_1k) D_1n + x_2k D_2n] applied to 1."""
    a1k = blocks[(1, k)][1]
    return (X(1, k) - a1k) * D(1, n) + X(2, k) * D(2, n)


def xx1_functional(k: int, n: int, t: int, blocks: dict) -> OpTerm:
    """x_1n x_1t (D_1k^2 + b_1k/2) + (x_1n x_2t + x_2n x_1t) D_1k D_2k + x_2n x_2t D_2k^2."""
    b1k = blocks[(1, k)][0]
    return (X(1, n) * X(1, t) * (D(1, k) * D(1, k) + _exact(b1k) / 2)
            + (X(1, n) * X(2, t) + X(2, n) * X(1, t)) * D(1, k) * D(2, k)
            + X(2, n) * X(2, t) * D(2, k) * D(2, k))


def d1_gram_entry(k: int, r: int, n: int, blocks: dict):
    """Exact (f_k, f_r) for the D1 functionals."""
    bb = {key: (_exact(b), _exact(a)) for key, (b, a) in blocks.items()}
    b1n, b2n = bb[(1, n)][0], bb[(2, n)][0]
    if k == r:
        b1k, _ = bb[(1, k)]
        b2k, a2k = bb[(2, k)]
        return (1 / (2 * b1k)) * (b1n / 2) + (1 / (2 * b2k) + a2k**2) * (b2n / 2)
    return bb[(2, k)][1] * bb[(2, r)][1] * b2n / 2


def xx1_gram_entry(k: int, r: int, n: int, t: int, blocks: dict):
    """Exact (f_k, f_r) for the XX1 functionals, with c_v = 1/(2b_v) + a_v^2."""
    bb = {key: (_exact(b), _exact(a)) for key, (b, a) in blocks.items()}

    def c(row, i):
        b, a = bb[(row, i)]
        return 1 / (2 * b) + a**2

    if k == r:
        h1, h2 = bb[(1, k)][0] / 2, bb[(2, k)][0] / 2
        a1n, a2n, a1t, a2t = bb[(1, n)][1], bb[(2, n)][1], bb[(1, t)][1], bb[(2, t)][1]
        return (2 * c(1, n) * c(1, t) * h1**2
                + (c(1, n) * c(2, t) + c(1, t) * c(2, n) + 2 * a1n * a2t * a1t * a2n) * h1 * h2
                + 3 * c(2, n) * c(2, t) * h2**2)
    return c(2, n) * c(2, t) * bb[(2, k)][0] * bb[(2, r)][0] / 4


# -- projection growth -------------------------------------------------------------


@dataclass
class ProjectionGrowthReport:
    Ns: tuple
    ratio_fg: tuple  # Gamma(f, g) / Gamma(g): squared distance of f from the line of g
    ratio_gf: tuple  # Gamma(f, g) / Gamma(f)
    monotone_fraction_fg: float
    monotone_fraction_gf: float
    growth_fg: float  # last / first
    growth_gf: float
    prerequisites: dict = field(default_factory=dict)

    @property
    def passes(self) -> bool:
        return self.growth_fg > 10 and self.growth_gf > 10

    def to_dict(self) -> dict:
        return {
            "Ns": list(self.Ns),
            "ratio_fg": list(self.ratio_fg),
            "ratio_gf": list(self.ratio_gf),
            "monotone_fraction_fg": self.monotone_fraction_fg,
            "monotone_fraction_gf": self.monotone_fraction_gf,
            "growth_fg": self.growth_fg,
            "growth_gf": self.growth_gf,
            "passes": self.passes,
            "prerequisites": self.prerequisites,
        }


def _combo_directions(f: Expr, g: Expr, index_set: str) -> list:
    lf, lg = leading_terms(f, index_set), leading_terms(g, index_set)
    out = []
    for ray in lf:
        u, v = lf[ray], lg[ray]
        if u in (None, "zero") or v in (None, "zero") or u[0] != v[0]:
            continue
        r = math.hypot(u[1], v[1])
        d = (-v[1] / r, u[1] / r)
        if d[0] < 0 or (d[0] == 0 and d[1] < 0):
            d = (-d[0], -d[1])
        out.append((round(d[0], 15), round(d[1], 15)))
    return out


def _fraction_up(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return 1.0
    return float(np.mean(np.diff(x) > 0))


def projection_growth_check(f: Expr, g: Expr, Ns: Sequence[int] | None = None,
                            policy: DivergencePolicy = DEFAULT_POLICY,
                            C_grid=DEFAULT_C_GRID) -> ProjectionGrowthReport:
    """Growth of Gamma(f_(n), g_(n)) / Gamma(g_(n)) and the symmetric ratio, k = 1..n.

    Requires |f|^2 = |g|^2 = |C1 f + C2 g|^2 = inf for all directions on the
    C-grid plus the directions cancelling the leading terms.
    """
    Ns = tuple(sorted(Ns)) if Ns is not None else dyadic_checkpoints(4096)
    n_max = max(Ns)
    prereq = {}
    checks = [("|f|^2", f * f), ("|g|^2", g * g)]
    for c1, c2 in merged(C_grid, _combo_directions(f, g, "N")):
        combo = Const(c1) * f + Const(c2) * g
        checks.append((f"|{c1:.6g} f + {c2:.6g} g|^2", combo * combo))
    for name, summand in checks:
        v = classify(summand, "N", max(n_max, 4096), policy)
        prereq[name] = v.tag
        if not v.diverges:
            raise PrerequisiteNotMet(f"{name} is not established to diverge ({v.tag})")
    ks = np.arange(1, n_max + 1)
    fv, gv = _values(f, ks), _values(g, ks)
    r_fg, r_gf = [], []
    for n in Ns:
        fn, gn = fv[:n], gv[:n]
        r_fg.append(_to_float(dist_to_line(fn, gn)))
        r_gf.append(_to_float(dist_to_line(gn, fn)))
    growth = [x[-1] / x[0] if x[0] > 0 else math.inf for x in (r_fg, r_gf)]
    return ProjectionGrowthReport(Ns, tuple(r_fg), tuple(r_gf), _fraction_up(r_fg), _fraction_up(r_gf),
                                  growth[0], growth[1], prereq)


# -- case classification -------------------------------------------------------------


@dataclass
class CaseTag:
    tableI: str  # 1 | 2 | 3a | 3b | 3c | Inconclusive
    tableII: str  # 1 | 2 | 3a | 3b | 3c | 4 | Inconclusive
    split: str  # A | B | NotApplicable
    approximable: str  # (x1,x2) | (x1,D2) | (D1,x2) | (D1,D2) | Undetermined
    flags: tuple = ()  # operators approximated on the way, e.g. ("x2",)
    notes: tuple = ()
    verdicts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tableI": self.tableI,
            "tableII": self.tableII,
            "split": self.split,
            "approximable": self.approximable,
            "flags": list(self.flags),
            "notes": list(self.notes),
            "verdicts": {k: v.to_dict() for k, v in sorted(self.verdicts.items())},
        }


def _table_i(v: dict) -> str:
    s12, s21 = v["Sigma12"], v["Sigma21"]
    if s12.converges:
        return "1"
    if s21.converges:
        return "2"
    if not (s12.diverges and s21.diverges):
        return "Inconclusive"
    if v["NormG1"].converges:
        return "3a"
    if v["NormG2"].converges:
        return "3b"
    if v["NormG1"].diverges and v["NormG2"].diverges:
        return "3c"
    return "Inconclusive"


def _max_key(expr: Expr, index_set: str):
    worst = None
    for lead in leading_terms(expr, index_set).values():
        if lead is None:
            return None
        if lead == "zero":
            continue
        worst = lead[0] if worst is None else max(worst, lead[0])
    return worst


def _ratio_branch(spec: MeasureFamilySpec, rf, rg, policy: DivergencePolicy) -> tuple[str, str]:
    """3a / 3b / 3c for |f_m|^2 / |g_m|^2 when both norms diverge."""
    from .series import summand_expr

    if rf.symbolic and rg.symbolic:
        kf = _max_key(summand_expr(spec, NormF), spec.index_set)
        kg = _max_key(summand_expr(spec, NormG), spec.index_set)
        if kf is not None and kg is not None:
            if kf > kg:
                return "3a", "Symbolic"
            if kf < kg:
                return "3b", "Symbolic"
            return "3c", "Symbolic"
    sf = np.asarray(rf.trace.sums, dtype=float)
    sg = np.asarray(rg.trace.sums, dtype=float)
    Ns = np.asarray(rf.trace.checkpoints, dtype=float)
    with np.errstate(all="ignore"):
        ratio = sf / sg
    keep = np.isfinite(ratio) & (ratio > 0)
    if keep.sum() < policy.min_levels:
        return "Inconclusive", "Numeric"
    x, y = np.log(Ns[keep])[-policy.fit_levels:], np.log(ratio[keep])[-policy.fit_levels:]
    slope = float(np.polyfit(x, y, 1)[0])
    if slope > policy.delta:
        return "3a", "Numeric"
    if slope < -policy.delta:
        return "3b", "Numeric"
    return "3c", "Numeric"


def _table_ii(spec, rf, rg, policy) -> tuple[str, str]:
    f, g = rf.verdict, rg.verdict
    if f.diverges and g.converges:
        return "1", ""
    if f.converges and g.diverges:
        return "2", ""
    if f.converges and g.converges:
        return "4", ""
    if f.diverges and g.diverges:
        tag, method = _ratio_branch(spec, rf, rg, policy)
        return tag, f"ratio |f_m|^2/|g_m|^2 decided {method.lower()}ally"
    return "Inconclusive", ""


def _split(spec: MeasureFamilySpec, grids: Grids, policy: DivergencePolicy, verdicts: dict) -> str:
    ss = merged(grids.s, critical_s(spec))
    res = pmap(lambda s: evaluate_series(spec, Sigma1(s), policy), ss)
    vA = combine_forall([r.verdict for r in res])
    verdicts["Sigma1(all s)"] = vA
    if vA.diverges:
        return "A"
    if not vA.converges:
        return "Inconclusive"
    cs = merged(grids.C, critical_C(spec))
    res = pmap(lambda c: evaluate_series(spec, Sigma2C(*c), policy), cs)
    vB = combine_forall([r.verdict for r in res])
    verdicts["Sigma2(all C)"] = vB
    if vB.diverges:
        return "B"
    return "Inconclusive" if not vB.converges else "Neither"


def _approximable(tI: str, tII: str, split: str) -> tuple[str, tuple, tuple]:
    if tI == "1":
        return "(D1,D2)", ("x2",), ()
    if tI == "2":
        return "(D1,D2)", ("x1",), ()
    if tI.startswith("3") and split == "A":
        return "(x1,x2)", (), ()
    if split == "B":
        if tII == "3c":
            return "(D1,D2)", (), ()
        if tII in ("1", "3a"):
            return "(D1,x2)", ("D1", "x1"), ("second row by the m = 1 reduction",)
        if tII in ("2", "3b"):
            return "(x1,D2)", ("D2", "x2"), ("first row by the m = 1 reduction",)
        if tII == "4":
            return "Undetermined", (), ("split B with table II case 4 is not realizable under full orthogonality",)
    return "Undetermined", (), ()


def classify_case(spec: MeasureFamilySpec, N: int | None = None, grids: Grids = Grids(),
                  policy: DivergencePolicy = DEFAULT_POLICY,
                  battery: OrthogonalityReport | None = None) -> CaseTag:
    """Tables I and II, the (A, B) split and the approximable operator pair."""
    _need_m2(spec, "classify_case")
    spec = _window_spec(spec, N)
    if battery is None:
        battery = canonical_battery_m2(spec, grids=grids, policy=policy)
    kinds = {"Sigma12": RatioB12, "Sigma21": RatioB21, "NormG1": NormG1, "NormG2": NormG2,
             "NormF": NormF, "NormG": NormG}
    names = sorted(kinds)
    results = dict(zip(names, pmap(lambda k: evaluate_series(spec, kinds[k], policy), names)))
    verdicts = {k: r.verdict for k, r in results.items()}
    tI = _table_i(verdicts)
    tII, how = _table_ii(spec, results["NormF"], results["NormG"], policy)
    notes = [how] if how else []
    if not battery.all_orthogonal:
        notes.append(f"battery is {battery.overall}; split not applicable")
        return CaseTag(tI, tII, "NotApplicable", "Undetermined", (), tuple(notes), verdicts)
    split = _split(spec, grids, policy, verdicts)
    if split in ("Inconclusive", "Neither"):
        notes.append("split undecided: " + ("inconclusive series" if split == "Inconclusive"
                                            else "neither Sigma1 nor Sigma2 diverges on the grids"))
        split = "NotApplicable"
    if "Inconclusive" in (tI, tII):
        return CaseTag(tI, tII, split, "Undetermined", (), tuple(notes + ["inconclusive table entry"]), verdicts)
    pair, flags, extra = _approximable(tI, tII, split)
    return CaseTag(tI, tII, split, pair, flags, tuple(notes) + extra, verdicts)


# -- irreducibility ---------------------------------------------------------------------


@dataclass
class IrreducibilityReport:
    m: int
    orthogonality: OrthogonalityReport
    case: CaseTag | None
    verdict: str  # Irreducible | NotIrreducible | Inconclusive
    deltas: list = field(default_factory=list)  # DeltaResult

    def to_dict(self, traces: bool = False) -> dict:
        return {
            "m": self.m,
            "verdict": self.verdict,
            "orthogonality": self.orthogonality.to_dict(traces),
            "case": self.case.to_dict() if self.case is not None else None,
            "criteria": [d.to_dict() for d in self.deltas],
        }


def _verdict_from(report: OrthogonalityReport) -> str:
    if report.all_orthogonal and not report.has_inconclusive:
        return "Irreducible"
    if report.any_equivalent:
        return "NotIrreducible"
    return "Inconclusive"


def irreducibility_verdict(spec: MeasureFamilySpec, N: int | None = None, grids: Grids = Grids(),
                           policy: DivergencePolicy = DEFAULT_POLICY,
                           diagnostics: bool = True) -> IrreducibilityReport:
    """Irreducible iff the canonical battery is all-orthogonal (m = 1 or 2)."""
    spec = _window_spec(spec, N)
    if spec.m == 1:
        battery = canonical_battery_m1(spec, policy=policy)
        return IrreducibilityReport(1, battery, None, _verdict_from(battery))
    if spec.m != 2:
        raise UnsupportedKindForM(f"irreducibility verdicts cover m = 1 and m = 2 (got m = {spec.m})")
    battery = canonical_battery_m2(spec, grids=grids, policy=policy)
    case = classify_case(spec, grids=grids, policy=policy, battery=battery)
    deltas = []
    if diagnostics:
        vec = CriterionVectors.materialize(spec)
        deltas = pmap(lambda w: criterion_delta(spec, w, policy=policy, vectors=vec), CRITERIA)
    return IrreducibilityReport(2, battery, case, _verdict_from(battery), deltas)
