"""Orthogonality of left translates mu^{L_t} and mu.

For a block-diagonal family the translate is orthogonal to the original
iff sum_n (H_n^{-2} - 1) or the mean-shift series diverges. For m = 2 the
question over all of GL(2) reduces to five explicit conditions on a
canonical family of test elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularMatrix, UnsupportedGroup, UnsupportedKindForM
from .gaussian import x_matrix
from .identities import det_I_plus_XtX
from ._parallel import pmap
from .seqlang import eval_family
from .series import (
    DEFAULT_POLICY,
    DivergencePolicy,
    DivergenceVerdict,
    Grids,
    HellingerCentered,
    MeanShift,
    MeasureFamilySpec,
    SeriesResult,
    SL,
    SL11,
    SLminus,
    Sigma12minus,
    combine_forall,
    critical_phi,
    critical_s,
    critical_t,
    evaluate_series,
    merged,
    snap,
)

DET_TOL = 1e-9


# -- test elements -------------------------------------------------------------


@dataclass(frozen=True)
class TestElement:
    label: str
    params: tuple  # ((name, value), ...)
    matrix: tuple  # row-major nested tuples

    __test__ = False  # not a pytest class

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def describe(self) -> str:
        if not self.params:
            return self.label
        return f"{self.label}(" + ",".join(f"{k}={v:.6g}" for k, v in self.params) + ")"


def _elem(label, params, M) -> TestElement:
    return TestElement(label, tuple(params), tuple(map(tuple, np.asarray(M, dtype=float).tolist())))


def E12(t: float) -> TestElement:
    return _elem("E12", [("t", t)], [[1, t], [0, 1]])


def E21(t: float) -> TestElement:
    return _elem("E21", [("t", t)], [[1, 0], [t, 1]])


def E12P1(t: float) -> TestElement:
    """exp(t E12) P1 with P1 = diag(-1, 1)."""
    return _elem("E12P1", [("t", t)], [[-1, t], [0, 1]])


def E21P2(t: float) -> TestElement:
    """exp(t E21) P2 with P2 = diag(1, -1)."""
    return _elem("E21P2", [("t", t)], [[1, 0], [t, -1]])


def tau_minus(phi: float, s: float) -> TestElement:
    c, sn = snap(math.cos(phi)), snap(math.sin(phi))
    return _elem("TauMinus", [("phi", phi), ("s", s)], [[c, s * s * sn], [sn / (s * s), -c]])


def tau_minus_factorized(phi: float, s: float) -> np.ndarray:
    """diag(s, 1/s) R(phi) diag(1/s, s) P2."""
    c, sn = math.cos(phi), math.sin(phi)
    R = np.array([[c, -sn], [sn, c]])
    return np.diag([s, 1 / s]) @ R @ np.diag([1 / s, s]) @ np.diag([1.0, -1.0])


def diag_element(a: float) -> TestElement:
    return _elem("Diag", [("a", a)], [[a, 0], [0, 1 / a]])


def generic(M) -> TestElement:
    return _elem("Generic", [], M)


def unipotent(m: int, k: int, n: int, t: float) -> TestElement:
    """I + t E_kn (1-based k, n)."""
    M = np.eye(m)
    M[k - 1, n - 1] += t
    label = "E12" if (m, k, n) == (2, 1, 2) else "E21" if (m, k, n) == (2, 2, 1) else f"E{k}{n}"
    return _elem(label, [("t", t)], M)


def unipotent_reflection(m: int, k: int, n: int, t: float) -> TestElement:
    """exp(t E_kn) P_k with P_k = I - 2 E_kk."""
    M = np.eye(m)
    M[k - 1, n - 1] += t
    P = np.eye(m)
    P[k - 1, k - 1] = -1
    label = "E12P1" if (m, k, n) == (2, 1, 2) else "E21P2" if (m, k, n) == (2, 2, 1) else f"E{k}{n}P{k}"
    return _elem(label, [("t", t)], M @ P)


# -- reports -------------------------------------------------------------------


def _element_tag(v: DivergenceVerdict) -> str:
    return {"Diverges": "Orthogonal", "Converges": "Equivalent"}.get(v.tag, "Inconclusive")


@dataclass
class ConditionResult:
    name: str
    description: str
    verdict: DivergenceVerdict
    series: list = field(default_factory=list)  # SeriesResult
    failing: str = ""

    @property
    def tag(self) -> str:
        return _element_tag(self.verdict)

    def to_dict(self, traces: bool = False) -> dict:
        out = {
            "condition": self.name,
            "description": self.description,
            "verdict": self.tag,
            "series_verdict": self.verdict.to_dict(),
            "series": [
                (r.to_dict() if traces else {"kind": r.kind.label(), "verdict": r.verdict.to_dict()})
                for r in self.series
            ],
        }
        if self.failing:
            out["failing"] = self.failing
        return out


@dataclass
class OrthogonalityReport:
    conditions: list

    @property
    def all_orthogonal(self) -> bool:
        return all(c.tag == "Orthogonal" for c in self.conditions)

    @property
    def any_equivalent(self) -> bool:
        return any(c.tag == "Equivalent" for c in self.conditions)

    @property
    def overall(self) -> str:
        if self.all_orthogonal:
            return "AllOrthogonal"
        if self.any_equivalent:
            return "SomeEquivalent"
        return "Inconclusive"

    @property
    def has_inconclusive(self) -> bool:
        return any(c.tag == "Inconclusive" for c in self.conditions)

    def to_dict(self, traces: bool = False) -> dict:
        return {
            "overall": self.overall,
            "all_orthogonal": self.all_orthogonal,
            "conditions": [c.to_dict(traces) for c in self.conditions],
        }


# -- general criterion ---------------------------------------------------------


def orthogonal_general(spec: MeasureFamilySpec, t, N: int | None = None,
                       policy: DivergencePolicy = DEFAULT_POLICY) -> ConditionResult:
    """Verdict for mu^{L_t} vs mu from the Hellinger and mean-shift series."""
    if isinstance(t, TestElement):
        name, t = t.describe(), t.array
    else:
        name = "t"
    t = np.asarray(t, dtype=float)
    det = float(np.linalg.det(t))
    if abs(det) <= 1e-12 * max(1.0, float(np.linalg.norm(t)) ** t.shape[0]):
        raise SingularMatrix("t is singular")
    if spec.m > 8:
        raise UnsupportedKindForM("orthogonal_general supports m <= 8")
    if abs(abs(det) - 1.0) > DET_TOL:
        v = DivergenceVerdict("Diverges", "Symbolic", exponent=0.0,
                              detail=f"|det t| = {abs(det):.6g} != 1: constant term (1 - |det t|)^2 > 0")
        return ConditionResult(name, "|det t| != 1", v)
    spec_n = spec if N is None or N == spec.n_max else _with_window(spec, N)
    results = [evaluate_series(spec_n, HellingerCentered(t), policy), evaluate_series(spec_n, MeanShift(t), policy)]
    tags = [r.verdict.tag for r in results]
    if "Diverges" in tags:
        v = next(r.verdict for r in results if r.verdict.diverges)
    elif all(x == "Converges" for x in tags):
        v = results[0].verdict if results[0].verdict.method == "Numeric" else results[1].verdict
    else:
        v = DivergenceVerdict("Inconclusive", "Numeric")
    return ConditionResult(name, "Hellinger series + mean-shift series", v, results)


def _with_window(spec: MeasureFamilySpec, N: int) -> MeasureFamilySpec:
    return MeasureFamilySpec(spec.m, N, spec.b, spec.a, spec.index_set)


def per_index_term(b, t) -> float:
    """H_n^{-2} - 1 via the minor expansion of det(I + X^T X)."""
    t = np.asarray(t, dtype=float)
    m = t.shape[0]
    return det_I_plus_XtX(x_matrix(b, t)) / (2.0**m * abs(np.linalg.det(t))) - 1.0


def exponent_m2_values(b1: float, b2: float, t) -> float:
    """Closed form of H^{-2} - 1 for m = 2, by the sign of det t."""
    t = np.asarray(t, dtype=float)
    (t11, t12), (t21, t22) = t
    d = t11 * t22 - t12 * t21
    if d == 0:
        raise SingularMatrix("t is singular")
    r = math.sqrt(b1 / b2)
    if d > 0:
        num = (1 - abs(d)) ** 2 + (t11 - t22) ** 2 + (t12 * r + t21 / r) ** 2
    else:
        num = (1 - abs(d)) ** 2 + (t11 + t22) ** 2 + (t12 * r - t21 / r) ** 2
    return num / (4 * abs(d))


def exponent_m2(spec: MeasureFamilySpec, t, n: int) -> float:
    if spec.m != 2:
        raise UnsupportedKindForM("exponent_m2 needs m = 2")
    return exponent_m2_values(eval_family(spec.b[0], n), eval_family(spec.b[1], n), t)


# -- batteries -----------------------------------------------------------------


def _condition(name: str, description: str, spec, kinds, policy) -> ConditionResult:
    results = pmap(lambda k: evaluate_series(spec, k, policy), kinds)
    if len(results) == 1:
        v = results[0].verdict
    else:
        v = combine_forall([r.verdict for r in results])
    failing = ""
    for r in results:
        if r.verdict.converges:
            failing = r.kind.label()
            break
    return ConditionResult(name, description, v, results, failing)


def battery_m2_kinds(spec: MeasureFamilySpec, grids: Grids = Grids()):
    ts12 = merged(grids.t, critical_t(spec, 1, 2))
    ts21 = merged(grids.t, critical_t(spec, 2, 1))
    ss = merged(grids.s, critical_s(spec))
    phis_by_s = [(s, merged(grids.phi, critical_phi(spec, s))) for s in ss]
    return [
        ("a", "S^L_12 = inf (exp(t E12), t != 0)", [SL(1, 2)]),
        ("b", "S^L_21 = inf (exp(t E21), t != 0)", [SL(2, 1)]),
        ("c", "S^{L,-}_12(t) = inf for all t (exp(t E12) P1)", [SLminus(1, 2, t) for t in ts12]),
        ("d", "S^{L,-}_21(t) = inf for all t (exp(t E21) P2)", [SLminus(2, 1, t) for t in ts21]),
        ("e", "Sigma^-_12(tau_-(phi, s)) = inf for all phi, s",
         [Sigma12minus(phi, s) for s, phis in phis_by_s for phi in phis]),
    ]


def canonical_battery_m2(spec: MeasureFamilySpec, N: int | None = None, grids: Grids = Grids(),
                         policy: DivergencePolicy = DEFAULT_POLICY) -> OrthogonalityReport:
    if spec.m != 2:
        raise UnsupportedKindForM(f"the m = 2 battery needs m = 2 (got m = {spec.m})")
    if N is not None and N != spec.n_max:
        spec = _with_window(spec, N)
    conds = [_condition(name, desc, spec, kinds, policy) for name, desc, kinds in battery_m2_kinds(spec, grids)]
    return OrthogonalityReport(conds)


def canonical_battery_m1(spec: MeasureFamilySpec, N: int | None = None,
                         policy: DivergencePolicy = DEFAULT_POLICY) -> OrthogonalityReport:
    if spec.m != 1:
        raise UnsupportedKindForM(f"the m = 1 battery needs m = 1 (got m = {spec.m})")
    if N is not None and N != spec.n_max:
        spec = _with_window(spec, N)
    return OrthogonalityReport([_condition("SL11", "S^L_11 = 4 sum b a^2 = inf", spec, [SL11], policy)])


# -- minimal perp sets ---------------------------------------------------------


@dataclass(frozen=True)
class PerpSetEntry:
    kind: str  # point | curve | surface
    family: str
    elements: tuple  # TestElement samples (a single one for points)


def _t_for(t_params, k, n, default=1.0) -> float:
    if t_params is None:
        return default
    if isinstance(t_params, dict):
        return float(t_params.get((k, n), default))
    return float(t_params)


def minimal_perp_set(group: str, m: int, t_params=None, grids: Grids = Grids()) -> list:
    """Perp-set generators: points, and curves/surfaces sampled on the grids."""
    g = group.lower()
    if g in ("nilpotent", "solvable"):
        if not 2 <= m <= 8:
            raise UnsupportedGroup("m must be between 2 and 8")
        pairs = [(k, n) for k in range(1, m + 1) for n in range(k + 1, m + 1)]
        out = []
        for k, n in pairs:
            t = _t_for(t_params, k, n)
            if t == 0:
                raise UnsupportedGroup("perp-set points need t != 0")
            e = unipotent(m, k, n, t)
            out.append(PerpSetEntry("point", e.label, (e,)))
        if g == "solvable":
            for k, n in pairs:
                samples = tuple(unipotent_reflection(m, k, n, t) for t in grids.t)
                out.append(PerpSetEntry("curve", samples[0].label, samples))
        return out
    if g in ("gl2", "gl"):
        if m != 2:
            raise UnsupportedGroup("GL2 perp set is defined for m = 2")
        t12 = _t_for(t_params, 1, 2)
        t21 = _t_for(t_params, 2, 1)
        if t12 == 0 or t21 == 0:
            raise UnsupportedGroup("perp-set points need t != 0")
        return [
            PerpSetEntry("point", "E12", (E12(t12),)),
            PerpSetEntry("point", "E21", (E21(t21),)),
            PerpSetEntry("curve", "E12P1", tuple(E12P1(t) for t in grids.t)),
            PerpSetEntry("curve", "E21P2", tuple(E21P2(t) for t in grids.t)),
            PerpSetEntry("surface", "TauMinus", tuple(tau_minus(phi, s) for s in grids.s for phi in grids.phi)),
        ]
    raise UnsupportedGroup(f"unknown group {group!r}")
