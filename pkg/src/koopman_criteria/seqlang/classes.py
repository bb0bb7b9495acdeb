"""Asymptotic class tags derived from ray expansions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ast import Expr
from .asymptotics import ZERO_KEY, leading_terms


@dataclass(frozen=True)
class AsymptoticClass:
    tag: str  # PowerLaw | ExpGrowth | ExpDecay | Bounded | Alternating | Unknown
    p: Fraction | None = None
    base: "AsymptoticClass | None" = None

    def __str__(self):
        if self.tag == "PowerLaw":
            return f"PowerLaw({self.p})"
        if self.tag == "Alternating":
            return f"Alternating({self.base})"
        return self.tag


UNKNOWN = AsymptoticClass("Unknown")


def _tag_for(key) -> AsymptoticClass:
    rate, p = key
    if rate > 0:
        return AsymptoticClass("ExpGrowth")
    if rate < 0:
        return AsymptoticClass("ExpDecay")
    return AsymptoticClass("PowerLaw", p=p)


def asymptotic_class(f: Expr, index_set: str = "Z") -> AsymptoticClass:
    """Sound asymptotic tag of a family as |n| -> inf.

    PowerLaw(p) means f(n)/|n|^p tends to a nonzero constant along each
    parity class (and each direction on Z). Alternating(base) is used when
    the leading orders agree but the sign flips with parity.
    """
    lead = leading_terms(f, index_set)
    if any(v is None for v in lead.values()):
        return UNKNOWN
    if all(v == "zero" for v in lead.values()):
        return AsymptoticClass("Bounded")
    keys = {v[0] for v in lead.values() if v != "zero"}
    if any(v == "zero" for v in lead.values()) or len(keys) > 1:
        if all(v == "zero" or v[0] <= ZERO_KEY for v in lead.values()):
            return AsymptoticClass("Bounded")
        return UNKNOWN
    (key,) = keys
    base = _tag_for(key)
    for sign in {ray[0] for ray in lead}:
        signs = {lead[(s, p)][1] > 0 for (s, p) in lead if s == sign}
        if len(signs) > 1:
            return AsymptoticClass("Alternating", base=base)
    return base
