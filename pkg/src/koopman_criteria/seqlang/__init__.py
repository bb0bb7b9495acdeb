"""Symbolic parameter families: parsing, evaluation, asymptotic classes."""

from .ast import (
    Add,
    Call,
    Const,
    Div,
    Expr,
    Mul,
    N,
    Neg,
    Pow,
    Sub,
    Var,
    parse_family,
    rational,
    substitute,
    unparse,
    variables,
)
from .asymptotics import Expansion, Unknown, expand, leading_terms, ray_expansions, rays
from .classes import AsymptoticClass, asymptotic_class
from .evaluate import eval_family, evaluate_array, evaluate_mp

FamilyExpr = Expr

__all__ = [
    "Add",
    "AsymptoticClass",
    "Call",
    "Const",
    "Div",
    "Expansion",
    "Expr",
    "FamilyExpr",
    "Mul",
    "N",
    "Neg",
    "Pow",
    "Sub",
    "Unknown",
    "Var",
    "asymptotic_class",
    "eval_family",
    "evaluate_array",
    "evaluate_mp",
    "expand",
    "leading_terms",
    "parse_family",
    "ray_expansions",
    "rays",
    "rational",
    "substitute",
    "unparse",
    "variables",
]
