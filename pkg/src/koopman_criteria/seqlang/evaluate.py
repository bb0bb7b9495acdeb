"""Numeric evaluation of expression trees.

Vectorized float64 evaluation is the fast path; entries that come out
non-finite are re-evaluated with mpmath so domain errors are reported
precisely and overflow is distinguished from genuine poles.
"""

from __future__ import annotations

import mpmath
import numpy as np

from ..errors import DomainError
from .ast import Add, Call, Const, Div, Expr, Mul, Neg, Pow, Sub, Var


def _alt_value(v):
    k = int(v)
    if k != v:
        raise DomainError(f"alt() of non-integer {v}")
    return 1 if k % 2 == 0 else -1


def evaluate_mp(expr: Expr, env: dict) -> mpmath.mpf:
    """Scalar evaluation in mpmath (53-bit mantissa, unbounded exponent)."""
    if isinstance(expr, Const):
        return mpmath.mpf(expr.value)
    if isinstance(expr, Var):
        return mpmath.mpf(env[expr.name])
    if isinstance(expr, Neg):
        return -evaluate_mp(expr.arg, env)
    if isinstance(expr, Add):
        return evaluate_mp(expr.left, env) + evaluate_mp(expr.right, env)
    if isinstance(expr, Sub):
        return evaluate_mp(expr.left, env) - evaluate_mp(expr.right, env)
    if isinstance(expr, Mul):
        return evaluate_mp(expr.left, env) * evaluate_mp(expr.right, env)
    if isinstance(expr, Div):
        den = evaluate_mp(expr.right, env)
        if den == 0:
            raise DomainError("division by zero")
        return evaluate_mp(expr.left, env) / den
    if isinstance(expr, Pow):
        base = evaluate_mp(expr.base, env)
        q = expr.exponent
        if base == 0 and q < 0:
            raise DomainError("zero raised to a negative power")
        if q.denominator == 1:
            return base ** int(q)
        if base < 0:
            raise DomainError("fractional power of a negative number")
        return base ** (mpmath.mpf(q.numerator) / q.denominator)
    if isinstance(expr, Call):
        v = evaluate_mp(expr.arg, env)
        if expr.func == "abs":
            return abs(v)
        if expr.func == "exp":
            return mpmath.exp(v)
        if expr.func == "log1p":
            if v <= -1:
                raise DomainError("log of a non-positive number")
            return mpmath.log1p(v)
        if expr.func == "alt":
            return mpmath.mpf(_alt_value(v))
    raise TypeError(f"cannot evaluate {expr!r}")


def _eval_np(expr: Expr, env: dict, dtype=np.float64) -> np.ndarray:
    if isinstance(expr, Const):
        return dtype(expr.value)
    if isinstance(expr, Var):
        return np.asarray(env[expr.name], dtype=dtype)
    if isinstance(expr, Neg):
        return -_eval_np(expr.arg, env, dtype)
    if isinstance(expr, Add):
        return _eval_np(expr.left, env, dtype) + _eval_np(expr.right, env, dtype)
    if isinstance(expr, Sub):
        return _eval_np(expr.left, env, dtype) - _eval_np(expr.right, env, dtype)
    if isinstance(expr, Mul):
        return _eval_np(expr.left, env, dtype) * _eval_np(expr.right, env, dtype)
    if isinstance(expr, Div):
        return _eval_np(expr.left, env, dtype) / _eval_np(expr.right, env, dtype)
    if isinstance(expr, Pow):
        base = _eval_np(expr.base, env, dtype)
        q = expr.exponent
        if q.denominator == 1:
            return np.power(base, dtype(q.numerator))
        return np.where(base >= 0, np.power(np.abs(base), dtype(q.numerator) / dtype(q.denominator)), np.nan)
    if isinstance(expr, Call):
        v = _eval_np(expr.arg, env, dtype)
        if expr.func == "abs":
            return np.abs(v)
        if expr.func == "exp":
            return np.exp(v)
        if expr.func == "log1p":
            return np.where(v > -1, np.log1p(np.maximum(v, dtype(-1))), np.nan)
        if expr.func == "alt":
            r = np.rint(v)
            ok = (r == v) & (np.abs(v) < 2.0**52)
            return np.where(ok, 1.0 - 2.0 * np.mod(r, 2.0), np.nan)
    raise TypeError(f"cannot evaluate {expr!r}")


def evaluate_array(expr: Expr, n: np.ndarray, env: dict | None = None, exact: bool = False):
    """Evaluate over an integer array ``n``.

    Returns float64 values (possibly +-inf on overflow). Entries that are
    not finite in float64 are retried in extended precision (wider exponent
    range), then pointwise in mpmath. With ``exact=True`` and some entry
    overflowing, an object array of mpf values is returned.
    Raises DomainError if any point is outside the domain.
    """
    n = np.asarray(n)
    full_env = {"n": n.astype(float)}
    if env:
        full_env.update(env)
    with np.errstate(all="ignore"):
        out = np.broadcast_to(_eval_np(expr, full_env), n.shape).astype(float)
    bad = ~np.isfinite(out)
    if not bad.any():
        return out
    if np.finfo(np.longdouble).maxexp > np.finfo(np.float64).maxexp:
        sub_env = {k: (np.asarray(v)[bad] if np.ndim(v) else v) for k, v in full_env.items()}
        with np.errstate(all="ignore"):
            wide = np.broadcast_to(_eval_np(expr, sub_env, np.longdouble), (int(bad.sum()),))
        ok = np.isfinite(wide)
        if ok.any() and not exact:
            idx = np.flatnonzero(bad)[ok]
            with np.errstate(over="ignore"):
                out.flat[idx] = wide[ok].astype(float)
            bad = ~np.isfinite(out)
            bad.flat[idx] = False
            if not bad.any():
                return out
    scalar_env = {k: v for k, v in (env or {}).items()}
    exact_vals = {}
    for idx in np.flatnonzero(bad):
        local = {k: (np.asarray(v).flat[idx] if np.ndim(v) else v) for k, v in scalar_env.items()}
        local["n"] = int(n.flat[idx])
        val = evaluate_mp(expr, local)
        exact_vals[idx] = val
        out.flat[idx] = float(val) if abs(val) < 1.7e308 else float(mpmath.sign(val)) * np.inf
    if exact and not np.isfinite(out).all():
        obj = np.array([mpmath.mpf(x) for x in out.flat], dtype=object).reshape(n.shape)
        for idx, val in exact_vals.items():
            obj.flat[idx] = val
        return obj
    return out


def eval_family(f: Expr, n: int) -> float:
    """Value of the family at integer ``n`` as a finite float."""
    val = evaluate_mp(f, {"n": int(n)})
    if not mpmath.isfinite(val) or abs(val) >= 1.7e308:
        raise DomainError(f"value at n={n} exceeds the floating-point range")
    return float(val)


def first_nonpositive(expr: Expr, n: np.ndarray) -> int | None:
    """Index of the first n where expr is not strictly positive, else None."""
    n = np.asarray(n)
    vals = evaluate_array(expr, n)
    suspect = np.flatnonzero(~(vals > 0))
    if suspect.size and np.finfo(np.longdouble).maxexp > np.finfo(np.float64).maxexp:
        with np.errstate(all="ignore"):
            wide = np.broadcast_to(_eval_np(expr, {"n": n[suspect].astype(np.longdouble)}, np.longdouble), suspect.shape)
        suspect = suspect[~(wide > 0)]
    for idx in suspect:
        if not evaluate_mp(expr, {"n": int(n[idx])}) > 0:
            return int(idx)
    return None
