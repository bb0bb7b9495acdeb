"""Truncated asymptotic expansions of families along rays.

A ray fixes the direction of n (n = x or n = -x with x -> +inf) and the
parity of n, so ``abs`` and ``alt`` become ordinary functions of x. On a
ray a family is expanded as a finite sum of terms c * x^p * e^(r x),
ordered by the key (r, p), plus an optional remainder order: the
expansion is exact when the remainder is None, otherwise everything
beyond the listed terms is O(x^p e^(r x)) for the remainder key.

Operations the expansion cannot justify raise ``Unknown``; nothing is
ever guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .ast import Add, Call, Const, Div, Expr, Mul, Neg, Pow, Sub, Var, rational

MAX_TERMS = 8
CANCEL_RTOL = 1e-12

# Exponent keys use gmpy2 rationals internally: they are hashed and added in the
# inner loops, where Fraction is an order of magnitude slower. leading_terms
# converts back to Fraction.
Key = tuple  # (rate, power)
ZERO_KEY: Key = (mpq(0), mpq(0))
LINEAR_KEY: Key = (mpq(0), mpq(1))


class Unknown(Exception):
    """The expansion rules do not apply."""


def _kadd(a: Key, b: Key) -> Key:
    return (a[0] + b[0], a[1] + b[1])


def _ksub(a: Key, b: Key) -> Key:
    return (a[0] - b[0], a[1] - b[1])


def _kmul(a: Key, k: int) -> Key:
    return (a[0] * k, a[1] * k)


def _kmax(a: Key | None, b: Key | None) -> Key | None:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


@dataclass(frozen=True)
class Expansion:
    terms: tuple  # ((key, coef), ...) sorted by decreasing key
    err: Key | None = None

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.err is None

    @property
    def exact(self) -> bool:
        return self.err is None

    def order(self) -> Key | None:
        """Key of the dominant part, remainder included."""
        if self.terms:
            return self.terms[0][0]
        return self.err

    def leading(self):
        if not self.terms:
            raise Unknown("no explicit leading term")
        return self.terms[0]


def _build(contrib: dict, err: Key | None) -> Expansion:
    """Combine contributions {key: [coef, ...]} with cancellation detection."""
    terms = []
    for key, coefs in contrib.items():
        total = math.fsum(coefs)
        scale = max(abs(c) for c in coefs)
        if total == 0 or abs(total) <= CANCEL_RTOL * scale:
            continue
        if not math.isfinite(total):
            raise Unknown("non-finite coefficient")
        if err is not None and key <= err:
            continue
        terms.append((key, total))
    terms.sort(key=lambda kc: kc[0], reverse=True)
    if len(terms) > MAX_TERMS:
        err = _kmax(err, terms[MAX_TERMS][0])
        terms = terms[:MAX_TERMS]
    return Expansion(tuple(terms), err)


def const(c: float) -> Expansion:
    if c == 0:
        return Expansion(())
    return Expansion(((ZERO_KEY, float(c)),))


def add(a: Expansion, b: Expansion) -> Expansion:
    contrib: dict = {}
    for key, c in a.terms + b.terms:
        contrib.setdefault(key, []).append(c)
    return _build(contrib, _kmax(a.err, b.err))


def scale(a: Expansion, c: float) -> Expansion:
    if c == 0:
        return Expansion(())
    return Expansion(tuple((k, v * c) for k, v in a.terms), a.err)


def mul(a: Expansion, b: Expansion) -> Expansion:
    if a.is_zero or b.is_zero:
        return Expansion(())
    contrib: dict = {}
    for ka, ca in a.terms:
        for kb, cb in b.terms:
            contrib.setdefault(_kadd(ka, kb), []).append(ca * cb)
    err = None
    if a.err is not None:
        err = _kmax(err, _kadd(a.err, b.order()))
    if b.err is not None:
        err = _kmax(err, _kadd(b.err, a.order()))
    return _build(contrib, err)


def _series(u: Expansion, coeffs) -> Expansion:
    """sum_j coeffs[j] u^j for a u that tends to zero, with truncation error."""
    order = u.order()
    if order is None:
        return const(coeffs[0])
    if order >= ZERO_KEY:
        raise Unknown("series argument does not tend to zero")
    total = const(coeffs[0])
    power = const(1.0)
    for j in range(1, MAX_TERMS + 1):
        power = mul(power, u)
        total = add(total, scale(power, coeffs[j]))
    tail = _kmul(order, MAX_TERMS + 1)
    return _build({k: [c] for k, c in total.terms}, _kmax(total.err, tail))


def _split_leading(a: Expansion):
    """a = L (1 + u) with L the leading monomial."""
    key, c = a.leading()
    u_terms = tuple((_ksub(k, key), v / c) for k, v in a.terms[1:])
    u_err = None if a.err is None else _ksub(a.err, key)
    return key, c, Expansion(u_terms, u_err)


def reciprocal(a: Expansion) -> Expansion:
    key, c, u = _split_leading(a)
    coeffs = [(-1.0) ** j for j in range(MAX_TERMS + 1)]
    return mul(Expansion((((-key[0], -key[1]), 1.0 / c),)), _series(u, coeffs))


def power(a: Expansion, q: Fraction) -> Expansion:
    if q == 0:
        return const(1.0)
    if q.denominator == 1:
        k = int(q)
        if a.is_zero:
            if k < 0:
                raise Unknown("negative power of zero")
            return a
        base = a if k > 0 else reciprocal(a)
        out, sq, k = const(1.0), base, abs(k)
        while k:
            if k & 1:
                out = mul(out, sq)
            k >>= 1
            if k:
                sq = mul(sq, sq)
        return out
    if a.is_zero:
        if q < 0:
            raise Unknown("negative power of zero")
        return a
    key, c, u = _split_leading(a)
    if c <= 0:
        raise Unknown("fractional power of an eventually negative quantity")
    coeffs = [1.0]
    for j in range(1, MAX_TERMS + 1):
        coeffs.append(coeffs[-1] * float(q - (j - 1)) / j)
    lead = Expansion(((_kmul_frac(key, q), c ** float(q)),))
    return mul(lead, _series(u, coeffs))


def _kmul_frac(key: Key, q: Fraction) -> Key:
    return (key[0] * q, key[1] * q)


def exp(a: Expansion) -> Expansion:
    if a.err is not None and a.err >= ZERO_KEY:
        raise Unknown("exp of an expansion with non-decaying remainder")
    rate = 0.0
    c0 = 0.0
    decaying = []
    for key, c in a.terms:
        if key > ZERO_KEY:
            if key != LINEAR_KEY:
                raise Unknown("exp of a non-linear growing argument")
            rate += c
        elif key == ZERO_KEY:
            c0 += c
        else:
            decaying.append((key, c))
    try:
        factor = math.exp(c0)
    except OverflowError as exc:
        raise Unknown("exp overflow in coefficient") from exc
    if factor == 0.0:
        raise Unknown("exp underflow in coefficient")
    lead = Expansion((((mpq(rational(rate)), mpq(0)), factor),))
    coeffs = [1.0 / math.factorial(j) for j in range(MAX_TERMS + 1)]
    return mul(lead, _series(Expansion(tuple(decaying), a.err), coeffs))


def log(a: Expansion) -> Expansion:
    key, c, u = _split_leading(a)
    if c <= 0:
        raise Unknown("log of an eventually non-positive quantity")
    if key[1] != 0 or key[0] < 0:
        raise Unknown("log of a power or of a decaying quantity")
    coeffs = [0.0] + [(-1.0) ** (j + 1) / j for j in range(1, MAX_TERMS + 1)]
    head = const(math.log(c))
    if key[0] > 0:
        head = add(head, Expansion(((LINEAR_KEY, float(key[0])),)))
    return add(head, _series(u, coeffs))


def absolute(a: Expansion) -> Expansion:
    if a.is_zero:
        return a
    _, c = a.leading()
    return a if c > 0 else scale(a, -1.0)


def _alt(a: Expansion, parity: int) -> Expansion:
    if not a.exact:
        raise Unknown("alt of an inexact argument")
    slope, offset = 0.0, 0.0
    for key, c in a.terms:
        if key == LINEAR_KEY:
            slope = c
        elif key == ZERO_KEY:
            offset = c
        else:
            raise Unknown("alt of a non-affine argument")
    if slope != int(slope) or offset != int(offset):
        raise Unknown("alt of a non-integer argument")
    return const(-1.0 if (int(slope) * parity + int(offset)) % 2 else 1.0)


@lru_cache(maxsize=65536)
def expand(expr: Expr, sign: int, parity: int) -> Expansion:
    """Expansion of ``expr`` on the ray n = sign*x, n = parity (mod 2)."""
    if isinstance(expr, Const):
        return const(expr.value)
    if isinstance(expr, Var):
        if expr.name != "n":
            raise Unknown(f"free variable {expr.name}")
        return Expansion(((LINEAR_KEY, float(sign)),))
    if isinstance(expr, Neg):
        return scale(expand(expr.arg, sign, parity), -1.0)
    if isinstance(expr, Add):
        return add(expand(expr.left, sign, parity), expand(expr.right, sign, parity))
    if isinstance(expr, Sub):
        return add(expand(expr.left, sign, parity), scale(expand(expr.right, sign, parity), -1.0))
    if isinstance(expr, Mul):
        return mul(expand(expr.left, sign, parity), expand(expr.right, sign, parity))
    if isinstance(expr, Div):
        return mul(expand(expr.left, sign, parity), reciprocal(expand(expr.right, sign, parity)))
    if isinstance(expr, Pow):
        return power(expand(expr.base, sign, parity), expr.exponent)
    if isinstance(expr, Call):
        inner = expand(expr.arg, sign, parity)
        if expr.func == "abs":
            return absolute(inner)
        if expr.func == "exp":
            return exp(inner)
        if expr.func == "log1p":
            return log(add(const(1.0), inner))
        if expr.func == "alt":
            return _alt(inner, parity)
    raise Unknown(f"unsupported node {type(expr).__name__}")


def rays(index_set: str = "Z"):
    """(sign, parity) pairs covering the index set as |n| -> inf."""
    signs = (1, -1) if index_set == "Z" else (1,)
    return [(s, p) for s in signs for p in (0, 1)]


def ray_expansions(expr: Expr, index_set: str = "Z"):
    """Expansion per ray, or None on rays where the rules do not apply."""
    out = {}
    for sign, parity in rays(index_set):
        try:
            out[(sign, parity)] = expand(expr, sign, parity)
        except (Unknown, ZeroDivisionError, OverflowError, ValueError):
            out[(sign, parity)] = None
    return out


def leading_terms(expr: Expr, index_set: str = "Z"):
    """Per ray: (key, coef) of the leading term, 'zero', or None if unknown."""
    out = {}
    for ray, e in ray_expansions(expr, index_set).items():
        if e is None:
            out[ray] = None
        elif e.is_zero:
            out[ray] = "zero"
        elif not e.terms:
            out[ray] = None
        else:
            (rate, p), c = e.terms[0]
            out[ray] = ((_frac(rate), _frac(p)), c)
    return out


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))
