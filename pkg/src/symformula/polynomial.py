"""Exact sparse multivariate polynomials over the rationals.

Variables are positive integer ids (``x1``, ``x2``, ...).  A monomial is a
tuple of variable ids with repetition:

* commutative mode keeps the tuple sorted, so ``x1^2 x3`` is ``(1, 1, 3)``;
* noncommutative (ordered) mode keeps the tuple in multiplication order, so
  ``x2 x1`` is ``(2, 1)`` and differs from ``(1, 2)``.

Both modes share one representation and differ only in how products are
formed, which keeps the arithmetic loop tight.  The empty tuple is the
constant monomial.  Coefficients are :class:`fractions.Fraction` and zero
coefficients are never stored.

Text form (round-trips through :func:`to_text` / :func:`parse_poly`)::

    poly     := "0" | term (" + " term)*
    term     := rational ["*" monomial]
    rational := ["-"] digits "/" digits          (always written as p/q)
    monomial := factor ("*" factor)*
    factor   := "x" digits ["^" digits]          (exponents only when commutative)

Terms are written in ascending monomial order: commutative monomials are
compared by their sorted ``(variable, exponent)`` lists, ordered monomials by
their variable sequence.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

Monomial = tuple  # tuple[int, ...]
RationalLike = Union[int, Fraction, str]

NEG_INF = float("-inf")

COMMUTATIVE = "commutative"
NONCOMMUTATIVE = "noncommutative"


class ModeMismatchError(ValueError):
    """Raised when polynomials of different ring modes are combined."""


class MissingVariableError(KeyError):
    def __init__(self, var: int, what: str = "assignment"):
        super().__init__(f"x{var} missing from {what}")
        self.var = var


def as_rational(value: RationalLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def exponents(mono: Monomial) -> tuple:
    """Sorted ``(variable, exponent)`` pairs of a commutative monomial."""
    return tuple(sorted(Counter(mono).items()))


def monomial_key(mono: Monomial, commutative: bool = True):
    return exponents(mono) if commutative else mono


def _lex_key(mono: Monomial) -> tuple:
    # lex order with x1 > x2 > ...; compatible with multiplication
    return tuple((-v, e) for v, e in exponents(mono))


def _integer_terms(terms: dict):
    den = 1
    for c in terms.values():
        d = c.denominator
        if d != 1 and den % d:
            den = den * d // math.gcd(den, d)
    if den == 1:
        return 1, [(m, c.numerator) for m, c in terms.items()]
    return den, [(m, c.numerator * (den // c.denominator)) for m, c in terms.items()]


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "_commutative", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, RationalLike]] = None,
                 commutative: bool = True):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = as_rational(c)
                if c:
                    mono = tuple(mono)
                    if commutative:
                        mono = tuple(sorted(mono))
                    clean[mono] = clean.get(mono, 0) + c
            clean = {m: c for m, c in clean.items() if c}
        self._terms = clean
        self._commutative = commutative
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, commutative: bool) -> "Poly":
        # terms already canonical: no zeros, commutative monomials sorted
        p = cls.__new__(cls)
        p._terms = terms
        p._commutative = commutative
        p._hash = None
        return p

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, commutative: bool = True) -> "Poly":
        return cls._raw({}, commutative)

    @classmethod
    def const(cls, c: RationalLike, commutative: bool = True) -> "Poly":
        c = as_rational(c)
        return cls._raw({(): c} if c else {}, commutative)

    @classmethod
    def var(cls, i: int, commutative: bool = True) -> "Poly":
        if i < 1:
            raise ValueError(f"variable ids are positive, got {i}")
        return cls._raw({(i,): Fraction(1)}, commutative)

    # accessors --------------------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def commutative(self) -> bool:
        return self._commutative

    @property
    def mode(self) -> str:
        return COMMUTATIVE if self._commutative else NONCOMMUTATIVE

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, mono: Iterable[int]) -> Fraction:
        mono = tuple(mono)
        if self._commutative:
            mono = tuple(sorted(mono))
        return self._terms.get(mono, Fraction(0))

    def support(self) -> frozenset:
        return frozenset(self._terms)

    def variables(self) -> frozenset:
        return frozenset(v for m in self._terms for v in m)

    @property
    def degree(self):
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(len(m) for m in self._terms)

    def sorted_terms(self) -> list:
        key = exponents if self._commutative else (lambda m: m)
        return sorted(self._terms.items(), key=lambda t: key(t[0]))

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if self._commutative != other._commutative:
            raise ModeMismatchError(
                f"cannot combine {self.mode} and {other.mode} polynomials")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self._commutative)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) < len(other._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for m, c in b.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(out, self._commutative)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()}, self._commutative)

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Poly.zero(self._commutative)
        # integer accumulation over a common denominator
        da, ai = _integer_terms(self._terms)
        db, bi = _integer_terms(other._terms)
        out: dict = {}
        get = out.get
        if self._commutative:
            for m1, c1 in ai:
                for m2, c2 in bi:
                    if not m1:
                        m = m2
                    elif not m2:
                        m = m1
                    elif m1[-1] <= m2[0]:
                        m = m1 + m2
                    elif m2[-1] <= m1[0]:
                        m = m2 + m1
                    else:
                        m = tuple(sorted(m1 + m2))
                    out[m] = get(m, 0) + c1 * c2
        else:
            for m1, c1 in ai:
                for m2, c2 in bi:
                    m = m1 + m2
                    out[m] = get(m, 0) + c1 * c2
        den = da * db
        return Poly._raw({m: Fraction(c, den) for m, c in out.items() if c}, self._commutative)

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: RationalLike) -> "Poly":
        c = as_rational(c)
        if not c:
            return Poly.zero(self._commutative)
        return Poly._raw({m: v * c for m, v in self._terms.items()}, self._commutative)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        out = Poly.const(1, self._commutative)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self._commutative)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._commutative == other._commutative and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._commutative, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({to_text(self)!r}{'' if self._commutative else ', ordered'})"

    # evaluation and substitution -------------------------------------------
    def evaluate(self, point: Mapping[int, RationalLike]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            val = c
            for v in m:
                try:
                    val *= as_rational(point[v])
                except KeyError:
                    raise MissingVariableError(v, "evaluation point") from None
            total += val
        return total

    def compose(self, subs: Mapping[int, "Poly"]) -> "Poly":
        """Substitute a polynomial for every variable (commutative only)."""
        if not self._commutative:
            raise ModeMismatchError("compose is defined for commutative polynomials")
        powers: dict = {}

        def power(v: int, e: int) -> Poly:
            key = (v, e)
            if key not in powers:
                if v not in subs:
                    raise MissingVariableError(v, "substitution")
                powers[key] = subs[v] if e == 1 else power(v, e - 1) * subs[v]
            return powers[key]

        out = Poly.zero()
        for m, c in self._terms.items():
            term = Poly.const(c)
            for v, e in exponents(m):
                term = term * power(v, e)
            out = out + term
        return out

    def to_commutative(self) -> "Poly":
        return Poly(self._terms, commutative=True)


def check_same_mode(a: Poly, b: Poly) -> None:
    a._check(b)


def ring_op(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        check_same_mode(a, b)
        return a + b
    if op == "mul":
        check_same_mode(a, b)
        return a * b
    raise ValueError(f"unknown ring op {op!r}")


def divide_exact(a: Poly, b: Poly) -> Poly:
    """Quotient ``a / b`` when ``b`` divides ``a`` exactly (commutative).

    Plain multivariate long division in lex order; raises ``ValueError`` when
    a nonzero remainder would be left.  Intended for desk-scale inputs.
    """
    check_same_mode(a, b)
    if not a.commutative:
        raise ModeMismatchError("exact division is implemented for commutative polynomials")
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_b = max(b._terms, key=_lex_key)
    lead_exp = Counter(lead_b)
    lead_c = b._terms[lead_b]
    rem = dict(a._terms)
    quot: dict = {}
    while rem:
        m = max(rem, key=_lex_key)
        cm = Counter(m)
        if any(cm[v] < e for v, e in lead_exp.items()):
            raise ValueError("division is not exact")
        q_mono = tuple(sorted((cm - lead_exp).elements()))
        q_c = rem[m] / lead_c
        quot[q_mono] = q_c
        for mb, cb in b._terms.items():
            prod = tuple(sorted(q_mono + mb))
            val = rem.get(prod, 0) - q_c * cb
            if val:
                rem[prod] = val
            else:
                rem.pop(prod, None)
    return Poly._raw(quot, True)


def weakly_equivalent(f: Poly, g: Poly) -> bool:
    """Same set of monomials with nonzero coefficient."""
    check_same_mode(f, g)
    return f.terms.keys() == g.terms.keys()


# properties -----------------------------------------------------------------

Weighting = Mapping[int, int]


def check_weighting(w: Weighting) -> None:
    for v, weight in w.items():
        if int(weight) != weight or weight < 1:
            raise ValueError(f"weight of x{v} must be a positive integer, got {weight}")


def w_degree(mono: Monomial, w: Weighting) -> int:
    try:
        return sum(w[v] for v in mono)
    except KeyError as exc:
        raise MissingVariableError(exc.args[0], "weighting") from None


def unit_weighting(variables: Iterable[int]) -> dict:
    return {v: 1 for v in variables}


def newton_weighting(k: int) -> dict:
    """``w(y_i) = i`` for the Newton variables ``y_1..y_k``."""
    return {i: i for i in range(1, k + 1)}


@dataclass(frozen=True)
class PolyProps:
    degree: object  # int or NEG_INF
    monomial_count: int
    is_homogeneous: bool
    is_multilinear: bool
    w_degree_set: frozenset


def poly_props(f: Poly, w: Optional[Weighting] = None) -> PolyProps:
    degrees = {len(m) for m in f.terms}
    if w is not None:
        check_weighting(w)
        wdegs = frozenset(w_degree(m, w) for m in f.terms)
    else:
        wdegs = frozenset(degrees)
    multilinear = all(len(set(m)) == len(m) for m in f.terms)
    return PolyProps(
        degree=f.degree,
        monomial_count=len(f),
        is_homogeneous=len(degrees) <= 1,
        is_multilinear=multilinear,
        w_degree_set=wdegs,
    )


def is_w_homogeneous(f: Poly, w: Weighting) -> bool:
    return len({w_degree(m, w) for m in f.terms}) <= 1


# oracles ----------------------------------------------------------------------

def oracle_S(n: int, k: int, commutative: bool = True, method: str = "enumerate") -> Poly:
    """Elementary symmetric polynomial ``S^k_n`` in ``x1..xn``.

    ``method="enumerate"`` sums over k-subsets; ``method="dp"`` uses
    ``S^k_n = S^k_{n-1} + S^{k-1}_{n-1} * x_n`` (x_n appended on the right so
    the ordered reading keeps increasing indices).
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if method == "enumerate":
        one = Fraction(1)
        return Poly._raw({c: one for c in itertools.combinations(range(1, n + 1), k)},
                         commutative)
    if method == "dp":
        row = [Poly.const(1, commutative)] + [Poly.zero(commutative)] * k
        for m in range(1, n + 1):
            xm = Poly.var(m, commutative)
            for j in range(min(k, m), 0, -1):
                row[j] = row[j] + row[j - 1] * xm
        return row[k]
    raise ValueError(f"unknown method {method!r}")


def oracle_P(n: int, k: int, commutative: bool = True) -> Poly:
    """Power sum ``x1^k + ... + xn^k``."""
    if k < 1:
        raise ValueError("power sums need k >= 1")
    one = Fraction(1)
    return Poly._raw({(i,) * k: one for i in range(1, n + 1)}, commutative)


def newton_Z(k: int) -> Poly:
    """``Z_k(y1..yk)`` with ``S^k_n = Z_k(P^1_n, ..., P^k_n)``; ``y_i`` is variable ``i``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    Z = [Poly.const(1)]
    for m in range(1, k + 1):
        acc = Poly.zero()
        for i in range(1, m + 1):
            term = Poly.var(i) * Z[m - i]
            acc = acc + term if i % 2 else acc - term
        Z.append(acc.scale(Fraction(1, m)))
    return Z[k]


# text form --------------------------------------------------------------------

def _rational_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_text(f: Poly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for m, c in f.sorted_terms():
        if not m:
            parts.append(_rational_text(c))
            continue
        if f.commutative:
            factors = [f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in exponents(m)]
        else:
            factors = [f"x{v}" for v in m]
        parts.append(_rational_text(c) + "*" + "*".join(factors))
    return " + ".join(parts)


_TERM_RE = re.compile(r"^(-?\d+(?:/\d+)?)((?:\*x\d+(?:\^\d+)?)*)$")
_FACTOR_RE = re.compile(r"\*x(\d+)(?:\^(\d+))?")


def parse_poly(text: str, commutative: bool = True) -> Poly:
    text = text.strip()
    if text == "0":
        return Poly.zero(commutative)
    terms: dict = {}
    for raw in text.split(" + "):
        match = _TERM_RE.match(raw.strip())
        if not match:
            raise ValueError(f"malformed term {raw!r}")
        coeff = Fraction(match.group(1))
        mono: list = []
        for v, e in _FACTOR_RE.findall(match.group(2)):
            if e and not commutative:
                raise ValueError("exponents are not allowed in ordered monomials")
            mono.extend([int(v)] * (int(e) if e else 1))
        key = tuple(sorted(mono)) if commutative else tuple(mono)
        terms[key] = terms.get(key, 0) + coeff
    return Poly(terms, commutative)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0

