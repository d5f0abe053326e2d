"""Evaluators and checkers for the quantitative estimates.

Real-valued bounds are evaluated in interval arithmetic (a private mpmath
interval context, 192 bits) and returned as an :class:`Enclosure` with exact
rational endpoints.  Checks compare conservatively: a measured quantity passes
an upper bound when it is at most the upper endpoint, and a lower bound is
reported by its lower endpoint.  All logarithms are base 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

_IV = MPIntervalContext()
_IV.prec = 192


class BoundPreconditionError(ValueError):
    """A bound was evaluated outside its stated hypothesis."""


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` with rational endpoints containing a real value."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def exact(cls, v) -> "Enclosure":
        v = Fraction(v)
        return cls(v, v)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        return f"[{float(self.lo):.15g}, {float(self.hi):.15g}]"


def _enclose(x) -> Enclosure:
    a, b = x._mpi_
    pa, qa = to_rational(a)
    pb, qb = to_rational(b)
    return Enclosure(Fraction(int(pa), int(qa)), Fraction(int(pb), int(qb)))


def _iv(v):
    v = Fraction(v)
    if v.denominator == 1:
        return _IV.mpf(v.numerator)
    return _IV.mpf(v.numerator) / _IV.mpf(v.denominator)


def _log2(x):
    return _IV.log(x) / _IV.log(_IV.mpf(2))


def _pow2(x):
    return _IV.exp(x * _IV.log(_IV.mpf(2)))


@dataclass(frozen=True)
class BoundConstants:
    """Explicit values for the constants hidden in the asymptotic statements.

    ``c_balanced`` of ``None`` means the derived value ``1/(8 log2 3)``,
    evaluated in interval arithmetic; a rational overrides it.
    """

    c_balanced: Optional[Fraction] = None
    newton_leaf_factor: int = 3
    newton_gate_factor: int = 3
    ben_or_factor: int = 4

    def c_interval(self):
        if self.c_balanced is None:
            return _IV.mpf(1) / (8 * _log2(_IV.mpf(3)))
        return _iv(self.c_balanced)

    def c_enclosure(self) -> Enclosure:
        return _enclose(self.c_interval())


DEFAULT_CONSTANTS = BoundConstants()


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    bound: object  # int, Fraction or Enclosure
    compared: object
    passed: bool
    failures: tuple = ()
    constants: dict = field(default_factory=dict)
    kind: str = "upper"  # "upper": compared <= bound; "lower": bound <= compared; "check"

    def as_dict(self) -> dict:
        def fmt(v):
            if isinstance(v, Enclosure):
                return {"lo": float(v.lo), "hi": float(v.hi)}
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else v.numerator
            return v
        return {
            "name": self.name,
            "kind": self.kind,
            "inputs": {k: fmt(v) for k, v in self.inputs.items()},
            "bound": fmt(self.bound),
            "compared": fmt(self.compared),
            "passed": self.passed,
            "failures": list(self.failures),
            "constants": {k: fmt(v) for k, v in self.constants.items()},
        }


# Lemma-1 style binomial product inequality ----------------------------------

def _check_compositions(n_list: Sequence[int], k_list: Sequence[int]) -> tuple:
    if len(n_list) != len(k_list) or not n_list:
        raise BoundPreconditionError("n_list and k_list must be nonempty and of equal length")
    if any(ki < 1 for ki in k_list):
        raise BoundPreconditionError("every k_i must be at least 1")
    if any(ni < 0 for ni in n_list):
        raise BoundPreconditionError("every n_i must be nonnegative")
    n, k = sum(n_list), sum(k_list)
    if n < 2 * k:
        raise BoundPreconditionError(f"n >= 2k fails: n={n}, k={k}")
    return n, k


def lemma1_holds(n_list: Sequence[int], k_list: Sequence[int]) -> bool:
    """Exact integer test of ``prod C(n_i,k_i) <= 3 sqrt(k) (prod k_i)^(-1/2) C(n,k)``."""
    n, k = _check_compositions(n_list, k_list)
    lhs = math.prod(math.comb(a, b) for a, b in zip(n_list, k_list))
    return lhs * lhs * math.prod(k_list) <= 9 * k * math.comb(n, k) ** 2


def lemma1_rhs(n_list: Sequence[int], k_list: Sequence[int]) -> Enclosure:
    n, k = _check_compositions(n_list, k_list)
    x = 3 * _IV.sqrt(_IV.mpf(k)) / _IV.sqrt(_IV.mpf(math.prod(k_list))) * _IV.mpf(math.comb(n, k))
    return _enclose(x)


def lemma1_check(n_list: Sequence[int], k_list: Sequence[int]) -> BoundReport:
    n, k = _check_compositions(n_list, k_list)
    lhs = math.prod(math.comb(a, b) for a, b in zip(n_list, k_list))
    rhs = lemma1_rhs(n_list, k_list)
    ok = lemma1_holds(n_list, k_list)
    return BoundReport("lemma1", {"n_list": list(n_list), "k_list": list(k_list), "n": n, "k": k},
                       rhs, lhs, ok, () if ok else (f"{lhs} > {float(rhs.hi)}",))


def _partitions(k: int, largest: Optional[int] = None):
    """Partitions of ``k`` as nonincreasing tuples."""
    if largest is None:
        largest = k
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def _compositions(n: int, parts: int):
    """Ordered ways to write ``n`` as ``parts`` nonnegative integers."""
    for cuts in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(n + parts - 1 - prev - 1)
        yield tuple(out)


def lemma1_sweep(n_max: int = 14, k_max: int = 7) -> BoundReport:
    """Exhaustive check over ``n <= n_max``, ``k <= k_max``, ``n >= 2k``.

    The inequality is invariant under reordering the pairs ``(n_i, k_i)``
    together, so ``k`` ranges over partitions and ``n`` over all compositions
    with the matching number of parts; this covers every composition pair.
    """
    cases = 0
    failures = []
    for k in range(1, k_max + 1):
        for n in range(2 * k, n_max + 1):
            for ks in _partitions(k):
                for ns in _compositions(n, len(ks)):
                    cases += 1
                    if not lemma1_holds(ns, ks):
                        failures.append(f"n={ns} k={ks}")
    return BoundReport("lemma1_sweep", {"n_max": n_max, "k_max": k_max}, None, cases,
                       not failures, tuple(failures[:20]), kind="check")


# monomial-count bounds --------------------------------------------------------

def _check_nk(n: int, k: int) -> None:
    if k < 1 or n < 2 * k:
        raise BoundPreconditionError(f"n >= 2k >= 2 fails: n={n}, k={k}")


def _k_factor(k: int, constants: BoundConstants):
    """``k^(-c log k + 3/2)`` as an interval."""
    lk = _log2(_IV.mpf(k))
    return _pow2((-constants.c_interval() * lk + _IV.mpf(3) / 2) * lk)


def balanced_monomial_bound(k: int, n: int, minvar: int,
                            constants: BoundConstants = DEFAULT_CONSTANTS) -> Enclosure:
    """``3 k^(-c log k + 3/2) C(n,k) minvar / n``."""
    _check_nk(n, k)
    if minvar < 0:
        raise BoundPreconditionError("minvar must be nonnegative")
    x = 3 * _k_factor(k, constants) * _IV.mpf(math.comb(n, k)) * _IV.mpf(minvar) / _IV.mpf(n)
    return _enclose(x)


def formula_monomial_bound(s: int, k: int, n: int,
                           constants: BoundConstants = DEFAULT_CONSTANTS) -> Enclosure:
    """``3 k^(-c log k + 3/2) C(n,k) s / n`` for a fan-in-two formula of size ``s``."""
    if s < 1:
        raise BoundPreconditionError("s >= 1 fails")
    return balanced_monomial_bound(k, n, s, constants)


def formed_monomial_bound(k: int, n: int, p: int, ell, minvar: int) -> Enclosure:
    """``3 k^(3/2) ell^(-(p-1)/2) C(n,k) minvar / n``."""
    _check_nk(n, k)
    if p < 2 or Fraction(ell) < 2:
        raise BoundPreconditionError(f"p >= 2 and ell >= 2 fail: p={p}, ell={ell}")
    e = _iv(ell)
    x = (3 * _IV.mpf(k) * _IV.sqrt(_IV.mpf(k)) / _IV.exp(_IV.log(e) * _IV.mpf(p - 1) / 2)
         * _IV.mpf(math.comb(n, k)) * _IV.mpf(minvar) / _IV.mpf(n))
    return _enclose(x)


def _check_depth(k: int, d: int) -> None:
    if d < 1 or k < 8 ** d:
        raise BoundPreconditionError(f"k^(1/d) >= 8 fails: k={k}, d={d}")


def const_depth_monomial_bound(s: int, k: int, n: int, d: int) -> Enclosure:
    """``6 k^(3/2) 2^(-k^(1/d)/8) C(n,k) s / n``."""
    _check_nk(n, k)
    _check_depth(k, d)
    root = _IV.exp(_IV.log(_IV.mpf(k)) / d)
    x = (6 * _IV.mpf(k) * _IV.sqrt(_IV.mpf(k)) * _pow2(-root / 8)
         * _IV.mpf(math.comb(n, k)) * _IV.mpf(s) / _IV.mpf(n))
    return _enclose(x)


# size lower bounds --------------------------------------------------------------

@dataclass(frozen=True)
class SizeLowerBound:
    """Certified leaf-count lower bound; ``trivial`` when it is just ``n``."""

    value: Fraction
    raw: Optional[Enclosure]
    trivial: bool
    hypothesis: bool

    def __float__(self) -> float:
        return float(self.value)


def growth_factor(k: int, constants: BoundConstants = DEFAULT_CONSTANTS) -> Enclosure:
    """``k^(c log k - 3/2)``, the factor by which the size bound exceeds ``n/3``."""
    lk = _log2(_IV.mpf(k))
    return _enclose(_pow2((constants.c_interval() * lk - _IV.mpf(3) / 2) * lk))


def lower_bound_size(n: int, k: int, constants: BoundConstants = DEFAULT_CONSTANTS) -> SizeLowerBound:
    """Leaves needed by a homogeneous multilinear fan-in-two formula for ``S^k_n``.

    Inverts the formula monomial bound at ``C(n,k)`` monomials:
    ``s >= n k^(c log k - 3/2) / 3``.  Never below ``n`` since every
    variable occurs; outside ``n >= 2k >= 2`` only ``n`` is returned.
    """
    if k < 1 or n < 2 * k:
        return SizeLowerBound(Fraction(n), None, True, False)
    lk = _log2(_IV.mpf(k))
    raw = _enclose(_IV.mpf(n) * _pow2((constants.c_interval() * lk - _IV.mpf(3) / 2) * lk) / 3)
    if raw.lo <= n:
        return SizeLowerBound(Fraction(n), raw, True, True)
    return SizeLowerBound(raw.lo, raw, False, True)


def lower_bound_size_depth(n: int, k: int, d: int) -> SizeLowerBound:
    """Leaves needed at product-depth ``d``: ``s >= n 2^(k^(1/d)/8) / (6 k^(3/2))``."""
    if k < 1 or n < 2 * k or d < 1 or k < 8 ** d:
        return SizeLowerBound(Fraction(n), None, True, False)
    root = _IV.exp(_IV.log(_IV.mpf(k)) / d)
    raw = _enclose(_IV.mpf(n) * _pow2(root / 8) / (6 * _IV.mpf(k) * _IV.sqrt(_IV.mpf(k))))
    if raw.lo <= n:
        return SizeLowerBound(Fraction(n), raw, True, True)
    return SizeLowerBound(raw.lo, raw, False, True)


def growth_check(k_lo: int = 32, k_hi: int = 256,
                 constants: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """Is ``k^(c log k - 3/2)`` strictly increasing on ``k_lo..k_hi``?

    Decided conservatively: each step needs ``lo(f(k+1)) > hi(f(k))``.
    """
    failures = []
    prev = growth_factor(k_lo, constants)
    for k in range(k_lo + 1, k_hi + 1):
        cur = growth_factor(k, constants)
        if not cur.lo > prev.hi:
            failures.append(f"k={k}: {float(cur.lo):.6g} <= {float(prev.hi):.6g}")
        prev = cur
    return BoundReport("growth_factor_increasing", {"k_lo": k_lo, "k_hi": k_hi}, None,
                       k_hi - k_lo, not failures, tuple(failures[:10]), kind="check",
                       constants={"c_balanced": constants.c_enclosure()})


# balanced-product endpoint sweep -------------------------------------------

def balanced_degree_sequences(k: int):
    """Degree tuples ``(k_1, ..., k_p)`` summing to ``k`` with
    ``(1/3)^i k < k_i <= (2/3)^i k`` for ``i < p`` and ``k_p = 1``."""
    if k == 1:
        yield (1,)
        return

    def rec(i: int, left: int, acc: tuple):
        if left == 1:
            yield acc + (1,)
            return
        lo = Fraction(k, 3 ** i)
        hi = Fraction(2 ** i * k, 3 ** i)
        for ki in range(max(1, math.floor(lo) + 1), min(left - 1, math.floor(hi)) + 1):
            yield from rec(i + 1, left - ki, acc + (ki,))

    yield from rec(1, k, ())


def balanced_sweep(n_max: int = 14, k_max: int = 7,
                   constants: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """Exhaustive check of the balanced monomial bound against the largest
    possible product ``prod_{i<p} C(n_i,k_i) * n_p`` over disjoint variable
    blocks of sizes ``n_i``."""
    cases = 0
    failures = []
    for k in range(1, k_max + 1):
        seqs = list(balanced_degree_sequences(k))
        for n in range(2 * k, n_max + 1):
            for ks in seqs:
                for ns in _compositions(n, len(ks)):
                    cases += 1
                    count = math.prod(math.comb(a, b) for a, b in zip(ns[:-1], ks[:-1])) * ns[-1]
                    if count and count > balanced_monomial_bound(k, n, ns[-1], constants).hi:
                        failures.append(f"n={ns} k={ks}: {count}")
    return BoundReport("balanced_sweep", {"n_max": n_max, "k_max": k_max}, None, cases,
                       not failures, tuple(failures[:20]), kind="check",
                       constants={"c_balanced": constants.c_enclosure()})


# monotone upper bound ------------------------------------------------------

def monotone_upper_bound(n: int, k: int) -> Enclosure:
    """``2n n^(log((k-1)/log(2n) + 1)) (log(2n)/(k-1) + 1)^(k-1)``."""
    if k < 2:
        raise BoundPreconditionError(f"closed form needs k >= 2, got {k}")
    if n < 1:
        raise BoundPreconditionError(f"n >= 1 fails: n={n}")
    L = _log2(_IV.mpf(2 * n))
    km1 = _IV.mpf(k - 1)
    e = _log2(km1 / L + 1)
    x = 2 * _IV.mpf(n) * _pow2(e * _log2(_IV.mpf(n))) * _pow2(_log2(L / km1 + 1) * km1)
    return _enclose(x)


def proof_alpha(n: int, k: int) -> Enclosure:
    """``log(1 + (k-1)/log n)``, the exponent chosen in the recurrence argument."""
    if n < 2 or k < 2:
        raise BoundPreconditionError(f"alpha needs n >= 2 and k >= 2, got n={n}, k={k}")
    return _enclose(_log2(1 + _IV.mpf(k - 1) / _log2(_IV.mpf(n))))


def _g(n: int, k: int, alpha):
    return _pow2((1 + alpha) * _log2(_IV.mpf(n))) / _IV.exp(
        _IV.mpf(k - 1) * _IV.log(1 - _pow2(-alpha)))


def g_recurrence_check(alpha=None, n_max: int = 1024, k_max: int = 10) -> BoundReport:
    """Check ``g(2n,k) >= 2 sum_{i<=k} g(n,i)`` and ``g(n,1) >= n`` on powers of two.

    ``g(n,k) = n^(1+alpha) / (1 - 2^-alpha)^(k-1)``.  With ``alpha=None`` the
    proof's exponent for each grid point ``(n, k)`` is used.
    """
    if alpha is not None and not Fraction(alpha) > 0:
        raise BoundPreconditionError("alpha must be positive")
    failures = []
    cases = 0
    n = 2
    while n <= n_max:
        for k in range(2, k_max + 1):
            if alpha is None:
                a = _log2(1 + _IV.mpf(k - 1) / _log2(_IV.mpf(n)))
            else:
                a = _iv(alpha)
            lhs = _g(2 * n, k, a)
            rhs = 2 * sum((_g(n, i, a) for i in range(2, k + 1)), _g(n, 1, a))
            cases += 1
            if not _enclose(lhs).lo >= _enclose(rhs).hi:
                failures.append(f"recurrence n={n} k={k}")
            if not _enclose(_g(n, 1, a)).lo >= n:
                failures.append(f"base n={n} k={k}")
        n *= 2
    return BoundReport("g_recurrence", {"alpha": "proof" if alpha is None else str(alpha),
                                        "n_max": n_max, "k_max": k_max},
                       None, cases, not failures, tuple(failures[:20]), kind="check")


# partition function ---------------------------------------------------------

def partition_function(k: int, method: str = "pentagonal") -> int:
    """Number of partitions of ``k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if method == "pentagonal":
        p = [1] + [0] * k
        for m in range(1, k + 1):
            total = 0
            j = 1
            while True:
                g1 = j * (3 * j - 1) // 2
                if g1 > m:
                    break
                sign = 1 if j % 2 else -1
                total += sign * p[m - g1]
                g2 = j * (3 * j + 1) // 2
                if g2 <= m:
                    total += sign * p[m - g2]
                j += 1
            p[m] = total
        return p[k]
    if method == "dp":
        ways = [1] + [0] * k
        for part in range(1, k + 1):
            for m in range(part, k + 1):
                ways[m] += ways[m - part]
        return ways[k]
    raise ValueError(f"unknown method {method!r}")


def reports_for(n: int, k: int, d: Optional[int] = None, alpha=None) -> list:
    """Every applicable bound at ``(n, k)``; used by the command line."""
    out = []
    lb = lower_bound_size(n, k)
    out.append(BoundReport("lower_bound_size", {"n": n, "k": k}, lb.value, None, True,
                           constants={"trivial": lb.trivial, "c_balanced": DEFAULT_CONSTANTS.c_enclosure()},
                           kind="lower"))
    if d is not None:
        lbd = lower_bound_size_depth(n, k, d)
        out.append(BoundReport("lower_bound_size_depth", {"n": n, "k": k, "d": d}, lbd.value, None, True,
                               constants={"trivial": lbd.trivial}, kind="lower"))
    if k >= 2 and n >= 1:
        out.append(BoundReport("monotone_upper_bound", {"n": n, "k": k}, monotone_upper_bound(n, k),
                               None, True))
    if 1 <= k and 2 * k <= n:
        out.append(BoundReport("formula_monomial_bound_per_leaf", {"n": n, "k": k, "s": 1},
                               formula_monomial_bound(1, k, n), None, True))
    out.append(g_recurrence_check(alpha, max(2, n), max(2, k)))
    return out


def all_pass(reports: Iterable[BoundReport]) -> bool:
    return all(r.passed for r in reports)
