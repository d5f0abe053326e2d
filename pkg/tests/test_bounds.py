import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symformula.bounds import (
    DEFAULT_CONSTANTS,
    BoundConstants,
    BoundPreconditionError,
    Enclosure,
    balanced_degree_sequences,
    balanced_monomial_bound,
    balanced_sweep,
    const_depth_monomial_bound,
    formed_monomial_bound,
    formula_monomial_bound,
    g_recurrence_check,
    growth_check,
    growth_factor,
    lemma1_check,
    lemma1_holds,
    lemma1_sweep,
    lower_bound_size,
    lower_bound_size_depth,
    monotone_upper_bound,
    partition_function,
    proof_alpha,
)
from symformula.constructions import monotone_dc
from symformula.polynomial import newton_Z

C = 1 / (8 * math.log2(3))


def close(enc: Enclosure, value: float, rel: float = 1e-12) -> bool:
    return abs(float(enc) - value) <= rel * max(1.0, abs(value)) and enc.lo <= enc.hi


def test_c_balanced():
    enc = DEFAULT_CONSTANTS.c_enclosure()
    assert close(enc, C)
    assert enc.hi - enc.lo < Fraction(1, 10 ** 50)
    assert Fraction(1, 10) in BoundConstants(Fraction(1, 10)).c_enclosure()


def test_lemma1_examples():
    r = lemma1_check([10], [4])
    assert r.passed and r.compared == math.comb(10, 4)
    r = lemma1_check([3, 3], [2, 1])
    assert r.compared == 9
    assert close(r.bound, 3 * math.sqrt(3) / math.sqrt(2) * 20)
    assert r.passed


@pytest.mark.parametrize("ns,ks", [([3, 3], [2]), ([1, 2], [1, 2]), ([2, 2], [0, 1]), ([-1, 5], [1, 1])])
def test_lemma1_preconditions(ns, ks):
    with pytest.raises(BoundPreconditionError):
        lemma1_check(ns, ks)


def _float_lemma1(ns, ks):
    lhs = math.prod(math.comb(a, b) for a, b in zip(ns, ks))
    k, n = sum(ks), sum(ns)
    return lhs <= 3 * math.sqrt(k) / math.sqrt(math.prod(ks)) * math.comb(n, k) * (1 + 1e-12)


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(1, 4)), min_size=1, max_size=4))
def test_lemma1_exact_test_matches_float(pairs):
    ns = [a for a, _ in pairs]
    ks = [b for _, b in pairs]
    if sum(ns) < 2 * sum(ks):
        ns[0] += 2 * sum(ks) - sum(ns)
    assert lemma1_holds(ns, ks) == _float_lemma1(ns, ks)


def test_lemma1_small_sweep():
    r = lemma1_sweep(10, 5)
    assert r.passed and r.compared > 1000


def test_balanced_bound_k1_collapses():
    for n in (2, 5, 30):
        for m in (0, 1, 4):
            assert balanced_monomial_bound(1, n, m) == Enclosure(Fraction(3 * m), Fraction(3 * m)) or \
                Fraction(3 * m) in balanced_monomial_bound(1, n, m)


def test_formula_bound_pinned():
    b = formula_monomial_bound(12, 4, 8)
    expected = 3 * 4 ** (-C * 2 + 1.5) * math.comb(8, 4) * 12 / 8
    assert close(b, expected)
    assert abs(float(b) - 2025.05186305073) < 1e-9


@given(st.integers(1, 30), st.integers(0, 40), st.integers(1, 200))
def test_bounds_match_float_formulas(k, extra, s):
    n = 2 * k + extra
    lk = math.log2(k)
    expected = 3 * k ** (-C * lk + 1.5) * math.comb(n, k) * s / n
    assert close(formula_monomial_bound(s, k, n), expected, 1e-9)


def test_formed_bound_plug_in():
    b = formed_monomial_bound(4, 10, 2, 2, 3)
    assert close(b, 3 * 4 ** 1.5 * 2 ** -0.5 * math.comb(10, 4) * 3 / 10)
    with pytest.raises(BoundPreconditionError):
        formed_monomial_bound(4, 10, 1, 2, 3)
    with pytest.raises(BoundPreconditionError):
        formed_monomial_bound(4, 10, 2, Fraction(3, 2), 3)


def test_const_depth_bound():
    n, s = 20, 7
    b = const_depth_monomial_bound(s, 8, n, 1)
    assert close(b, 6 * 8 ** 1.5 * 0.5 * math.comb(n, 8) * s / n)
    with pytest.raises(BoundPreconditionError, match="k\\^\\(1/d\\) >= 8"):
        const_depth_monomial_bound(s, 7, n, 1)
    with pytest.raises(BoundPreconditionError):
        const_depth_monomial_bound(s, 8, 15, 1)


def test_lower_bound_trivial_cases():
    lb = lower_bound_size(4, 2)
    assert lb.trivial and lb.value == 4 and lb.hypothesis
    below = lower_bound_size(5, 3)
    assert below.trivial and below.value == 5 and not below.hypothesis
    assert lower_bound_size_depth(64, 8, 2).trivial


def test_lower_bound_nontrivial_far_out():
    # the size bound only beats n once k^(c log k - 3/2) > 3
    lb = lower_bound_size(2 ** 26, 2 ** 25)
    assert not lb.trivial and lb.value > 3 * 2 ** 26
    d = lower_bound_size_depth(2 ** 20, 2 ** 16, 1)
    assert not d.trivial


def test_lower_bound_monotone_along_diagonal():
    vals = [lower_bound_size(2 * k, k).value for k in range(1, 65)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_lower_bound_below_monotone_sizes():
    for k in range(2, 9):
        for n in range(2 * k, 65, 5):
            assert lower_bound_size(n, k).value <= monotone_dc(n, k).leaves


def test_growth_factor_turns_at_729():
    # d/dL of (c L - 3/2) L is 2cL - 3/2, zero at L = 6 log2 3
    assert growth_factor(728).lo > growth_factor(729).hi
    assert growth_factor(730).lo > growth_factor(729).hi
    assert growth_check(729, 900).passed
    assert not growth_check(32, 64).passed
    assert close(growth_factor(64), 64 ** (C * 6 - 1.5))


def test_monotone_upper_bound_value():
    b = monotone_upper_bound(2, 2)
    assert 18 in b and b.hi - b.lo < Fraction(1, 10 ** 40)
    with pytest.raises(BoundPreconditionError):
        monotone_upper_bound(5, 1)


@given(st.integers(1, 200), st.integers(2, 12))
def test_monotone_upper_bound_float(n, k):
    L = math.log2(2 * n)
    v = 2 * n * n ** math.log2((k - 1) / L + 1) * (L / (k - 1) + 1) ** (k - 1)
    assert close(monotone_upper_bound(n, k), v, 1e-9)


def test_g_recurrence():
    assert g_recurrence_check(None, 1024, 10).passed
    assert g_recurrence_check(Fraction(1), 64, 6).passed
    assert g_recurrence_check(Fraction(1, 100), 64, 6).passed
    with pytest.raises(BoundPreconditionError):
        g_recurrence_check(0)
    assert close(proof_alpha(16, 5), math.log2(2))


def _brute_partitions(k, largest=None):
    largest = k if largest is None else largest
    if k == 0:
        return 1
    return sum(_brute_partitions(k - f, f) for f in range(1, min(k, largest) + 1))


def test_partition_function():
    assert partition_function(0) == partition_function(1) == 1
    assert partition_function(4) == 5
    for k in range(40):
        assert partition_function(k) == partition_function(k, "dp") == _brute_partitions(k)
    assert partition_function(100) == 190569292
    for k in range(1, 17):
        assert partition_function(k) == len(newton_Z(k))
    with pytest.raises(ValueError):
        partition_function(5, "bogus")


def test_balanced_degree_sequences():
    assert list(balanced_degree_sequences(1)) == [(1,)]
    assert list(balanced_degree_sequences(2)) == [(1, 1)]
    for k in range(2, 12):
        for seq in balanced_degree_sequences(k):
            assert sum(seq) == k and seq[-1] == 1
            for i, d in enumerate(seq[:-1], start=1):
                assert Fraction(k, 3 ** i) < d <= Fraction(2 ** i * k, 3 ** i)


def test_balanced_sweep_small():
    r = balanced_sweep(10, 5)
    assert r.passed and r.compared > 100
