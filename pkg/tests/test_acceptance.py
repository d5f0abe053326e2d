"""Acceptance gate: one test per criterion at its stated scale and tolerance.

A summary line per criterion is printed at the end of the session by the
hook in ``conftest.py``.
"""

import math
import time

import pytest

from symformula import bounds, constructions, corpus, suite
from symformula.cli import main
from symformula.formula_ir import expand, verify_properties
from symformula.polynomial import newton_Z, oracle_S

pytestmark = pytest.mark.acceptance

GRID = [(n, k) for n in range(1, 11) for k in range(1, n + 1)]
BUILDERS = {
    "ben_or": constructions.ben_or,
    "newton_homogeneous_formula": constructions.newton_homogeneous_formula,
    "depth4_formula": constructions.depth4_formula,
    "monotone_dc": constructions.monotone_dc,
}


@pytest.fixture(scope="module")
def built():
    start = time.monotonic()
    forms = {(name, n, k): f(n, k) for name, f in BUILDERS.items() for n, k in GRID}
    return forms, time.monotonic() - start


def test_criterion_01_oracle_equivalence(built):
    """1 oracle equivalence, 1 <= k <= n <= 10, all four constructions"""
    forms, build_seconds = built
    start = time.monotonic()
    bad = [key for key, f in forms.items() if expand(f) != oracle_S(key[1], key[2])]
    assert not bad
    assert build_seconds + time.monotonic() - start < 300


def test_criterion_02_structural_certificates(built):
    """2 structural certificates on the same grid"""
    bad = []
    for (name, n, k), f in built[0].items():
        rep = verify_properties(f)
        if name == "ben_or":
            ok = f.product_depth <= 1 and rep.multilinear
        elif name == "newton_homogeneous_formula":
            ok = rep.homogeneous
        elif name == "depth4_formula":
            ok = rep.homogeneous and f.product_depth <= 2
        else:
            ok = rep.monotone and rep.multilinear and rep.homogeneous
        if not ok:
            bad.append((name, n, k))
    assert not bad


def test_criterion_03_size_certificates():
    """3 size certificates: ben_or, depth4, monotone closed form, newton linearity"""
    bad = []
    for n in range(1, 65):
        if constructions.ben_or(n, n).leaves > 4 * (n + 1) ** 2:
            bad.append(("ben_or", n))
    for k in range(1, 11):
        pk = bounds.partition_function(k)
        for n in range(k, 65):
            if constructions.depth4_formula(n, k).leaves > pk * (k * n + 1):
                bad.append(("depth4", n, k))
    for k in range(2, 9):
        for n in range(2 * k, 65):
            if constructions.monotone_dc(n, k).leaves > math.ceil(bounds.monotone_upper_bound(n, k).hi):
                bad.append(("monotone", n, k))
    for k in (2, 3, 4):
        for n in (8, 16, 32):
            a = constructions.newton_homogeneous_formula(n, k).leaves
            b = constructions.newton_homogeneous_formula(2 * n, k).leaves
            if b != 2 * a:
                bad.append(("newton", n, k, a, b))
    assert not bad


def test_criterion_04_binomial_product_sweep():
    """4 binomial product inequality, n <= 14, k <= 7, under one minute"""
    start = time.monotonic()
    rep = bounds.lemma1_sweep(14, 7)
    assert rep.passed, rep.failures
    assert rep.compared > 0
    assert time.monotonic() - start < 60


def test_criterion_05_decomposition_suite():
    """5 balanced certificates on 200 formulas and form certificates on a bounded-depth corpus"""
    balanced = suite.balanced_corpus_section(2024, 0)
    assert balanced.cases == 200 and balanced.passed, balanced.failures
    forms = corpus.decomposition_corpus(2024, 200)
    assert all(f.leaves <= 80 for f in forms)
    form = suite.form_corpus_section(7, 0)
    assert form.cases >= 40 and form.passed, form.failures


def test_criterion_06_frontier_identity():
    """6 frontier identity on newton circuits k <= 8 and 50 random w-homogeneous circuits"""
    res = suite.frontier_section(11, 0)
    assert res.cases == 57 and res.passed, res.failures


def test_criterion_07_upper_lower_sandwich():
    """7 sandwich lower <= monotone leaves <= upper, 2 <= k <= 8, n = 2k..64"""
    bad = []
    for k in range(2, 9):
        for n in range(2 * k, 65):
            leaves = constructions.monotone_dc(n, k).leaves
            lb = bounds.lower_bound_size(n, k)
            if not (lb.value <= leaves <= bounds.monotone_upper_bound(n, k).hi):
                bad.append((n, k))
    assert not bad


def test_criterion_07_growth_clause():
    """7 growth clause: k^(c log k - 3/2) strictly increasing on 32..256"""
    rep = bounds.growth_check(32, 256)
    assert rep.passed, f"factor decreases: {rep.failures[:3]}"


def test_criterion_08_noncommutative():
    """8 noncommutative ben_or and monotone_dc, 1 <= k <= n <= 8"""
    bad = []
    for n in range(1, 9):
        for k in range(1, n + 1):
            target = oracle_S(n, k, commutative=False)
            for name, f in (("ben_or", constructions.ben_or), ("monotone_dc", constructions.monotone_dc)):
                if expand(f(n, k), commutative=False) != target:
                    bad.append((name, n, k))
    assert not bad


def test_criterion_09_g_recurrence_and_partitions():
    """9 g recurrence up to n = 1024, k <= 10, and partition counts for k <= 16"""
    rep = bounds.g_recurrence_check(None, 1024, 10)
    assert rep.passed, rep.failures
    assert all(bounds.partition_function(k) == len(newton_Z(k)) for k in range(1, 17))


def test_criterion_10_determinism_and_roundtrip(capsys):
    """10 selftest byte-identical across runs and 500 serialize/parse round trips"""
    outputs = []
    for _ in range(2):
        code = main(["selftest", "--seed", "42", "--format", "json"])
        outputs.append((code, capsys.readouterr().out))
    assert outputs[0] == outputs[1]
    assert outputs[0][0] == 0
    res = suite.roundtrip_section(42, 0)
    assert res.cases == 500 and res.passed
