"""Seeded self-test sections shared by the ``selftest`` command.

Each section is a module-level function ``(seed, n_max) -> SectionResult`` so
sections can run in worker processes.  Output never depends on timing or
worker scheduling.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import bounds, constructions, corpus, decomposition
from .formula_ir import (
    circuit_polys,
    expand,
    node_poly,
    parse,
    serialize,
    structurally_equal,
    verify_properties,
)
from .polynomial import NEG_INF, Poly, newton_Z, oracle_P, oracle_S, poly_props


@dataclass(frozen=True)
class SectionResult:
    name: str
    cases: int
    failures: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"name": self.name, "cases": self.cases, "passed": self.passed,
                "failures": list(self.failures)}


PROMISED = {
    "ben-or": ("multilinear",),
    "newton": ("homogeneous",),
    "depth4": ("homogeneous",),
    "monotone": ("monotone", "multilinear", "homogeneous"),
    "power-sum": ("homogeneous",),
}


def promised_ok(name: str, root, report) -> list:
    """Names of promised structural properties that fail."""
    bad = [p for p in PROMISED[name] if not getattr(report, p)]
    if name == "ben-or" and root.product_depth > 1:
        bad.append("product_depth<=1")
    if name == "depth4" and root.product_depth > 2:
        bad.append("product_depth<=2")
    return bad


def oracle_section(seed: int, n_max: int) -> SectionResult:
    cases, fails = 0, []
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            target = oracle_S(n, k)
            for name in ("ben-or", "newton", "depth4", "monotone"):
                cases += 1
                if expand(constructions.CONSTRUCTIONS[name](n, k)) != target:
                    fails.append(f"{name} n={n} k={k}")
    return SectionResult("oracle_equivalence", cases, tuple(fails))


def structure_section(seed: int, n_max: int) -> SectionResult:
    cases, fails = 0, []
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            for name in ("ben-or", "newton", "depth4", "monotone"):
                root = constructions.CONSTRUCTIONS[name](n, k)
                cases += 1
                bad = promised_ok(name, root, verify_properties(root))
                if bad:
                    fails.append(f"{name} n={n} k={k}: {','.join(bad)}")
    return SectionResult("structural_certificates", cases, tuple(fails))


def noncommutative_section(seed: int, n_max: int) -> SectionResult:
    cases, fails = 0, []
    for n in range(1, min(n_max, 8) + 1):
        for k in range(1, n + 1):
            target = oracle_S(n, k, commutative=False)
            for name in ("ben-or", "monotone"):
                cases += 1
                if expand(constructions.CONSTRUCTIONS[name](n, k), commutative=False) != target:
                    fails.append(f"{name} n={n} k={k}")
    return SectionResult("noncommutative", cases, tuple(fails))


def size_section(seed: int, n_max: int) -> SectionResult:
    cases, fails = 0, []
    top = 8 * n_max
    for n in range(1, top + 1):
        cases += 1
        if constructions.ben_or(n, n).leaves > 4 * (n + 1) ** 2:
            fails.append(f"ben-or n={n}")
    for k in range(1, min(10, n_max) + 1):
        for n in range(k, top + 1, 7):
            cases += 1
            if constructions.depth4_formula(n, k).leaves > bounds.partition_function(k) * (k * n + 1):
                fails.append(f"depth4 n={n} k={k}")
    for k in range(2, 9):
        for n in range(2 * k, 65):
            cases += 1
            if constructions.monotone_dc(n, k).leaves > math.ceil(bounds.monotone_upper_bound(n, k).hi):
                fails.append(f"monotone n={n} k={k}")
    for k in (2, 3, 4):
        for n in (8, 16, 32):
            cases += 1
            a = constructions.newton_homogeneous_formula(n, k).leaves
            b = constructions.newton_homogeneous_formula(2 * n, k).leaves
            if b != 2 * a:
                fails.append(f"newton ratio n={n} k={k}: {b}/{a}")
    return SectionResult("size_certificates", cases, tuple(fails))


def _report_section(name: str, report) -> SectionResult:
    return SectionResult(name, int(report.compared), tuple(report.failures))


def lemma1_section(seed: int, n_max: int) -> SectionResult:
    return _report_section("lemma1_sweep", bounds.lemma1_sweep(14, 7))


def balanced_sweep_section(seed: int, n_max: int) -> SectionResult:
    return _report_section("balanced_bound_sweep", bounds.balanced_sweep(14, 7))


def g_recurrence_section(seed: int, n_max: int) -> SectionResult:
    return _report_section("g_recurrence", bounds.g_recurrence_check(None, 1024, 10))


def partition_section(seed: int, n_max: int) -> SectionResult:
    fails = []
    for k in range(0, 17):
        p = bounds.partition_function(k)
        if p != bounds.partition_function(k, "dp") or (k and p != len(newton_Z(k))):
            fails.append(f"k={k}")
    return SectionResult("partition_vs_newton", 17, tuple(fails))


def balanced_corpus_section(seed: int, n_max: int) -> SectionResult:
    fails = []
    forms = corpus.decomposition_corpus(seed, 200)
    for i, f in enumerate(forms):
        cert = decomposition.balanced_decompose(f)
        rep = decomposition.validate_balanced(cert, f)
        if not rep.passed:
            fails.append(f"formula {i}: {rep.failures[0]}")
        p = node_poly(f)
        if p.is_zero():
            continue
        k = p.degree
        n = max(2 * k, len(p.variables()))
        if len(p) > bounds.formula_monomial_bound(f.leaves, k, n).hi:
            fails.append(f"formula {i}: monomial bound")
    return SectionResult("balanced_decomposition", len(forms), tuple(fails))


def form_corpus_section(seed: int, n_max: int) -> SectionResult:
    fails = []
    items = corpus.form_corpus(seed)
    for i, (f, q, d) in enumerate(items):
        cert = decomposition.form_decompose(f, q, d)
        rep = decomposition.validate_form(cert, f, q, cert.params["ell"])
        if not rep.passed:
            fails.append(f"formula {i}: {rep.failures[0]}")
        p = node_poly(f)
        k = p.degree
        n = max(2 * k, len(p.variables()))
        if k != NEG_INF and n >= 2 * k and cert.params["ell"] >= 2:
            for part in cert.parts:
                if len(part.product()) > bounds.formed_monomial_bound(k, n, part.p, part.ell, part.minvar).hi:
                    fails.append(f"formula {i}: formed bound")
        if k != NEG_INF and k >= 8 ** d and len(p) > bounds.const_depth_monomial_bound(f.leaves, k, n, d).hi:
            fails.append(f"formula {i}: const-depth bound")
    return SectionResult("form_decomposition", len(items), tuple(fails))


def frontier_section(seed: int, n_max: int) -> SectionResult:
    fails = []
    items = [(constructions.newton_circuit(k), {i: i for i in range(1, k + 1)}) for k in range(2, 9)]
    items += corpus.circuit_corpus(seed, 50)
    for i, (c, w) in enumerate(items):
        polys = circuit_polys(c)
        target = polys[c.output]
        if target.is_zero() or max(poly_props(target, w).w_degree_set) < 2:
            ok = True
        else:
            total = Poly.zero()
            for v, h, factors in constructions.frontier_decomposition(c, w):
                term = expand(h)
                for g in factors:
                    term = term * polys[g]
                total = total + term
            ok = total == target
        if not ok:
            fails.append(f"circuit {i}: frontier identity")
        if expand(constructions.circuit_to_formula(c, w)) != target:
            fails.append(f"circuit {i}: formula differs")
    return SectionResult("frontier_identity", len(items), tuple(fails))


def sandwich_section(seed: int, n_max: int) -> SectionResult:
    cases, fails = 0, []
    for k in range(2, 9):
        for n in range(2 * k, 65):
            cases += 1
            leaves = constructions.monotone_dc(n, k).leaves
            if not bounds.lower_bound_size(n, k).value <= leaves <= bounds.monotone_upper_bound(n, k).hi:
                fails.append(f"n={n} k={k}")
    return SectionResult("upper_lower_sandwich", cases, tuple(fails))


def roundtrip_section(seed: int, n_max: int) -> SectionResult:
    rng = random.Random(seed)
    fails = []
    for i in range(500):
        f = corpus.random_formula(rng, rng.randint(1, 6), rng.randint(1, 30))
        g = parse(serialize(f))
        if not structurally_equal(f, g):
            fails.append(f"formula {i}")
    return SectionResult("serialize_roundtrip", 500, tuple(fails))


SECTIONS = (
    oracle_section, structure_section, noncommutative_section, size_section,
    lemma1_section, balanced_sweep_section, g_recurrence_section, partition_section,
    balanced_corpus_section, form_corpus_section, frontier_section, sandwich_section,
    roundtrip_section,
)


def run_section(index: int, seed: int, n_max: int) -> SectionResult:
    return SECTIONS[index](seed, n_max)


def oracle_for(name: str, n: int, k: int, commutative: bool = True) -> Poly:
    if name == "power-sum":
        return oracle_P(n, k, commutative)
    return oracle_S(n, k, commutative)

