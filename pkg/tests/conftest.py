from fractions import Fraction

import pytest

from hypothesis import settings, strategies as st

from symformula.formula_ir import Const, Prod, Sum, Var
from symformula.polynomial import Poly

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, n_vars=3, max_terms=4, max_deg=3, commutative=True):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.lists(st.integers(1, n_vars), max_size=max_deg)))
        if commutative:
            mono = tuple(sorted(mono))
        terms[mono] = terms.get(mono, Fraction(0)) + draw(rationals)
    return Poly(terms, commutative)


@st.composite
def formulas(draw, n_vars=4, max_leaves=10):
    leaves = draw(st.integers(1, max_leaves))

    def gen(budget):
        if budget == 1:
            if draw(st.booleans()) and draw(st.booleans()):
                return Const(draw(rationals))
            return Var(draw(st.integers(1, n_vars)))
        cut = draw(st.integers(1, budget - 1))
        op = Sum if draw(st.booleans()) else Prod
        return op(gen(cut), gen(budget - cut))

    return gen(leaves)


points = st.fixed_dictionaries({i: rationals for i in range(1, 5)})



_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.get_closest_marker("acceptance") is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance[item.nodeid] = (label, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed in _acceptance.values():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {label}")
