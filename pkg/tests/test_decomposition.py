from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symformula.constructions import monotone_dc
from symformula.corpus import random_bounded_depth, random_homogeneous_multilinear
from symformula.decomposition import (
    BalancedFactorization,
    DecompositionCertificate,
    DecompositionError,
    balanced_decompose,
    find_deep_product_node,
    find_split_node,
    form_decompose,
    group_factors,
    path_quotient,
    validate_balanced,
    validate_form,
)
from symformula.formula_ir import (
    Const,
    Prod,
    Sum,
    Var,
    binarize,
    expand,
    iter_positions,
    node_poly,
    restrict,
    subformula,
)
from symformula.polynomial import Poly

x1, x2, x3, x4 = (Var(i) for i in range(1, 5))


def test_degree_one_base_case():
    f = Sum(x1, x2)
    cert = balanced_decompose(f)
    assert [p.degrees for p in cert.parts] == [(1,)]
    assert cert.parts[0].minvar == 2 <= f.leaves
    assert validate_balanced(cert, f).passed


def test_single_product():
    f = Prod(x1, x2)
    cert = balanced_decompose(f)
    assert len(cert.parts) == 1
    part = cert.parts[0]
    assert part.degrees == (1, 1) and part.minvar == 1
    assert part.product() == expand(f)
    assert validate_balanced(cert, f).passed


def test_monotone_formula_validates():
    f = binarize(monotone_dc(4, 2))
    cert = balanced_decompose(f)
    rep = validate_balanced(cert, f)
    assert rep.passed
    assert cert.minvar_total <= f.leaves


def test_zero_polynomial_has_no_parts():
    f = Sum(Prod(x1, x2), Prod(Const(-1), x2, x1))
    cert = balanced_decompose(binarize(f))
    assert cert.parts == ()
    assert validate_balanced(cert, binarize(f)).passed


def test_preconditions():
    with pytest.raises(DecompositionError, match="not homogeneous"):
        balanced_decompose(Sum(x1, Prod(x2, x3)))
    with pytest.raises(DecompositionError, match="fan-in"):
        balanced_decompose(Sum(x1, x2, x3))
    with pytest.raises(DecompositionError):
        balanced_decompose(Const(3))


def _tampered(cert, part_index, new_factors):
    parts = list(cert.parts)
    parts[part_index] = BalancedFactorization(tuple(new_factors))
    return DecompositionCertificate(cert.kind, tuple(parts), cert.source_size, cert.degree)


def test_tampered_certificates_fail():
    f = binarize(monotone_dc(6, 3))
    cert = balanced_decompose(f)
    assert validate_balanced(cert, f).passed
    fs = list(cert.parts[0].factors)
    # extra variable in a factor: degree and sum both break
    bumped = _tampered(cert, 0, [fs[0] * Poly.var(9)] + fs[1:])
    assert not validate_balanced(bumped, f).passed
    # rescaled factor: only the sum equality breaks
    scaled = _tampered(cert, 0, [fs[0].scale(2)] + fs[1:])
    rep = validate_balanced(scaled, f)
    assert not rep.passed and any("sum" in m for m in rep.failures)
    dropped = DecompositionCertificate("balanced", cert.parts[1:], cert.source_size, cert.degree)
    assert not validate_balanced(dropped, f).passed


@given(st.integers(0, 10 ** 6), st.integers(2, 8))
def test_balanced_certificates_on_random_formulas(seed, k):
    f = random_homogeneous_multilinear(seed, k, 12, 40)
    cert = balanced_decompose(f)
    assert validate_balanced(cert, f).passed
    for part in cert.parts:
        prod = part.product()
        assert all(len(set(m)) == len(m) for m in prod.terms)


@given(st.integers(0, 10 ** 6), st.integers(2, 8))
def test_split_node_degree_window(seed, k):
    f = random_homogeneous_multilinear(seed, k, 10, 30, const_rate=0)
    if node_poly(f).is_zero():
        return
    path = find_split_node(f)
    d = node_poly(subformula(f, path)).degree
    assert 3 * d >= k and 3 * d < 2 * k


@given(st.integers(0, 10 ** 6))
def test_path_quotient_identity(seed):
    f = random_homogeneous_multilinear(seed, 5, 10, 25)
    for _, path, _ in iter_positions(f):
        h = path_quotient(f, path)
        assert h * expand(subformula(f, path)) + expand(restrict(f, path, 0)) == expand(f)


def test_group_factors():
    ps = [Poly.var(i) for i in range(1, 10)]
    groups = group_factors(ps, Fraction(2), 3)
    assert len(groups) == 3
    assert all(g.degree >= 2 for g in groups)
    assert sum(g.degree for g in groups) == 9
    with pytest.raises(DecompositionError):
        group_factors(ps[:3], Fraction(2), 3)


@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 1, 5), (3, 1, 8), (2, 2, 17)]))
def test_form_certificates(seed, params):
    q, d, k = params
    f = random_bounded_depth(seed, k, k + 3, d)
    cert = form_decompose(f, q, d)
    ell = cert.params["ell"]
    assert ell == Fraction(k, (2 * q) ** d)
    assert validate_form(cert, f, q, ell).passed


@given(st.integers(0, 10 ** 6))
def test_deep_product_node(seed):
    k, r, d = 10, 4, 1
    f = random_bounded_depth(seed, k, 12, d)
    path = find_deep_product_node(f, r, d)
    w = subformula(f, path)
    dw = node_poly(w).degree
    assert dw >= Fraction(k, r ** (d - 1))
    assert all(node_poly(c).degree < Fraction(dw, r) for c in w.children)


def test_form_preconditions():
    f = random_bounded_depth(1, 5, 6, 1)
    with pytest.raises(DecompositionError, match="q must be"):
        form_decompose(f, 1, 1)
    with pytest.raises(DecompositionError, match=r"k \(2q\)\^-d > 1"):
        form_decompose(f, 3, 1)
    with pytest.raises(DecompositionError, match="product-depth"):
        form_decompose(random_bounded_depth(1, 17, 18, 2), 2, 1)
    with pytest.raises(DecompositionError, match="multilinear"):
        form_decompose(Prod(x1, x1, x1, x1, x1), 2, 1)


def test_form_tampered_fails():
    f = random_bounded_depth(3, 9, 10, 1)
    cert = form_decompose(f, 2, 1)
    assert validate_form(cert, f, 2, cert.params["ell"]).passed
    assert not validate_form(cert, f, 3, cert.params["ell"]).passed
    assert not validate_form(cert, f, 2, 100).passed
