import math
from fractions import Fraction

import pytest

from symformula import bounds
from symformula.constructions import (
    CONSTRUCTIONS,
    PreconditionError,
    ben_or,
    circuit_to_formula,
    circuit_to_formula_size_bound,
    depth4_formula,
    frontier,
    frontier_decomposition,
    gate_quotient,
    interpolation_coefficients,
    monotone_dc,
    newton_circuit,
    newton_formula_over_y,
    newton_homogeneous_formula,
    newton_size_fit,
    power_sum_formula,
)
from symformula.corpus import circuit_corpus
from symformula.formula_ir import (
    PROD,
    SUM,
    VAR,
    Circuit,
    Gate,
    StructuralError,
    Sum,
    Var,
    circuit_from_formula,
    circuit_polys,
    expand,
    verify_properties,
)
from symformula.polynomial import Poly, newton_Z, newton_weighting, oracle_P, oracle_S, poly_props

x = [None] + [Poly.var(i) for i in range(1, 9)]


def test_ben_or_hand_solved_n1():
    plan = interpolation_coefficients(1, 1)
    assert plan.points == (1, 2)
    assert plan.coefficients == (-1, 1)
    assert interpolation_coefficients(1, 0).coefficients == (2, -1)
    assert expand(ben_or(1, 1)) == x[1]


@pytest.mark.parametrize("n", range(1, 9))
def test_interpolation_rows_solve_vandermonde(n):
    for k in range(n + 1):
        assert interpolation_coefficients(n, k).residual_is_zero()


def test_ben_or_examples():
    assert expand(ben_or(3, 0)) == Poly.const(1)
    f = ben_or(4, 2)
    assert expand(f) == oracle_S(4, 2)
    r = verify_properties(f)
    assert r.multilinear and not r.homogeneous
    assert f.product_depth == 1


@pytest.mark.parametrize("n", [1, 2, 5, 16, 40, 64])
def test_ben_or_size(n):
    assert ben_or(n, n // 2).leaves == (n + 1) * (2 * n + 1) <= 4 * (n + 1) ** 2


def test_preconditions():
    for name, build in CONSTRUCTIONS.items():
        if name != "power-sum":
            with pytest.raises(PreconditionError):
                build(2, 3)
        with pytest.raises(PreconditionError):
            build(0, 0)


def test_newton_circuit_examples():
    assert expand(newton_circuit(1)) == Poly.var(1)
    assert expand(newton_circuit(3)) == newton_Z(3)
    assert expand(newton_circuit(0)) == Poly.const(1)


@pytest.mark.parametrize("k", range(1, 11))
def test_newton_circuit_w_homogeneous_and_small(k):
    c = newton_circuit(k)
    assert verify_properties(c, newton_weighting(k)).w_homogeneous
    assert len(c.cone()) <= 3 * k * k
    assert c.size <= 3 * k


def test_circuit_to_formula_newton_2():
    f = circuit_to_formula(newton_circuit(2), newton_weighting(2))
    assert expand(f) == (Poly.var(1) ** 2 - Poly.var(2)).scale(Fraction(1, 2))


@pytest.mark.parametrize("k", range(1, 9))
def test_circuit_to_formula_newton(k):
    w = newton_weighting(k)
    f = circuit_to_formula(newton_circuit(k), w)
    assert expand(f) == newton_Z(k)
    assert verify_properties(f, w).w_homogeneous
    assert f.leaves <= circuit_to_formula_size_bound(len(newton_circuit(k).cone()), k)


def test_circuit_to_formula_degree_one_base_case():
    f = Sum(Var(1), Var(2), Var(3))
    out = circuit_to_formula(circuit_from_formula(f), {1: 1, 2: 1, 3: 1})
    assert expand(out) == expand(f)
    assert out.leaves <= f.leaves


def test_circuit_to_formula_rejects_inhomogeneous():
    c = Circuit((Gate(VAR, (), 1), Gate(VAR, (), 2), Gate(PROD, (0, 0)), Gate(SUM, (2, 1))), 3)
    with pytest.raises(StructuralError, match="gate 3"):
        circuit_to_formula(c, {1: 1, 2: 1})


def test_frontier_single_product():
    # (x1*x2)*(x3*x4): only the root has degree above 2 with both children at 2
    g = (Gate(VAR, (), 1), Gate(VAR, (), 2), Gate(VAR, (), 3), Gate(VAR, (), 4),
         Gate(PROD, (0, 1)), Gate(PROD, (2, 3)), Gate(PROD, (4, 5)))
    c = Circuit(g, 6)
    w = {i: 1 for i in range(1, 5)}
    assert frontier(c, w) == [6]
    assert expand(gate_quotient(c, 6, w)) == Poly.const(1)


def test_frontier_sum_of_products():
    g = (Gate(VAR, (), 1), Gate(VAR, (), 2), Gate(VAR, (), 3), Gate(VAR, (), 4),
         Gate(PROD, (0, 1)), Gate(PROD, (2, 3)), Gate(SUM, (4, 5)))
    c = Circuit(g, 6)
    w = {i: 1 for i in range(1, 5)}
    dec = frontier_decomposition(c, w)
    assert sorted(v for v, _, _ in dec) == [4, 5]
    assert all(expand(h) == Poly.const(1) for _, h, _ in dec)


def _frontier_sum(c, w):
    polys = circuit_polys(c)
    total = Poly.zero()
    for v, h, factors in frontier_decomposition(c, w):
        term = expand(h)
        for g in factors:
            term = term * polys[g]
        total = total + term
    return total


@pytest.mark.parametrize("k", range(2, 9))
def test_frontier_identity_newton(k):
    assert _frontier_sum(newton_circuit(k), newton_weighting(k)) == newton_Z(k)


def test_frontier_and_formula_on_random_circuits():
    for c, w in circuit_corpus(5, 30):
        target = circuit_polys(c)[c.output]
        if not target.is_zero() and max(poly_props(target, w).w_degree_set) >= 2:
            assert _frontier_sum(c, w) == target
        f = circuit_to_formula(c, w)
        assert expand(f) == target
        assert verify_properties(f, w).w_homogeneous
        k = max(poly_props(target, w).w_degree_set or {1})
        assert f.leaves <= circuit_to_formula_size_bound(len(c.cone()), k)


@pytest.mark.parametrize("k", range(1, 9))
def test_newton_formula_over_y(k):
    f = newton_formula_over_y(k)
    assert expand(f) == newton_Z(k)
    assert verify_properties(f, newton_weighting(k)).w_homogeneous


def test_newton_homogeneous_examples():
    assert expand(newton_homogeneous_formula(2, 2)) == x[1] * x[2]
    f = newton_homogeneous_formula(6, 3)
    assert expand(f) == oracle_S(6, 3)
    assert verify_properties(f).homogeneous


@pytest.mark.parametrize("k", [2, 3, 4])
def test_newton_size_linear_in_n(k):
    s16 = newton_homogeneous_formula(16, k).leaves
    s32 = newton_homogeneous_formula(32, k).leaves
    assert Fraction(s32, 32) == Fraction(s16, 16)


def test_newton_size_fit_reports_quadratic_log_growth():
    fit = newton_size_fit(8)
    assert set(fit["sizes"]) == set(range(2, 9))
    assert 0 <= fit["a"] < 1


def test_depth4_examples():
    assert expand(depth4_formula(3, 2)) == oracle_S(3, 2)
    f = depth4_formula(8, 4)
    assert f.product_depth == 2
    assert f.op == SUM and len(f.children) == bounds.partition_function(4) == 5


@pytest.mark.parametrize("k", range(1, 11))
def test_depth4_size(k):
    for n in (k, 2 * k, 64):
        assert depth4_formula(n, k).leaves <= bounds.partition_function(k) * (k * n + 1)


def test_monotone_examples():
    f = monotone_dc(2, 2)
    assert f.leaves == 2 and expand(f) == oracle_S(2, 2)
    assert monotone_dc(4, 2).leaves <= math.ceil(bounds.monotone_upper_bound(4, 2).hi)
    g = monotone_dc(8, 3)
    assert expand(g) == oracle_S(8, 3)
    r = verify_properties(g)
    assert r.monotone and r.multilinear and r.homogeneous


@pytest.mark.parametrize("n", [1, 2, 7, 33, 64])
def test_monotone_degree_one_has_n_leaves(n):
    assert monotone_dc(n, 1).leaves == n


def test_power_sum_examples():
    f = power_sum_formula(3, 1)
    assert expand(f) == x[1] + x[2] + x[3] and f.leaves == 3
    g = power_sum_formula(2, 3)
    assert expand(g) == x[1] ** 3 + x[2] ** 3 and g.leaves == 6
    assert expand(power_sum_formula(5, 4)) == oracle_P(5, 4)


@pytest.mark.parametrize("name", ["ben-or", "monotone"])
def test_noncommutative_expansion(name):
    for n in range(1, 6):
        for k in range(n + 1):
            f = CONSTRUCTIONS[name](n, k)
            assert expand(f, commutative=False) == oracle_S(n, k, commutative=False)


@pytest.mark.parametrize("k", [0, 1])
def test_degenerate_degrees(k):
    for name in ("newton", "depth4", "monotone", "ben-or"):
        assert expand(CONSTRUCTIONS[name](4, k)) == oracle_S(4, k)
