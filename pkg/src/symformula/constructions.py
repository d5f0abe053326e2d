"""Formula constructions for the elementary symmetric polynomials.

* :func:`ben_or` -- depth-three multilinear (nonhomogeneous) formula from
  interpolating ``prod_i (x_i t + 1)`` at ``t = 1..n+1``.
* :func:`newton_homogeneous_formula` -- homogeneous formula: the Newton
  recurrence circuit for ``Z_k`` is turned into a w-homogeneous formula by
  :func:`circuit_to_formula` and composed with power-sum formulas.
* :func:`depth4_formula` -- homogeneous sum-product-sum-product formula from
  the monomial expansion of ``Z_k``.
* :func:`monotone_dc` -- monotone divide-and-conquer formula.

Newton polynomials ``Z_k`` live over ``y_1..y_k``, encoded as variable ids
``1..k`` with the weighting ``w(y_i) = i``.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .formula_ir import (
    CONST,
    PROD,
    SUM,
    VAR,
    Circuit,
    Const,
    Gate,
    Node,
    StructuralError,
    Var,
    circuit_polys,
    postorder,
    product_of,
    substitute,
    sum_of,
    verify_properties,
)
from .polynomial import Poly, Weighting, check_weighting, newton_Z, newton_weighting

#: ``newton_circuit(k)`` has at most ``NEWTON_LEAF_FACTOR * k`` leaves and at most
#: ``NEWTON_GATE_FACTOR * k**2`` gates (k >= 1).
NEWTON_LEAF_FACTOR = 3
NEWTON_GATE_FACTOR = 3

#: ``circuit_to_formula`` output size is at most ``(s*k) ** (A * log2(k) + B)``
#: for a circuit with ``s`` gates and output w-degree ``k >= 2``.
CIRCUIT_TO_FORMULA_A = 1
CIRCUIT_TO_FORMULA_B = 1


class PreconditionError(ValueError):
    """Construction parameters outside the supported range."""


def _check_nk(n: int, k: int) -> None:
    if n < 1:
        raise PreconditionError(f"n must be positive, got n={n}")
    if k < 0:
        raise PreconditionError(f"k must be nonnegative, got k={k}")
    if k > n:
        raise PreconditionError(f"k={k} exceeds n={n}")


# interpolation ----------------------------------------------------------------

@dataclass(frozen=True)
class InterpolationPlan:
    points: tuple      # t = 1..n+1
    coefficients: tuple  # c_j with S^k_n = sum_j c_j f_{t_j}
    k: int

    def residual_is_zero(self) -> bool:
        """``sum_j c_j t_j^i == [i == k]`` for ``0 <= i <= n``."""
        n = len(self.points) - 1
        return all(
            sum(c * t ** i for c, t in zip(self.coefficients, self.points)) == (1 if i == self.k else 0)
            for i in range(n + 1))


def interpolation_coefficients(n: int, k: int) -> InterpolationPlan:
    """Row ``k`` of the inverse Vandermonde matrix on ``t = 1..n+1``.

    ``c_j`` is the ``t^k`` coefficient of the Lagrange basis polynomial of node
    ``j``: interpolating ``t^i`` is exact for ``i <= n``, so
    ``sum_j c_j j^i = [i == k]``.
    """
    _check_nk(n, k)
    points = tuple(Fraction(t) for t in range(1, n + 2))
    coeffs = []
    for j, tj in enumerate(points):
        basis = [Fraction(1)]  # coefficients in ascending powers of t
        denom = Fraction(1)
        for m, tm in enumerate(points):
            if m == j:
                continue
            shifted = [Fraction(0)] + basis
            for p in range(len(basis)):
                shifted[p] -= tm * basis[p]
            basis = shifted
            denom *= tj - tm
        coeffs.append(basis[k] / denom)
    return InterpolationPlan(points, tuple(coeffs), k)


def ben_or(n: int, k: int) -> Node:
    """``S^k_n = sum_j c_j * t_j^n * prod_i (x_i + 1/t_j)``.

    Each factor ``x_i t + 1`` is written as ``t (x_i + 1/t)`` so the formula
    keeps product-depth one with constants only at leaves.
    """
    plan = interpolation_coefficients(n, k)
    terms = []
    for c, t in zip(plan.coefficients, plan.points):
        if not c:
            continue
        factors = [Const(c * t ** n)] + [Node(SUM, (Var(i), Const(1 / t))) for i in range(1, n + 1)]
        terms.append(product_of(factors))
    return sum_of(terms)


def ben_or_factor(n: int, t: int) -> Node:
    """Formula for ``f_t = prod_i (x_i t + 1)`` in the same shape."""
    t = Fraction(t)
    return product_of([Const(t ** n)] + [Node(SUM, (Var(i), Const(1 / t))) for i in range(1, n + 1)])


# power sums and depth four -------------------------------------------------------

def power_sum_formula(n: int, i: int, scale: Fraction = Fraction(1)) -> Node:
    """``sum_j scale * x_j^i`` as a sum of products of ``i`` leaves (plus the scale)."""
    if i < 1 or n < 1:
        raise PreconditionError("power sums need n >= 1 and i >= 1")
    head = [] if scale == 1 else [Const(scale)]
    return sum_of(product_of(head + [Var(j)] * i) for j in range(1, n + 1))


def depth4_formula(n: int, k: int) -> Node:
    """Sum over the monomials of ``Z_k`` of ``coefficient * prod P^{i}_n``."""
    _check_nk(n, k)
    if k == 0:
        return Const(1)
    sums = {}
    terms = []
    for mono, c in newton_Z(k).sorted_terms():
        factors = [] if c == 1 else [Const(c)]
        for i in mono:
            if i not in sums:
                sums[i] = power_sum_formula(n, i)
            factors.append(sums[i])
        terms.append(product_of(factors))
    return sum_of(terms)


# Newton circuit -------------------------------------------------------------------

def newton_circuit(k: int) -> Circuit:
    """``Z_0..Z_k`` by the Newton recurrence, sharing every ``Z_m``.

    ``Z_m = sum_i ((-1)^(i+1)/m) * (y_i * Z_{m-i})`` with ``y_i * Z_0`` written
    as ``y_i``.  All products and sums have fan-in two.
    """
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    gates: list = []
    consts: dict = {}

    def add(g: Gate) -> int:
        gates.append(g)
        return len(gates) - 1

    def const(c: Fraction) -> int:
        if c not in consts:
            consts[c] = add(Gate(CONST, (), None, c))
        return consts[c]

    if k == 0:
        return Circuit((Gate(CONST, (), None, Fraction(1)),), 0)
    y = {i: add(Gate(VAR, (), i)) for i in range(1, k + 1)}
    Z: dict = {}
    for m in range(1, k + 1):
        acc = None
        for i in range(1, m + 1):
            base = y[i] if m == i else add(Gate(PROD, (y[i], Z[m - i])))
            c = Fraction(1 if i % 2 else -1, m)
            term = base if c == 1 else add(Gate(PROD, (const(c), base)))
            acc = term if acc is None else add(Gate(SUM, (acc, term)))
        Z[m] = acc
    return Circuit(tuple(gates), Z[k])


# circuit to formula -----------------------------------------------------------------

class _Dag:
    """Hash-consed gate store with syntactic w-degrees.

    Quotient circuits built during the recursion are added to the same store,
    so structurally equal pieces are shared and their formulas built once.
    """

    def __init__(self, w: Weighting):
        self.w = w
        self.ops: list = []
        self.args: list = []
        self.var: list = []
        self.val: list = []
        self.wdeg: list = []
        self._index: dict = {}
        self._polys: dict = {}
        self.one = self.add(CONST, val=Fraction(1))

    def add(self, op, args=(), var=None, val=None) -> int:
        key = (op, args, var, val)
        found = self._index.get(key)
        if found is not None:
            return found
        if op == VAR:
            if var not in self.w:
                raise StructuralError(f"weighting misses x{var}")
            wd = self.w[var]
        elif op == CONST:
            wd = 0
        elif op == PROD:
            wd = sum(self.wdeg[a] for a in args)
        else:
            degs = {self.wdeg[a] for a in args}
            if len(degs) != 1:
                raise StructuralError("sum of gates with different w-degrees")
            wd = degs.pop()
        self.ops.append(op)
        self.args.append(args)
        self.var.append(var)
        self.val.append(val)
        self.wdeg.append(wd)
        idx = len(self.ops) - 1
        self._index[key] = idx
        return idx

    def mul(self, a: int, b: int) -> int:
        if a == self.one:
            return b
        if b == self.one:
            return a
        return self.add(PROD, (a, b))

    def cone(self, root: int) -> list:
        keep = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i not in keep:
                keep.add(i)
                stack.extend(self.args[i])
        return sorted(keep)  # ids are created children-first

    def poly(self, u: int) -> Poly:
        for i in self.cone(u):
            if i in self._polys:
                continue
            op = self.ops[i]
            if op == VAR:
                p = Poly.var(self.var[i])
            elif op == CONST:
                p = Poly.const(self.val[i])
            else:
                ps = [self._polys[a] for a in self.args[i]]
                p = ps[0]
                for q in ps[1:]:
                    p = p + q if op == SUM else p * q
            self._polys[i] = p
        return self._polys[u]

    def frontier(self, u: int) -> list:
        """Gates of w-degree > k/2 whose children all have w-degree <= k/2."""
        k = self.wdeg[u]
        out = []
        seen = set()
        stack = [u]
        while stack:
            x = stack.pop()
            if x in seen or 2 * self.wdeg[x] <= k:
                continue
            seen.add(x)
            if all(2 * self.wdeg[a] <= k for a in self.args[x]):
                if self.ops[x] == SUM:
                    raise StructuralError("sum gate above its children's w-degree")
                out.append(x)
            else:
                stack.extend(self.args[x])
        return sorted(out)

    def quotient(self, u: int, v: int, memo: Optional[dict] = None) -> Optional[int]:
        """Gate computing the z-coefficient of ``u`` with gate ``v`` replaced by ``z``.

        ``None`` stands for the zero polynomial.
        """
        memo = {} if memo is None else memo
        target = self.wdeg[v]
        for x in self.cone(u):
            if x == v:
                memo[x] = self.one
                continue
            if self.wdeg[x] < target or not self.args[x]:
                memo[x] = None
                continue
            parts = [memo[a] for a in self.args[x]]
            if self.ops[x] == SUM:
                live = [p for p in parts if p is not None]
                if not live:
                    memo[x] = None
                else:
                    acc = live[0]
                    for p in live[1:]:
                        acc = self.add(SUM, (acc, p))
                    memo[x] = acc
            else:
                live = [i for i, p in enumerate(parts) if p is not None]
                if not live:
                    memo[x] = None
                    continue
                if len(live) > 1:
                    raise StructuralError("gate quotient is not linear in the replaced gate")
                i = live[0]
                acc = parts[i]
                for j, a in enumerate(self.args[x]):
                    if j != i:
                        acc = self.mul(acc, a)
                memo[x] = acc
        return memo[u]


def _load(circuit: Circuit, w: Weighting):
    """Copy the circuit's cone into a fresh store: zero gates pruned, products binarized."""
    check_weighting(w)
    report = verify_properties(circuit, w)
    if not report.w_homogeneous:
        raise StructuralError(
            f"circuit is not w-homogeneous at gate {report.first_offender['w_homogeneous']}")
    polys = circuit_polys(circuit)
    dag = _Dag(w)
    ids: dict = {}
    for i in circuit.cone():
        g = circuit.gates[i]
        if polys[i].is_zero():
            ids[i] = None
        elif g.op == VAR:
            ids[i] = dag.add(VAR, var=g.var)
        elif g.op == CONST:
            ids[i] = dag.add(CONST, val=g.value)
        elif g.op == SUM:
            live = [ids[a] for a in g.args if ids[a] is not None]
            acc = live[0]
            for a in live[1:]:
                acc = dag.add(SUM, (acc, a))
            ids[i] = acc
        else:
            acc = ids[g.args[0]]
            for a in g.args[1:]:
                acc = dag.mul(acc, ids[a])
            ids[i] = acc
    return dag, ids


def _dag_to_circuit(dag: _Dag, root: Optional[int]) -> Circuit:
    if root is None:
        return Circuit((Gate(CONST, (), None, Fraction(0)),), 0)
    order = dag.cone(root)
    pos = {g: i for i, g in enumerate(order)}
    gates = tuple(Gate(dag.ops[g], tuple(pos[a] for a in dag.args[g]), dag.var[g], dag.val[g])
                  for g in order)
    return Circuit(gates, pos[root])


def _linear_formula(p: Poly) -> Node:
    if p.is_zero():
        return Const(0)
    terms = []
    for mono, c in p.sorted_terms():
        if not mono:
            terms.append(Const(c))
        else:
            terms.append(product_of(([] if c == 1 else [Const(c)]) + [Var(v) for v in mono]))
    return sum_of(terms)


def frontier(circuit: Circuit, w: Weighting) -> list:
    """Frontier gates (indices into ``circuit``) for its output w-degree ``k >= 2``.

    A gate is in the frontier when its w-degree exceeds ``k/2`` and each of its
    children has w-degree at most ``k/2``; variable leaves of weight above
    ``k/2`` qualify too.
    """
    dag, ids = _load(circuit, w)
    root = ids[circuit.output]
    if root is None:
        return []
    k = dag.wdeg[root]
    if k < 2:
        raise PreconditionError("frontier needs output w-degree at least 2")
    front = dag.frontier(root)
    if not front:
        raise StructuralError("empty frontier for w-degree >= 2")
    back = {}
    for g, d in ids.items():
        back.setdefault(d, g)
    missing = [v for v in front if v not in back]
    if missing:
        raise StructuralError("frontier gate created by binarization; binarize the circuit first")
    return [back[v] for v in front]


def gate_quotient(circuit: Circuit, v: int, w: Weighting) -> Circuit:
    """Circuit for the z-coefficient of the output after replacing gate ``v`` by ``z``."""
    dag, ids = _load(circuit, w)
    root = ids[circuit.output]
    if ids.get(v) is None or root is None:
        return _dag_to_circuit(dag, None)
    return _dag_to_circuit(dag, dag.quotient(root, ids[v]))


def subcircuit(circuit: Circuit, gate: int) -> Circuit:
    return Circuit(circuit.gates, gate)


def frontier_decomposition(circuit: Circuit, w: Weighting) -> list:
    """``[(v, h_v, [v_1, v_2])]`` with ``output = sum h_v * v_1 * v_2``.

    For a frontier leaf the factor list is ``[v]``.  ``h_v`` is a circuit; the
    factors are gate indices of ``circuit``.
    """
    out = []
    for v in frontier(circuit, w):
        g = circuit.gates[v]
        factors = list(g.args) if g.args else [v]
        out.append((v, gate_quotient(circuit, v, w), factors))
    return out


def circuit_to_formula(circuit: Circuit, w: Weighting) -> Node:
    """w-homogeneous formula computing the same polynomial as a w-homogeneous circuit.

    Gates of w-degree at most one become explicit linear forms.  Otherwise the
    output is written as ``sum_{v in frontier} h_v * v_1 * v_2`` and each of
    ``h_v``, ``v_1``, ``v_2`` (all of w-degree at most ``k/2``) is converted
    recursively.  Formulas of shared gates are shared objects.
    """
    dag, ids = _load(circuit, w)
    root = ids[circuit.output]
    if root is None:
        return Const(0)
    memo: dict = {}
    qmemo: dict = {}

    def build(u: int) -> Node:
        stack = [u]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            op = dag.ops[x]
            if op == VAR:
                memo[x] = Var(dag.var[x])
            elif op == CONST:
                memo[x] = Const(dag.val[x])
            elif dag.wdeg[x] <= 1:
                memo[x] = _linear_formula(dag.poly(x))
            else:
                plan = qmemo.get(x)
                if plan is None:
                    plan = []
                    for v in dag.frontier(x):
                        h = dag.quotient(x, v)
                        if h is None:
                            continue
                        factors = list(dag.args[v]) if dag.args[v] else [v]
                        plan.append(([] if h == dag.one else [h]) + factors)
                    qmemo[x] = plan
                pending = [g for factors in plan for g in factors if g not in memo]
                if pending:
                    stack.extend(pending)
                    continue
                memo[x] = sum_of(product_of([memo[g] for g in factors]) for factors in plan)
            stack.pop()
        return memo[u]

    return build(root)


def circuit_to_formula_size_bound(gates: int, k: int) -> float:
    if k < 2:
        return float(max(2 * gates, 1))
    return float(gates * k) ** (CIRCUIT_TO_FORMULA_A * math.log2(k) + CIRCUIT_TO_FORMULA_B)


# homogeneous Newton formula ----------------------------------------------------------

def _absorb_constants(root: Node, first_free: int):
    """Move every constant factor onto a variable leaf.

    Returns ``(formula, scaled)`` where the formula has no constant leaves and
    ``scaled`` maps fresh variable ids to ``(variable, factor)``; a fresh
    variable stands for ``factor * variable``.
    """
    scaled_ids: dict = {}
    value_memo: dict = {}

    def constant_value(n: Node) -> Optional[Fraction]:
        if id(n) not in value_memo:
            if n.op == VAR:
                v = None
            elif n.op == CONST:
                v = n.value
            else:
                vals = [constant_value(c) for c in n.children]
                if any(x is None for x in vals):
                    v = None
                elif n.op == SUM:
                    v = sum(vals, Fraction(0))
                else:
                    v = Fraction(1)
                    for x in vals:
                        v *= x
            value_memo[id(n)] = v
        return value_memo[id(n)]

    for n in postorder(root):
        constant_value(n)

    memo: dict = {}

    def go(n: Node, c: Fraction) -> Optional[Node]:
        key = (id(n), c)
        if key in memo:
            return memo[key]
        if n.op == VAR:
            if c == 1:
                out = n
            else:
                sk = (n.var, c)
                if sk not in scaled_ids:
                    scaled_ids[sk] = first_free + len(scaled_ids)
                out = Var(scaled_ids[sk])
        elif n.op == SUM:
            kids = [go(ch, c) for ch in n.children if constant_value(ch) is None]
            if any(constant_value(ch) not in (None, 0) for ch in n.children):
                raise StructuralError("nonzero constant summand in a homogeneous formula")
            out = sum_of(k for k in kids if k is not None) if kids else None
        elif n.op == PROD:
            factor = c
            live = []
            for ch in n.children:
                v = constant_value(ch)
                if v is None:
                    live.append(ch)
                else:
                    factor *= v
            if factor == 0:
                out = None
            else:
                kids = [go(ch, factor if i == 0 else Fraction(1)) for i, ch in enumerate(live)]
                out = None if any(k is None for k in kids) else product_of(kids)
        else:
            raise StructuralError("constant leaf reached while absorbing constants")
        memo[key] = out
        return out

    if constant_value(root) is not None:
        return Const(constant_value(root)), {}
    out = go(root, Fraction(1))
    scaled = {fresh: key for key, fresh in scaled_ids.items()}
    return (out if out is not None else Const(0)), scaled


def newton_formula_over_y(k: int) -> Node:
    """w-homogeneous formula for ``Z_k`` obtained from the Newton circuit."""
    return circuit_to_formula(newton_circuit(k), newton_weighting(k))


def newton_homogeneous_formula(n: int, k: int) -> Node:
    """Homogeneous formula ``Z_k(P^1_n, ..., P^k_n)``.

    Constants of the ``Z_k`` formula are first pushed onto its variable leaves
    so that each substituted power sum carries its own scale; the result has
    ``size / n`` independent of ``n``.
    """
    _check_nk(n, k)
    if k == 0:
        return Const(1)
    z_formula, scaled = _absorb_constants(newton_formula_over_y(k), k + 1)
    sums: dict = {i: power_sum_formula(n, i) for i in range(1, k + 1)}
    for fresh, (i, c) in scaled.items():
        sums[fresh] = power_sum_formula(n, i, c)
    return substitute(z_formula, sums)


# monotone divide and conquer ------------------------------------------------------------

def monotone_dc(n: int, k: int) -> Node:
    """Monotone formula ``S^k(A u B) = sum_i S^i(A) * S^(k-i)(B)`` over halves.

    Built over ``n'`` (the next power of two) variables with the extra ones
    set to zero: branches that vanish are dropped and ``S^0 = 1`` factors are
    elided, so ``S^1`` of a block is the plain sum of its variables.
    """
    _check_nk(n, k)
    if k == 0:
        return Const(1)
    width = 1
    while width < n:
        width *= 2
    ONE = object()
    memo: dict = {}

    def block(lo: int, size: int, i: int):
        key = (lo, size, i)
        if key in memo:
            return memo[key]
        real = max(0, min(n, lo + size - 1) - lo + 1)
        if i == 0:
            out = ONE
        elif i > real:
            out = None
        elif i == 1:
            out = sum_of(Var(v) for v in range(lo, lo + real))
        else:
            half = size // 2
            terms = []
            for j in range(i + 1):
                left = block(lo, half, j)
                right = block(lo + half, half, i - j)
                if left is None or right is None:
                    continue
                terms.append(product_of(f for f in (left, right) if f is not ONE))
            out = sum_of(terms) if terms else None
        memo[key] = out
        return out

    return block(1, width, k)


def newton_size_fit(k_max: int, n: int = 1) -> dict:
    """Least-squares fit of ``log2(size/n) = a (log2 k)^2 + b log2 k`` over ``2 <= k <= k_max``.

    ``size/n`` does not depend on ``n``; a bounded ``a`` is the ``k^(O(log k))``
    growth of the homogeneous Newton formula.
    """
    if k_max < 3:
        raise PreconditionError("fit needs k_max >= 3")
    n = max(n, k_max)
    xs, ys, sizes = [], [], {}
    for k in range(2, k_max + 1):
        s = newton_homogeneous_formula(n, k).leaves
        sizes[k] = s
        lk = math.log2(k)
        xs.append(lk)
        ys.append(math.log2(s / n) / lk)
    a, b = statistics.linear_regression(xs, ys)
    return {"a": a, "b": b, "n": n, "sizes": sizes}


CONSTRUCTIONS = {
    "ben-or": ben_or,
    "newton": newton_homogeneous_formula,
    "depth4": depth4_formula,
    "monotone": monotone_dc,
    "power-sum": power_sum_formula,
}
