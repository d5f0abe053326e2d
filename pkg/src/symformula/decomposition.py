"""Constructive sum-of-products decompositions of homogeneous formulas.

Two decompositions, each returned as a certificate of factored polynomials
that :func:`validate_balanced` / :func:`validate_form` re-check from scratch:

* balanced: ``expand(F) = sum_j f_j1 * ... * f_jp`` with geometrically
  shrinking factor degrees ``(1/3)^i k < deg f_ji <= (2/3)^i k`` and a linear
  last factor;
* form: every part is a product of exactly ``q`` homogeneous factors of degree
  at least ``k (2q)^-d``, for formulas of product-depth at most ``d``.

Both peel one node ``w`` at a time: ``F = h * F_w + F_(w=0)`` where ``h`` is
the product of the siblings met on the path to ``w``.  Nodes computing the
zero polynomial are pruned before each step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .bounds import BoundReport
from .formula_ir import (
    PROD,
    SUM,
    Node,
    Path,
    node_poly,
    postorder,
    prune_zeros,
    restrict,
    subformula,
    verify_properties,
)
from .polynomial import NEG_INF, Poly


class DecompositionError(ValueError):
    """Input formula violates a decomposition precondition."""


@dataclass(frozen=True)
class BalancedFactorization:
    factors: tuple  # Poly, ..., last factor linear

    @property
    def degrees(self) -> tuple:
        return tuple(f.degree for f in self.factors)

    @property
    def minvar(self) -> int:
        return len(self.factors[-1].variables())

    def product(self) -> Poly:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = out * f
        return out


@dataclass(frozen=True)
class FormFactorization:
    factors: tuple
    ell: Fraction

    @property
    def p(self) -> int:
        return len(self.factors)

    @property
    def degrees(self) -> tuple:
        return tuple(f.degree for f in self.factors)

    @property
    def minvar(self) -> int:
        return min(len(f.variables()) for f in self.factors)

    def product(self) -> Poly:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = out * f
        return out


@dataclass(frozen=True)
class DecompositionCertificate:
    kind: str  # "balanced" or "form"
    parts: tuple
    source_size: int
    degree: object  # int, or NEG_INF for the zero polynomial
    params: dict = field(default_factory=dict)

    @property
    def minvar_total(self) -> int:
        return sum(p.minvar for p in self.parts)

    def as_dict(self) -> dict:
        from .polynomial import to_text
        return {
            "kind": self.kind,
            "source_size": self.source_size,
            "degree": None if self.degree == NEG_INF else self.degree,
            "params": {k: str(v) for k, v in self.params.items()},
            "minvar_total": self.minvar_total,
            "parts": [
                {"degrees": list(p.degrees), "minvar": p.minvar,
                 "factors": [to_text(f) for f in p.factors]}
                for p in self.parts
            ],
        }


def _degree(node: Node):
    return node_poly(node).degree


def _max_fan_in(root: Node) -> int:
    return max((len(n.children) for n in postorder(root)), default=0)


def _prepare(root: Node) -> Node:
    return prune_zeros(root, semantic=True)


def path_quotient(root: Node, path: Path) -> Poly:
    """``h`` with ``expand(root) = h * expand(root[path]) + expand(root restricted at path to 0)``.

    In a tree the node occurs once, so ``h`` is the product of the sibling
    polynomials met at product nodes along the path.
    """
    h = Poly.const(1)
    node = root
    for i in path:
        if node.op == PROD:
            for j, ch in enumerate(node.children):
                if j != i:
                    h = h * node_poly(ch)
        node = node.children[i]
    return h


def find_split_node(root: Node) -> Path:
    """Node ``w`` with ``k/3 <= deg(w) < 2k/3`` for a fan-in-two formula of degree ``k >= 2``.

    Walk down from the root while some child has degree at least ``2k/3``; at
    the stopping node (a product) return its larger-degree child.
    """
    k = _degree(root)
    if k == NEG_INF or k < 2:
        raise DecompositionError(f"split node needs degree at least 2, got {k}")
    if _max_fan_in(root) > 2:
        raise DecompositionError("split node search needs fan-in at most two; binarize first")
    node, path = root, ()
    while True:
        for i, ch in enumerate(node.children):
            if 3 * _degree(ch) >= 2 * k:
                node, path = ch, path + (i,)
                break
        else:
            break
    if node.op != PROD:
        raise DecompositionError("walk stopped at a non-product node; formula is not homogeneous")
    degs = [_degree(ch) for ch in node.children]
    best = max(range(len(degs)), key=lambda i: (degs[i], -i))
    found = path + (best,)
    d = degs[best]
    assert 3 * d >= k and 3 * d < 2 * k, (d, k)
    return found


def _peel(cur: Node, path: Path):
    w = subformula(cur, path)
    h = path_quotient(cur, path)
    rest = _prepare(restrict(cur, path, 0))
    if h * node_poly(w) + node_poly(rest) != node_poly(cur):
        raise AssertionError("h * F_w + F_(w=0) differs from F")
    return w, h, rest


def _check_homogeneous(root: Node) -> None:
    report = verify_properties(root)
    if not report.homogeneous:
        raise DecompositionError(
            f"formula is not homogeneous (node {report.first_offender['homogeneous']})")


def balanced_decompose(root: Node) -> DecompositionCertificate:
    """Write ``expand(root)`` as at most ``size(root)`` balanced products."""
    _check_homogeneous(root)
    if _max_fan_in(root) > 2:
        raise DecompositionError("balanced decomposition needs fan-in at most two; binarize first")
    k = _degree(root)
    if k != NEG_INF and k < 1:
        raise DecompositionError("balanced decomposition needs degree at least 1")
    parts = _balanced_parts(_prepare(root))
    return DecompositionCertificate("balanced", tuple(BalancedFactorization(p) for p in parts),
                                    root.leaves, k)


def _balanced_parts(cur: Node) -> list:
    parts: list = []
    while not node_poly(cur).is_zero():
        k = _degree(cur)
        if k == 1:
            parts.append((node_poly(cur),))
            break
        path = find_split_node(cur)
        w, h, cur = _peel(cur, path)
        for sub in _balanced_parts(w):
            parts.append((h,) + sub)
    return parts


def find_deep_product_node(root: Node, r, d: int) -> Path:
    """Product node ``w`` with ``deg(w) >= k r^(1-d)`` and every child below ``deg(w)/r``."""
    r = Fraction(r)
    k = _degree(root)
    if r <= 1:
        raise DecompositionError("r must exceed 1")
    if root.product_depth > d:
        raise DecompositionError(f"product-depth {root.product_depth} exceeds d={d}")
    if k == NEG_INF or not k > r ** d:
        raise DecompositionError(f"k r^(-d) > 1 fails for k={k}, r={r}, d={d}")

    def to_product(node: Node, path: Path):
        while node.op == SUM:
            node, path = node.children[0], path + (0,)
        if node.op != PROD:
            raise DecompositionError("no product node of full degree below this node")
        return node, path

    node, path = to_product(root, ())
    while True:
        dn = _degree(node)
        for i, ch in enumerate(node.children):
            if _degree(ch) >= dn / r:
                node, path = to_product(ch, path + (i,))
                break
        else:
            return path


def group_factors(polys: list, threshold: Fraction, q: int) -> list:
    """Greedy grouping into exactly ``q`` products of degree at least ``threshold``.

    Consecutive factors are accumulated until the group degree reaches the
    threshold; a short final group joins its predecessor and groups beyond
    ``q`` are merged into the last one.
    """
    groups: list = []
    cur: list = []
    deg = 0
    for p in polys:
        cur.append(p)
        deg += p.degree
        if deg >= threshold:
            groups.append(cur)
            cur, deg = [], 0
    if cur:
        if not groups:
            raise DecompositionError("factors too small to form a group")
        groups[-1].extend(cur)
    if len(groups) < q:
        raise DecompositionError(f"only {len(groups)} groups of degree >= {threshold}, need {q}")
    while len(groups) > q:
        tail = groups.pop()
        groups[-1].extend(tail)
    out = []
    for g in groups:
        prod = g[0]
        for p in g[1:]:
            prod = prod * p
        out.append(prod)
    return out


def form_decompose(root: Node, q: int, d: int) -> DecompositionCertificate:
    """Parts in ``(q, k (2q)^-d)``-form for a multilinear homogeneous formula of product-depth <= d."""
    if int(q) != q or q <= 1:
        raise DecompositionError(f"q must be an integer > 1, got {q}")
    report = verify_properties(root)
    if not report.homogeneous:
        raise DecompositionError("formula is not homogeneous")
    if not report.multilinear:
        raise DecompositionError("formula is not multilinear")
    if root.product_depth > d:
        raise DecompositionError(f"product-depth {root.product_depth} exceeds d={d}")
    k = _degree(root)
    if k == NEG_INF:
        return DecompositionCertificate("form", (), root.leaves, k, {"q": q, "d": d})
    r = 2 * q
    ell = Fraction(k, r ** d)
    if not ell > 1:
        raise DecompositionError(f"k (2q)^-d > 1 fails: k={k}, q={q}, d={d} gives {ell}")
    parts: list = []
    cur = _prepare(root)
    while not node_poly(cur).is_zero():
        path = find_deep_product_node(cur, r, d)
        w = subformula(cur, path)
        threshold = Fraction(_degree(w), r)
        factors = group_factors([node_poly(ch) for ch in w.children], threshold, q)
        w, h, cur = _peel(cur, path)
        factors[0] = h * factors[0]
        parts.append(FormFactorization(tuple(factors), ell))
    return DecompositionCertificate("form", tuple(parts), root.leaves, k,
                                    {"q": q, "d": d, "ell": ell})


# validation -----------------------------------------------------------------

def _sum_check(cert: DecompositionCertificate, root: Node, failures: list) -> None:
    total = Poly.zero()
    for part in cert.parts:
        total = total + part.product()
    if total != node_poly(root):
        failures.append("sum of part products differs from the formula's polynomial")
    if len(cert.parts) > root.leaves:
        failures.append(f"{len(cert.parts)} parts exceed size {root.leaves}")
    if cert.minvar_total > root.leaves:
        failures.append(f"sum of minvar {cert.minvar_total} exceeds size {root.leaves}")


def _homogeneous(p: Poly) -> bool:
    return len({len(m) for m in p.terms}) <= 1 and not p.is_zero()


def validate_balanced(cert: DecompositionCertificate, root: Node) -> BoundReport:
    failures: list = []
    k = node_poly(root).degree
    multilinear = verify_properties(root).syntactically_multilinear
    for j, part in enumerate(cert.parts):
        fs = part.factors
        if not fs:
            failures.append(f"part {j}: no factors")
            continue
        if not all(_homogeneous(f) for f in fs):
            failures.append(f"part {j}: factor not homogeneous")
            continue
        degs = [f.degree for f in fs]
        if sum(degs) != k:
            failures.append(f"part {j}: degrees {degs} do not sum to {k}")
        for i, dg in enumerate(degs[:-1], start=1):
            if not (Fraction(k, 3 ** i) < dg <= Fraction(2 ** i * k, 3 ** i)):
                failures.append(f"part {j}: factor {i} degree {dg} outside ((1/3)^{i}k, (2/3)^{i}k]")
        if degs[-1] != 1:
            failures.append(f"part {j}: last factor degree {degs[-1]} != 1")
        if multilinear:
            prod = part.product()
            if any(len(set(m)) != len(m) for m in prod.terms):
                failures.append(f"part {j}: product not multilinear")
    _sum_check(cert, root, failures)
    return BoundReport(
        name="balanced_certificate",
        inputs={"size": root.leaves, "degree": None if k == NEG_INF else k, "parts": len(cert.parts)},
        bound=root.leaves, compared=cert.minvar_total, passed=not failures, failures=tuple(failures))


def validate_form(cert: DecompositionCertificate, root: Node, q: int, ell) -> BoundReport:
    failures: list = []
    ell = Fraction(ell)
    k = node_poly(root).degree
    for j, part in enumerate(cert.parts):
        fs = part.factors
        if len(fs) != q:
            failures.append(f"part {j}: {len(fs)} factors, expected {q}")
        if not all(_homogeneous(f) for f in fs):
            failures.append(f"part {j}: factor not homogeneous")
            continue
        degs = [f.degree for f in fs]
        if sum(degs) != k:
            failures.append(f"part {j}: degrees {degs} do not sum to {k}")
        for i, dg in enumerate(degs, start=1):
            if dg < ell:
                failures.append(f"part {j}: factor {i} degree {dg} below {ell}")
    _sum_check(cert, root, failures)
    return BoundReport(
        name="form_certificate",
        inputs={"size": root.leaves, "degree": None if k == NEG_INF else k, "q": q, "ell": str(ell),
                "parts": len(cert.parts)},
        bound=root.leaves, compared=cert.minvar_total, passed=not failures, failures=tuple(failures))

