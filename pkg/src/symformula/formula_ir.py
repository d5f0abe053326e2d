"""Arithmetic formula / circuit IR.

A formula is a tree of :class:`Node` values.  Nodes are immutable, so a
subtree object may be referenced from several positions; every position is
still a separate node of the tree (sizes and depths count positions), and
node-level caches are keyed by object so shared subtrees are processed once.

Nodes inside a formula are addressed by *paths*: tuples of child indices
from the root.  Reports that name a node use its preorder index.

S-expression grammar (see :func:`serialize` / :func:`parse`)::

    formula  := atom | "(+" ws formula (ws formula)+ ")" | "(*" ws formula (ws formula)+ ")"
    atom     := "x" digits | rational
    rational := ["-"] digits ["/" digits]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .polynomial import (
    NEG_INF,
    MissingVariableError,
    Poly,
    RationalLike,
    Weighting,
    as_rational,
    check_weighting,
    w_degree,
)

VAR, CONST, SUM, PROD = "var", "const", "+", "*"

Path = tuple


class StructuralError(ValueError):
    """Malformed formula or circuit (bad fan-in, cycle, unknown node)."""


class FormulaParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Node:
    """One node of a formula; also the formula rooted at it."""

    __slots__ = ("op", "children", "var", "value", "leaves", "depth",
                 "product_depth", "degree", "variables", "n_nodes", "_hash", "_polys")

    def __init__(self, op: str, children: Sequence["Node"] = (), var: Optional[int] = None,
                 value: Optional[RationalLike] = None):
        children = tuple(children)
        if op == VAR:
            if children or var is None or var < 1:
                raise StructuralError("variable leaf needs a positive id and no children")
            value = None
        elif op == CONST:
            if children or value is None:
                raise StructuralError("constant leaf needs a value and no children")
            value = as_rational(value)
            var = None
        elif op in (SUM, PROD):
            if len(children) < 2:
                raise StructuralError(f"{op} node needs fan-in at least two")
            var = value = None
        else:
            raise StructuralError(f"unknown op {op!r}")
        s = object.__setattr__
        s(self, "op", op)
        s(self, "children", children)
        s(self, "var", var)
        s(self, "value", value)
        s(self, "_polys", {})
        if not children:
            s(self, "leaves", 1)
            s(self, "depth", 0)
            s(self, "product_depth", 0)
            s(self, "degree", 1 if op == VAR else 0)
            s(self, "variables", frozenset((var,)) if op == VAR else frozenset())
            s(self, "n_nodes", 1)
            s(self, "_hash", hash((op, var, value)))
        else:
            s(self, "leaves", sum(c.leaves for c in children))
            s(self, "depth", 1 + max(c.depth for c in children))
            s(self, "product_depth",
              (op == PROD) + max(c.product_depth for c in children))
            degs = [c.degree for c in children]
            s(self, "degree", max(degs) if op == SUM else sum(degs))
            s(self, "variables", frozenset().union(*(c.variables for c in children)))
            s(self, "n_nodes", 1 + sum(c.n_nodes for c in children))
            s(self, "_hash", hash((op, tuple(c._hash for c in children))))

    def __setattr__(self, name, value):
        raise AttributeError("Node is immutable")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Node):
            return NotImplemented
        return structurally_equal(self, other)

    def __repr__(self) -> str:
        text = serialize(self)
        if len(text) > 80:
            text = text[:77] + "..."
        return f"Node({text})"

    def __getitem__(self, path: Path) -> "Node":
        return subformula(self, path)


Formula = Node


def Var(i: int) -> Node:
    return Node(VAR, var=i)


def Const(c: RationalLike) -> Node:
    return Node(CONST, value=c)


def Sum(*children: Node) -> Node:
    return Node(SUM, children)


def Prod(*children: Node) -> Node:
    return Node(PROD, children)


def sum_of(items: Iterable[Node]) -> Node:
    """Sum node, collapsing a single summand; the empty sum is ``0``."""
    items = list(items)
    if not items:
        return Const(0)
    return items[0] if len(items) == 1 else Node(SUM, items)


def product_of(items: Iterable[Node]) -> Node:
    """Product node, collapsing a single factor; the empty product is ``1``."""
    items = list(items)
    if not items:
        return Const(1)
    return items[0] if len(items) == 1 else Node(PROD, items)


def structurally_equal(a: Node, b: Node) -> bool:
    seen = set()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y or (id(x), id(y)) in seen:
            continue
        if (x._hash != y._hash or x.op != y.op or x.var != y.var or x.value != y.value
                or len(x.children) != len(y.children)):
            return False
        seen.add((id(x), id(y)))
        stack.extend(zip(x.children, y.children))
    return True


def postorder(root: Node) -> list:
    """Distinct node objects below ``root``, children before parents."""
    seen = set()
    out = []
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for ch in reversed(node.children):
            if id(ch) not in seen:
                stack.append((ch, False))
    return out


def iter_positions(root: Node):
    """Yield ``(preorder index, path, node)`` for every position of the tree."""
    stack = [((), root)]
    index = 0
    while stack:
        path, node = stack.pop()
        yield index, path, node
        index += 1
        for i in range(len(node.children) - 1, -1, -1):
            stack.append((path + (i,), node.children[i]))


def subformula(root: Node, path: Path) -> Node:
    node = root
    for i in path:
        if not 0 <= i < len(node.children):
            raise StructuralError(f"path {tuple(path)} does not name a node")
        node = node.children[i]
    return node


def path_of_index(root: Node, index: int) -> Path:
    """Path of the node with the given preorder index."""
    if not 0 <= index < root.n_nodes:
        raise StructuralError(f"node {index} not in formula")
    node, path = root, ()
    while index:
        index -= 1
        for i, ch in enumerate(node.children):
            if index < ch.n_nodes:
                node, path = ch, path + (i,)
                break
            index -= ch.n_nodes
    return path


def index_of_path(root: Node, path: Path) -> int:
    index, node = 0, root
    for i in path:
        if not 0 <= i < len(node.children):
            raise StructuralError(f"path {tuple(path)} does not name a node")
        index += 1 + sum(c.n_nodes for c in node.children[:i])
        node = node.children[i]
    return index


# circuits -------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    op: str
    args: tuple = ()
    var: Optional[int] = None
    value: Optional[Fraction] = None


@dataclass(frozen=True)
class Circuit:
    """Arithmetic circuit: gates in topological order and one output gate."""

    gates: tuple
    output: int
    _order: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        gates = tuple(g if g.op != CONST or isinstance(g.value, Fraction)
                      else Gate(CONST, (), None, as_rational(g.value)) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        n = len(gates)
        if not 0 <= self.output < n:
            raise StructuralError(f"output gate {self.output} out of range")
        indeg = [0] * n
        users: list = [[] for _ in range(n)]
        for i, g in enumerate(gates):
            if g.op in (SUM, PROD):
                if len(g.args) < 2:
                    raise StructuralError(f"gate {i}: {g.op} needs fan-in at least two")
            elif g.op == VAR:
                if g.args or g.var is None or g.var < 1:
                    raise StructuralError(f"gate {i}: malformed variable gate")
            elif g.op == CONST:
                if g.args or g.value is None:
                    raise StructuralError(f"gate {i}: malformed constant gate")
            else:
                raise StructuralError(f"gate {i}: unknown op {g.op!r}")
            for a in g.args:
                if not 0 <= a < n:
                    raise StructuralError(f"gate {i}: argument {a} out of range")
                users[a].append(i)
            indeg[i] = len(g.args)
        ready = [i for i in range(n) if indeg[i] == 0]
        order = []
        remaining = list(indeg)
        while ready:
            i = ready.pop()
            order.append(i)
            for u in users[i]:
                remaining[u] -= 1
                if remaining[u] == 0:
                    ready.append(u)
        if len(order) != n:
            raise StructuralError("circuit graph has a cycle")
        object.__setattr__(self, "_order", tuple(order))

    def cone(self) -> list:
        """Gates reachable from the output, in topological order."""
        keep = set()
        stack = [self.output]
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            stack.extend(self.gates[i].args)
        return [i for i in self._order if i in keep]

    @property
    def size(self) -> int:
        return sum(1 for i in self.cone() if not self.gates[i].args)


def circuit_from_formula(root: Node) -> Circuit:
    """Circuit with one gate per distinct node object."""
    index: dict = {}
    gates = []
    for node in postorder(root):
        args = tuple(index[id(c)] for c in node.children)
        gates.append(Gate(node.op, args, node.var, node.value))
        index[id(node)] = len(gates) - 1
    return Circuit(tuple(gates), index[id(root)])


def unroll(circuit: Circuit) -> Node:
    """The formula computed by the circuit (shared gates become shared subtrees)."""
    built: dict = {}
    for i in circuit.cone():
        g = circuit.gates[i]
        if g.op == VAR:
            built[i] = Var(g.var)
        elif g.op == CONST:
            built[i] = Const(g.value)
        else:
            built[i] = Node(g.op, [built[a] for a in g.args])
    return built[circuit.output]


# analysis ---------------------------------------------------------------------

@dataclass(frozen=True)
class Analysis:
    size: int
    depth: int
    product_depth: int
    formal_degree: int
    variable_set: frozenset


def analyze(obj: Union[Node, Circuit]) -> Analysis:
    if isinstance(obj, Node):
        return Analysis(obj.leaves, obj.depth, obj.product_depth, obj.degree, obj.variables)
    depth: dict = {}
    pdepth: dict = {}
    fdeg: dict = {}
    vars_: dict = {}
    leaves = 0
    for i in obj.cone():
        g = obj.gates[i]
        if not g.args:
            leaves += 1
            depth[i] = pdepth[i] = 0
            fdeg[i] = 1 if g.op == VAR else 0
            vars_[i] = frozenset((g.var,)) if g.op == VAR else frozenset()
            continue
        depth[i] = 1 + max(depth[a] for a in g.args)
        pdepth[i] = (g.op == PROD) + max(pdepth[a] for a in g.args)
        degs = [fdeg[a] for a in g.args]
        fdeg[i] = max(degs) if g.op == SUM else sum(degs)
        vars_[i] = frozenset().union(*(vars_[a] for a in g.args))
    o = obj.output
    return Analysis(leaves, depth[o], pdepth[o], fdeg[o], vars_[o])


def _combine(op: str, polys: list) -> Poly:
    out = polys[0]
    for p in polys[1:]:
        out = out + p if op == SUM else out * p
    return out


def node_poly(node: Node, commutative: bool = True) -> Poly:
    """Polynomial computed at ``node`` (cached on the node)."""
    cached = node._polys.get(commutative)
    if cached is not None:
        return cached
    for n in postorder(node):
        if commutative in n._polys:
            continue
        if n.op == VAR:
            p = Poly.var(n.var, commutative)
        elif n.op == CONST:
            p = Poly.const(n.value, commutative)
        else:
            p = _combine(n.op, [c._polys[commutative] for c in n.children])
        n._polys[commutative] = p
    return node._polys[commutative]


def circuit_polys(circuit: Circuit, commutative: bool = True) -> dict:
    polys: dict = {}
    for i in circuit.cone():
        g = circuit.gates[i]
        if g.op == VAR:
            polys[i] = Poly.var(g.var, commutative)
        elif g.op == CONST:
            polys[i] = Poly.const(g.value, commutative)
        else:
            polys[i] = _combine(g.op, [polys[a] for a in g.args])
    return polys


def expand(obj: Union[Node, Circuit], commutative: bool = True) -> Poly:
    """Symbolic expansion; products are read left to right in child order."""
    if isinstance(obj, Node):
        return node_poly(obj, commutative)
    return circuit_polys(obj, commutative)[obj.output]


def evaluate(obj: Union[Node, Circuit], point: Mapping[int, RationalLike]) -> Fraction:
    if isinstance(obj, Circuit):
        items = [(i, obj.gates[i].op, obj.gates[i].var, obj.gates[i].value, obj.gates[i].args)
                 for i in obj.cone()]
        target = obj.output
    else:
        items = [(id(n), n.op, n.var, n.value, [id(c) for c in n.children])
                 for n in postorder(obj)]
        target = id(obj)
    vals: dict = {}
    for key, op, var, value, args in items:
        if op == VAR:
            if var not in point:
                raise MissingVariableError(var, "evaluation point")
            vals[key] = as_rational(point[var])
        elif op == CONST:
            vals[key] = value
        elif op == SUM:
            vals[key] = sum((vals[a] for a in args), Fraction(0))
        else:
            v = Fraction(1)
            for a in args:
                v *= vals[a]
            vals[key] = v
    return vals[target]


# properties -------------------------------------------------------------------

PROPERTY_NAMES = ("homogeneous", "w_homogeneous", "multilinear",
                  "syntactically_multilinear", "monotone", "sum_degrees_equal")


@dataclass(frozen=True)
class PropertyReport:
    homogeneous: bool
    w_homogeneous: bool
    multilinear: bool
    syntactically_multilinear: bool
    monotone: bool
    sum_degrees_equal: bool
    first_offender: dict  # property name -> preorder index (formula) or gate index

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in PROPERTY_NAMES}
        out["first_offender"] = dict(self.first_offender)
        return out


def _node_checks(op, poly: Poly, child_vars, child_degrees, value, w) -> dict:
    degrees = {len(m) for m in poly.terms}
    checks = {
        "homogeneous": len(degrees) <= 1,
        "multilinear": all(len(set(m)) == len(m) for m in poly.terms),
        "monotone": not (op == CONST and value < 0),
        "w_homogeneous": (len({w_degree(m, w) for m in poly.terms}) <= 1
                          if w is not None else len(degrees) <= 1),
        "syntactically_multilinear": True,
        "sum_degrees_equal": True,
    }
    if op == PROD:
        seen: set = set()
        for vs in child_vars:
            if seen & vs:
                checks["syntactically_multilinear"] = False
                break
            seen |= vs
    elif op == SUM:
        checks["sum_degrees_equal"] = len(set(child_degrees)) <= 1
    return checks


def verify_properties(obj: Union[Node, Circuit], w: Optional[Weighting] = None) -> PropertyReport:
    """Per-node property checks by full expansion of every node."""
    if w is not None:
        check_weighting(w)
    if isinstance(obj, Circuit):
        return _verify_circuit(obj, w)
    root = obj
    bad: dict = {}  # id -> set of failed properties at that node
    below: dict = {}  # id -> set of failed properties within subtree
    for n in postorder(root):
        poly = node_poly(n)
        failed = {name for name, ok in _node_checks(
            n.op, poly, [c.variables for c in n.children], [c.degree for c in n.children],
            n.value, w).items() if not ok}
        bad[id(n)] = failed
        sub = set(failed)
        for c in n.children:
            sub |= below[id(c)]
        below[id(n)] = sub
    offenders = {}
    for name in sorted(below[id(root)]):
        offenders[name] = _first_offender(root, name, bad, below)
    failed_all = below[id(root)]
    return PropertyReport(first_offender=offenders,
                          **{name: name not in failed_all for name in PROPERTY_NAMES})


def _first_offender(root: Node, name: str, bad: dict, below: dict) -> int:
    node, index = root, 0
    while name not in bad[id(node)]:
        index += 1
        for ch in node.children:
            if name in below[id(ch)]:
                node = ch
                break
            index += ch.n_nodes
    return index


def _verify_circuit(circuit: Circuit, w) -> PropertyReport:
    polys = circuit_polys(circuit)
    info = analyze_gates(circuit)
    offenders: dict = {}
    for i in circuit.cone():
        g = circuit.gates[i]
        checks = _node_checks(g.op, polys[i], [info["vars"][a] for a in g.args],
                              [info["degree"][a] for a in g.args], g.value, w)
        for name, ok in checks.items():
            if not ok and name not in offenders:
                offenders[name] = i
    return PropertyReport(first_offender=offenders,
                          **{name: name not in offenders for name in PROPERTY_NAMES})


def analyze_gates(circuit: Circuit) -> dict:
    degree: dict = {}
    vars_: dict = {}
    for i in circuit.cone():
        g = circuit.gates[i]
        if not g.args:
            degree[i] = 1 if g.op == VAR else 0
            vars_[i] = frozenset((g.var,)) if g.op == VAR else frozenset()
        else:
            ds = [degree[a] for a in g.args]
            degree[i] = max(ds) if g.op == SUM else sum(ds)
            vars_[i] = frozenset().union(*(vars_[a] for a in g.args))
    return {"degree": degree, "vars": vars_}


# transforms -----------------------------------------------------------------

def _rebuild(root: Node, leaf_fn, inner_fn) -> Node:
    memo: dict = {}
    for n in postorder(root):
        if n.is_leaf:
            memo[id(n)] = leaf_fn(n)
        else:
            memo[id(n)] = inner_fn(n, [memo[id(c)] for c in n.children])
    return memo[id(root)]


def binarize(root: Node) -> Node:
    """Left-deep binarization: fan-in at most two everywhere."""
    def inner(n, kids):
        acc = kids[0]
        for k in kids[1:]:
            acc = Node(n.op, (acc, k))
        return acc
    return _rebuild(root, lambda n: n, inner)


def substitute(root: Node, subs: Union[Sequence[Node], Mapping[int, Node]]) -> Node:
    """Replace every occurrence of ``x_i`` by the formula ``subs[i]``.

    A sequence ``[phi_1, ..., phi_k]`` maps ``x_i`` to ``phi_i``.
    """
    if not isinstance(subs, Mapping):
        subs = {i + 1: phi for i, phi in enumerate(subs)}

    def leaf(n):
        if n.op != VAR:
            return n
        if n.var not in subs:
            raise MissingVariableError(n.var, "substitution")
        return subs[n.var]
    return _rebuild(root, leaf, lambda n, kids: Node(n.op, kids))


def replace_at(root: Node, path: Path, new: Node) -> Node:
    chain = [root]
    for i in path:
        node = chain[-1]
        if not 0 <= i < len(node.children):
            raise StructuralError(f"path {tuple(path)} does not name a node")
        chain.append(node.children[i])
    out = new
    for node, i in zip(reversed(chain[:-1]), reversed(path)):
        kids = list(node.children)
        kids[i] = out
        out = Node(node.op, kids)
    return out


def restrict(root: Node, path: Path, alpha: RationalLike) -> Node:
    """``Phi_(w=alpha)``: the node at ``path`` becomes the constant ``alpha``.

    The detached subtree stays available as ``subformula(root, path)``.
    """
    return replace_at(root, tuple(path), Const(alpha))


ZERO = Const(0)


def prune_zeros(root: Node, semantic: bool = False) -> Node:
    """Propagate zero constants upward and drop them.

    Products with a zero factor become ``0``; zero summands are removed and
    unary sums collapse.  With ``semantic=True`` every node whose expansion is
    the zero polynomial is first replaced by ``0``.
    """
    def leaf(n):
        return ZERO if n.op == CONST and n.value == 0 else n

    def inner(n, kids):
        if semantic and node_poly(n).is_zero():
            return ZERO
        if n.op == PROD:
            if any(k is ZERO for k in kids):
                return ZERO
            if all(a is b for a, b in zip(kids, n.children)):
                return n
            return Node(PROD, kids)
        kept = [k for k in kids if k is not ZERO]
        if not kept:
            return ZERO
        if len(kept) == 1:
            return kept[0]
        if len(kept) == len(n.children) and all(a is b for a, b in zip(kept, n.children)):
            return n
        return Node(SUM, kept)

    return _rebuild(root, leaf, inner)


def abs_constants(root: Node) -> Node:
    """Replace every constant ``a`` by ``|a|``."""
    def leaf(n):
        if n.op == CONST and n.value < 0:
            return Const(-n.value)
        return n

    def inner(n, kids):
        if all(a is b for a, b in zip(kids, n.children)):
            return n
        return Node(n.op, kids)
    return _rebuild(root, leaf, inner)


# s-expressions ----------------------------------------------------------------

def _atom_text(n: Node) -> str:
    if n.op == VAR:
        return f"x{n.var}"
    v = n.value
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def serialize(root: Node) -> str:
    out: list = []
    stack: list = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if item.is_leaf:
            out.append(_atom_text(item))
            continue
        out.append(f"({item.op}")
        stack.append(")")
        for ch in reversed(item.children):
            stack.append(ch)
            stack.append(" ")
    return "".join(out)


_TOKEN = re.compile(r"\(\+|\(\*|\)|x\d+|-?\d+(?:/\d+)?")


def parse(text: str) -> Node:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaParseError(f"expected '(+', '(*', ')', a variable or a rational, "
                                    f"found {text[pos:pos + 10]!r}", line, col)
        tok = m.group()
        if tok[0] in "-0123456789" and "/" in tok and int(tok.split("/")[1]) == 0:
            raise FormulaParseError("zero denominator", line, col)
        tokens.append((tok, line, col))
        col += len(tok)
        pos = m.end()
    if not tokens:
        raise FormulaParseError("expected a formula, found end of input", line, col)

    stack: list = []  # (op, children, line, col)
    result = None
    for tok, ln, cl in tokens:
        if result is not None:
            raise FormulaParseError(f"expected end of input, found {tok!r}", ln, cl)
        if tok in ("(+", "(*"):
            stack.append((tok[1], [], ln, cl))
            continue
        if tok == ")":
            if not stack:
                raise FormulaParseError("unexpected ')'", ln, cl)
            op, kids, oln, ocl = stack.pop()
            if len(kids) < 2:
                raise FormulaParseError("expected at least two operands before ')'", ln, cl)
            node = Node(op, kids)
        elif tok[0] == "x":
            vid = int(tok[1:])
            if vid < 1:
                raise FormulaParseError("variable ids start at 1", ln, cl)
            node = Var(vid)
        else:
            node = Const(Fraction(tok))
        if stack:
            stack[-1][1].append(node)
        else:
            result = node
    if stack:
        raise FormulaParseError("expected ')', found end of input", line, col)
    return result


def size(obj: Union[Node, Circuit]) -> int:
    return analyze(obj).size


def degree_of(node: Node):
    """Actual degree of the node's polynomial (``NEG_INF`` when zero)."""
    p = node_poly(node)
    return p.degree if not p.is_zero() else NEG_INF
