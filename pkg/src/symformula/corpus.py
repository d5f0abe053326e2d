"""Seeded random formulas and circuits for property and acceptance runs.

Every generator takes a ``random.Random`` (or a seed) so corpora are
reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Union

from .formula_ir import CONST, PROD, SUM, VAR, Circuit, Const, Gate, Node, Prod, Sum, Var

_CONSTANTS = (Fraction(-2), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(3))

Seed = Union[int, random.Random]


def _rng(seed: Seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_formula(seed: Seed, n_vars: int = 4, leaves: int = 8) -> Node:
    """Arbitrary formula with ``leaves`` leaves: variables, small constants, mixed gates."""
    rng = _rng(seed)

    def gen(budget: int) -> Node:
        if budget == 1:
            if rng.random() < 0.2:
                return Const(rng.choice(_CONSTANTS))
            return Var(rng.randint(1, n_vars))
        fan = rng.randint(2, min(3, budget))
        cuts = sorted(rng.sample(range(1, budget), fan - 1))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [budget])]
        kids = [gen(s) for s in sizes]
        return Sum(*kids) if rng.random() < 0.5 else Prod(*kids)

    return gen(leaves)


def _split_pool(rng: random.Random, pool: list, first: int, second: int) -> tuple:
    pool = pool[:]
    rng.shuffle(pool)
    cut = rng.randint(first, len(pool) - second)
    return pool[:cut], pool[cut:]


def random_homogeneous_multilinear(seed: Seed, k: int, n_vars: int, max_leaves: int,
                                   const_rate: float = 0.1) -> Node:
    """Fan-in-two homogeneous formula of degree ``k``, syntactically multilinear.

    Product children draw from disjoint variable pools.  Occasionally a
    constant factor is multiplied in, which keeps homogeneity.
    """
    rng = _rng(seed)
    if n_vars < k or max_leaves < k:
        raise ValueError("need n_vars >= k and max_leaves >= k")

    def gen(pool: list, deg: int, budget: int) -> Node:
        if budget > deg + 1 and rng.random() < const_rate:
            return Prod(Const(rng.choice(_CONSTANTS)), gen(pool, deg, budget - 1))
        if budget >= 2 * deg and rng.random() < 0.4:
            b1 = rng.randint(deg, budget - deg)
            return Sum(gen(pool, deg, b1), gen(pool, deg, budget - b1))
        if deg == 1:
            if budget >= 2:
                b1 = rng.randint(1, budget - 1)
                return Sum(gen(pool, 1, b1), gen(pool, 1, budget - b1))
            return Var(rng.choice(pool))
        d1 = rng.randint(1, deg - 1)
        d2 = deg - d1
        b1 = rng.randint(d1, budget - d2)
        p1, p2 = _split_pool(rng, pool, d1, d2)
        return Prod(gen(p1, d1, b1), gen(p2, d2, budget - b1))

    return gen(list(range(1, n_vars + 1)), k, max_leaves)


def decomposition_corpus(seed: int = 2024, count: int = 200) -> list:
    """Homogeneous multilinear fan-in-two formulas: degree 2..8, at most 16
    variables, at most 80 leaves."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        k = rng.randint(2, 8)
        n_vars = rng.randint(k, 16)
        cap = rng.randint(max(k, 8), 80)
        out.append(random_homogeneous_multilinear(rng, k, n_vars, cap))
    return out


def random_bounded_depth(seed: Seed, k: int, n_vars: int, d: int,
                         sum_rate: float = 0.2) -> Node:
    """Homogeneous syntactically multilinear formula of degree ``k`` and product-depth at most ``d``."""
    rng = _rng(seed)
    if n_vars < k:
        raise ValueError("need n_vars >= k")

    def linear(pool: list) -> Node:
        m = 1 if len(pool) == 1 or rng.random() < 0.6 else 2
        vs = rng.sample(pool, m)
        return Sum(*[Var(v) for v in vs]) if m > 1 else Var(vs[0])

    def product(pool: list, deg: int, depth: int) -> Node:
        if depth == 1:
            parts = [1] * deg
        else:
            m = rng.randint(2, min(deg, 6))
            cuts = sorted(rng.sample(range(1, deg), m - 1))
            parts = [b - a for a, b in zip([0] + cuts, cuts + [deg])]
        pool = pool[:]
        rng.shuffle(pool)
        # each child gets at least its degree in variables; spares go to random children
        sizes = list(parts)
        for _ in range(len(pool) - deg):
            sizes[rng.randrange(len(sizes))] += 1
        kids = []
        at = 0
        for dg, sz in zip(parts, sizes):
            kids.append(gen(pool[at:at + sz], dg, depth - 1))
            at += sz
        return Prod(*kids)

    def gen(pool: list, deg: int, depth: int) -> Node:
        if deg == 1 or depth == 0:
            return linear(pool)
        terms = 2 if rng.random() < sum_rate else 1
        kids = [product(pool, deg, depth) for _ in range(terms)]
        return Sum(*kids) if terms > 1 else kids[0]

    return gen(list(range(1, n_vars + 1)), k, d)


# (q, d, k range) with k (2q)^-d > 1 throughout
FORM_PARAMS = ((2, 1, (5, 12)), (3, 1, (7, 12)), (2, 2, (17, 24)), (2, 3, (65, 72)))


def form_corpus(seed: int = 7, per_param: int = 10) -> list:
    """``(formula, q, d)`` triples of product-depth at most 3 with ``k (2q)^-d > 1``."""
    rng = random.Random(seed)
    out = []
    for q, d, (lo, hi) in FORM_PARAMS:
        for _ in range(per_param):
            k = rng.randint(lo, hi)
            n_vars = rng.randint(k, k + k // 2 + 1)
            out.append((random_bounded_depth(rng, k, n_vars, d, sum_rate=0.3 if d < 3 else 0.05), q, d))
    return out


def random_w_homogeneous_circuit(seed: Seed, k: int, weights: Optional[dict] = None,
                                 width: int = 2) -> Circuit:
    """Circuit whose every gate is syntactically w-homogeneous, output of w-degree ``k``.

    Default weights are ``w(y_i) = i`` for ``i <= k``.  Gates are built layer by
    layer in w-degree: variables of that weight, products of two lower gates
    (or a constant times a gate) and sums of two gates of equal w-degree.
    """
    rng = _rng(seed)
    if weights is None:
        weights = {i: i for i in range(1, k + 1)}
    gates: list = []
    by_deg: dict = {}

    def add(g: Gate, deg: int) -> int:
        gates.append(g)
        by_deg.setdefault(deg, []).append(len(gates) - 1)
        return len(gates) - 1

    consts = [add(Gate(CONST, (), None, c), 0) for c in rng.sample(_CONSTANTS, 2)]
    for D in range(1, k + 1):
        for v, wv in sorted(weights.items()):
            if wv == D:
                add(Gate(VAR, (), v), D)
        for _ in range(width):
            splits = [a for a in range(1, D) if by_deg.get(a) and by_deg.get(D - a)]
            if splits:
                a = rng.choice(splits)
                add(Gate(PROD, (rng.choice(by_deg[a]), rng.choice(by_deg[D - a]))), D)
        level = by_deg.get(D, [])
        if level:
            if rng.random() < 0.5:
                add(Gate(PROD, (rng.choice(consts), rng.choice(level))), D)
            if len(by_deg[D]) >= 2:
                a, b = rng.sample(by_deg[D], 2)
                add(Gate(SUM, (a, b)), D)
    if not by_deg.get(k):
        raise ValueError(f"no gate of w-degree {k}; weights too coarse")
    top = by_deg[k]
    out = top[-1]
    if len(top) >= 2:
        gates.append(Gate(SUM, (top[-1], top[-2])))
        out = len(gates) - 1
    return Circuit(tuple(gates), out)


def circuit_corpus(seed: int = 11, count: int = 50, k_max: int = 8) -> list:
    """``(circuit, weights)`` pairs; half use ``w(y_i)=i``, half random small weights."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(2, k_max)
        if len(out) % 2 == 0:
            w = {i: i for i in range(1, k + 1)}
        else:
            m = rng.randint(2, 5)
            w = {i: rng.randint(1, 3) for i in range(1, m + 1)}
            w[1] = 1
        try:
            out.append((random_w_homogeneous_circuit(rng, k, w), w))
        except ValueError:
            continue
    return out
