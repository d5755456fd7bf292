"""Random instances for tests and experiments."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import List, Optional, Sequence

from .core import (AggOp, AggregationList, AtomOrder, Const, DiagramBuilder, Eq, GFODD, Interpretation, Pred,
                   Signature, Var)
from .reductions import Cnf, Qbf, Quant

SAMPLE_SIGNATURE = Signature((("p", 1), ("q", 2)), ("c",))
PLAIN_SIGNATURE = Signature((("p", 1), ("q", 2)))

LEAF_VALUES = (Fraction(0), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3))


def _atom_pool(sig: Signature, variables: Sequence[str]) -> List:
    terms = [Var(v) for v in variables] + [Const(c) for c in sig.constants]
    pool = []
    for a, b in itertools.combinations(terms, 2):
        pool.append(Eq(a, b))
    for name, arity in sig.predicates:
        for args in itertools.product(terms, repeat=arity):
            pool.append(Pred(name, args))
    return pool


def random_gfodd(rng: random.Random, sig: Signature = SAMPLE_SIGNATURE, max_vars: int = 4, max_nodes: int = 8,
                 binary: bool = False, ops: Optional[Sequence[AggOp]] = None,
                 leaf_values: Sequence[Fraction] = LEAF_VALUES) -> GFODD:
    """Random sorted GFODD with at most ``max_nodes`` nodes (leaves included).

    Nodes are created from the largest atom down and only point at nodes
    created earlier, so every edge goes from a smaller to a larger atom.
    ``ops`` restricts the aggregation operators (default: both).
    """
    ops = list(ops or (AggOp.MAX, AggOp.MIN))
    names = [f"x{i}" for i in range(1, rng.randint(1, max_vars) + 1)]
    order = AtomOrder.default(sig)
    pool = sorted(_atom_pool(sig, names), key=order.key)
    values = [Fraction(0), Fraction(1)] if binary else list(leaf_values)
    n_leaves = rng.randint(1, min(3, len(values), max_nodes))
    b = DiagramBuilder()
    built = [b.leaf(v) for v in rng.sample(values, n_leaves)]
    n_internal = rng.randint(0, min(max_nodes - n_leaves, len(pool)))
    atoms = sorted(rng.sample(pool, n_internal), key=order.key)
    for atom in reversed(atoms):
        t, f = rng.choice(built), rng.choice(built)
        if t == f and len(built) > 1:
            f = rng.choice([k for k in built if k != t])
        built.append(b.node(atom, t, f))
    diagram = b.build(built[-1]).compact()
    present = diagram.variables()
    rng.shuffle(present)
    agg = AggregationList(tuple((v, rng.choice(ops)) for v in present))
    return GFODD(agg, diagram, sig)


def random_interpretation(rng: random.Random, sig: Signature = SAMPLE_SIGNATURE, max_objects: int = 3,
                          density: float = 0.5, min_objects: int = 1) -> Interpretation:
    n = rng.randint(min_objects, max_objects)
    cmap = {c: rng.randrange(n) for c in sig.constants}
    ext = {p: {t for t in itertools.product(range(n), repeat=a) if rng.random() < density}
           for p, a in sig.predicates}
    return Interpretation(n, cmap, ext)


def random_cnf(rng: random.Random, num_vars: int, num_clauses: int) -> Cnf:
    clauses = []
    for _ in range(num_clauses):
        clauses.append(tuple(rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(3)))
    return Cnf(num_vars, tuple(clauses))


def random_qbf(rng: random.Random, num_vars: int, num_blocks: int, num_clauses: int,
               lead: Quant = Quant.EXISTS) -> Qbf:
    """Random QBF with exactly ``num_blocks`` alternating blocks starting with ``lead``."""
    if not 1 <= num_blocks <= num_vars:
        raise ValueError("need 1 <= num_blocks <= num_vars")
    order = list(range(1, num_vars + 1))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, num_vars), num_blocks - 1))
    bounds = [0] + cuts + [num_vars]
    prefix = []
    quant = Quant(lead)
    for lo, hi in zip(bounds, bounds[1:]):
        prefix.extend((quant, x) for x in order[lo:hi])
        quant = Quant.FORALL if quant is Quant.EXISTS else Quant.EXISTS
    return Qbf(tuple(prefix), random_cnf(rng, num_vars, num_clauses))
