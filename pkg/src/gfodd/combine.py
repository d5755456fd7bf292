"""Apply for safe binary operations, aggregation interleaving, and complement."""

from __future__ import annotations

import enum
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .core import (AggOp, AggregationList, AtomOrder, Cmp, DiagramBuilder, GFODD, GfoddError, Leaf, Node,
                   apart_renaming, atom_compare, check_ordering, ensure_valid, rename_variables)

logger = logging.getLogger(__name__)


class BinaryOp(str, enum.Enum):
    PLUS = "plus"
    AND = "and"
    MIN2 = "min2"
    MAX2 = "max2"

    def __call__(self, a: Fraction, b: Fraction) -> Fraction:
        if self is BinaryOp.PLUS:
            return a + b
        if self is BinaryOp.AND:
            if a not in (0, 1) or b not in (0, 1):
                raise GfoddError("'and' is only defined on binary leaves")
            return min(a, b)
        if self is BinaryOp.MIN2:
            return min(a, b)
        return max(a, b)


class InterleavePolicy(str, enum.Enum):
    CONCAT = "concat"
    BLOCK_MERGE = "block_merge"


# op distributes over every listed aggregation operator
_SAFE = {
    BinaryOp.PLUS: {AggOp.MAX, AggOp.MIN},
    BinaryOp.AND: {AggOp.MAX, AggOp.MIN},
    BinaryOp.MIN2: {AggOp.MAX, AggOp.MIN},
    BinaryOp.MAX2: {AggOp.MAX, AggOp.MIN},
}


def is_safe(op: BinaryOp, aggs: Iterable[AggOp]) -> bool:
    return set(AggOp(a) for a in aggs) <= _SAFE[BinaryOp(op)]


def interleave(v1: AggregationList, v2: AggregationList,
               policy: InterleavePolicy = InterleavePolicy.CONCAT) -> AggregationList:
    """Merge two aggregation lists, keeping each list's internal order.

    ``block_merge`` fuses leading blocks that share an operator; when they
    differ it emits the leading block of the list with more blocks left,
    which yields the fewest alternations possible.
    """
    clash = set(v1.variables) & set(v2.variables)
    if clash:
        raise GfoddError(f"aggregation lists share variables {sorted(clash)}")
    policy = InterleavePolicy(policy)
    if policy is InterleavePolicy.CONCAT:
        return AggregationList(v1.entries + v2.entries)
    a, b = v1.blocks(), v2.blocks()
    out: List[Tuple[str, AggOp]] = []
    while a and b:
        if a[0][0] is b[0][0]:
            op, xs = a.pop(0)
            _, ys = b.pop(0)
            out.extend((v, op) for v in xs + ys)
        else:
            src = a if len(a) >= len(b) else b
            op, xs = src.pop(0)
            out.extend((v, op) for v in xs)
    for op, xs in a + b:
        out.extend((v, op) for v in xs)
    return AggregationList(tuple(out))


def apply(g1: GFODD, g2: GFODD, op: BinaryOp, policy: InterleavePolicy = InterleavePolicy.CONCAT,
          order: Optional[AtomOrder] = None, check_sorted: bool = True) -> GFODD:
    """Combine two GFODDs so that MAP(result) = MAP(g1) op MAP(g2) on every interpretation.

    Variables shared between the inputs are renamed apart in g2 first.  The
    pointwise recursion is correct for any pair of diagrams; sortedness is
    only needed for the result to be sorted, so ``check_sorted=False`` admits
    unsorted inputs (the result is then unsorted too).
    """
    op = BinaryOp(op)
    ensure_valid(g1)
    ensure_valid(g2)
    if g1.signature != g2.signature:
        raise GfoddError("apply needs both GFODDs over the same signature")
    mapping = apart_renaming(g1, g2)
    if mapping:
        logger.info("standardizing apart before apply: %s", mapping)
        g2 = rename_variables(g2, mapping)
    aggs = set(g1.aggregation.operators) | set(g2.aggregation.operators)
    if not is_safe(op, aggs):
        raise GfoddError(f"{op.value} is not safe for aggregation {sorted(a.value for a in aggs)}")
    if op is BinaryOp.AND and not (g1.has_binary_leaves() and g2.has_binary_leaves()):
        raise GfoddError("'and' is only defined on binary-leaf diagrams")
    order = order or AtomOrder.default(g1.signature)
    if check_sorted:
        for name, g in (("first", g1), ("second", g2)):
            bad = check_ordering(g.diagram, order)
            if bad:
                raise GfoddError(f"{name} diagram is not sorted (edge {bad[0][0]}->{bad[0][2]})")

    d1, d2 = g1.diagram, g2.diagram
    out = DiagramBuilder()
    memo: Dict[Tuple[int, int], int] = {}

    def rec(p: int, q: int) -> int:
        if (p, q) in memo:
            return memo[p, q]
        a, b = d1.nodes[p], d2.nodes[q]
        if isinstance(a, Leaf) and isinstance(b, Leaf):
            k = out.leaf(op(a.value, b.value))
        elif isinstance(b, Leaf) or (isinstance(a, Node) and
                                     atom_compare(a.label, b.label, order) is Cmp.LESS):
            k = out.node(a.label, rec(a.true_child, q), rec(a.false_child, q))
        elif isinstance(a, Leaf) or atom_compare(a.label, b.label, order) is Cmp.GREATER:
            k = out.node(b.label, rec(p, b.true_child), rec(p, b.false_child))
        else:
            k = out.node(a.label, rec(a.true_child, b.true_child), rec(a.false_child, b.false_child))
        memo[p, q] = k
        return k

    root = rec(d1.root, d2.root)
    diagram = out.build(root)
    # variables may disappear only if a diagram had none on reachable paths; keep
    # the aggregation list consistent with what actually occurs
    present = set(diagram.variables())
    agg = interleave(g1.aggregation, g2.aggregation, policy)
    agg = AggregationList(tuple(e for e in agg.entries if e[0] in present))
    return GFODD(agg, diagram, g1.signature)


def complement(g: GFODD, m) -> GFODD:
    """Leaves v -> m - v and every aggregation operator flipped."""
    m = Fraction(m)
    if g.diagram.nodes and any(isinstance(n, Leaf) and n.value > m for n in g.diagram.nodes):
        raise GfoddError(f"complement bound {m} is below a leaf value")
    return GFODD(g.aggregation.flipped(), g.diagram.map_leaves(lambda v: m - v), g.signature)
