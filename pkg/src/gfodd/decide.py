"""Bounded-model decision procedures by exhaustive interpretation search.

Sizes 1..N are searched in ascending order and, within a size, in the
deterministic order of :func:`enumerate_interpretations`, so the first
witness found is reproducible.  With ``jobs > 1`` each size is split across
worker processes by index residue and the smallest index wins, which gives
the same answer as the sequential scan.
"""

from __future__ import annotations

import enum
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from .core import GFODD, AggregationList, Diagram, GfoddError, Interpretation, Leaf, Node, Signature, ensure_valid
from .evaluate import EvalConfig, Evaluator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBudget:
    max_objects: int
    max_interpretations: Optional[int] = None
    time_limit: Optional[float] = None  # seconds
    jobs: int = 1

    def __post_init__(self):
        if self.max_objects < 1:
            raise GfoddError("max_objects must be at least 1")


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Counterexample:
    interpretation: Interpretation
    value1: Fraction
    value2: Fraction


@dataclass(frozen=True)
class DecisionOutcome:
    answer: Answer
    witness: Optional[Interpretation] = None
    value: Optional[Fraction] = None
    counterexample: Optional[Counterexample] = None
    examined: int = 0

    def __bool__(self):
        return self.answer is Answer.YES


# ---------------------------------------------------------------------------
# Enumeration


def _tuples(n: int, arity: int) -> List[Tuple[int, ...]]:
    return list(itertools.product(range(n), repeat=arity))


def count_interpretations(sig: Signature, n: int) -> int:
    total = n ** len(sig.constants)
    for _, a in sig.predicates:
        total *= 2 ** (n ** a)
    return total


def search_space_size(sig: Signature, max_objects: int) -> int:
    return sum(count_interpretations(sig, n) for n in range(1, max_objects + 1))


def enumerate_interpretations(sig: Signature, n: int) -> Iterator[Interpretation]:
    """Every interpretation with exactly ``n`` objects.

    Constant maps vary slowest; each predicate extension is the subset of
    ``range(n)**arity`` selected by the bits of a counter.
    """
    if n < 1:
        raise GfoddError("domain size must be at least 1")
    preds = list(sig.predicates)
    universes = [_tuples(n, a) for _, a in preds]
    for cvals in itertools.product(range(n), repeat=len(sig.constants)):
        cmap = dict(zip(sig.constants, cvals))
        for masks in itertools.product(*[range(2 ** len(u)) for u in universes]):
            ext = {}
            for (p, _), u, m in zip(preds, universes, masks):
                ext[p] = frozenset(t for b, t in enumerate(u) if m >> b & 1)
            yield Interpretation(n, cmap, ext)


# ---------------------------------------------------------------------------
# Generic search

class _Probe:
    """Picklable probe: kind is 'value' (MAP == target) or 'equiv' (MAPs differ)."""

    def __init__(self, kind: str, g1: GFODD, g2: Optional[GFODD] = None, target: Optional[Fraction] = None,
                 cfg: EvalConfig = EvalConfig()):
        self.kind, self.g1, self.g2, self.target, self.cfg = kind, g1, g2, target, cfg
        self._ev = None

    def __getstate__(self):
        d = dict(self.__dict__)
        d["_ev"] = None
        return d

    def __call__(self, i: Interpretation) -> Optional[tuple]:
        if self._ev is None:
            self._ev = (Evaluator(self.g1, self.cfg, validate=False),
                        Evaluator(self.g2, self.cfg, validate=False) if self.g2 is not None else None)
        e1, e2 = self._ev
        a = e1.map(i)
        if self.kind == "value":
            return (a,) if a == self.target else None
        b = e2.map(i)
        return (a, b) if a != b else None


def _scan_part(probe: _Probe, sig: Signature, n: int, part: int, parts: int):
    for idx, i in enumerate(enumerate_interpretations(sig, n)):
        if idx % parts == part:
            hit = probe(i)
            if hit is not None:
                return idx, i, hit
    return None


def _search(probe: _Probe, sig: Signature, budget: SearchBudget):
    """(hit or None, examined, exhausted?)"""
    examined = 0
    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    parallel = budget.jobs > 1 and budget.max_interpretations is None and deadline is None
    for n in range(1, budget.max_objects + 1):
        if parallel:
            with ProcessPoolExecutor(max_workers=budget.jobs) as pool:
                futs = [pool.submit(_scan_part, probe, sig, n, p, budget.jobs) for p in range(budget.jobs)]
                hits = [f.result() for f in futs]
            hits = [h for h in hits if h is not None]
            if hits:
                idx, i, hit = min(hits, key=lambda h: h[0])
                return (i, hit), examined + idx + 1, False
            examined += count_interpretations(sig, n)
            continue
        for i in enumerate_interpretations(sig, n):
            if budget.max_interpretations is not None and examined >= budget.max_interpretations:
                return None, examined, True
            if deadline is not None and time.monotonic() > deadline:
                return None, examined, True
            examined += 1
            hit = probe(i)
            if hit is not None:
                return (i, hit), examined, False
    return None, examined, False


# ---------------------------------------------------------------------------
# Decision procedures


def gfodd_value(g: GFODD, budget: SearchBudget, v, cfg: EvalConfig = EvalConfig()) -> DecisionOutcome:
    """Yes iff some interpretation with at most N objects has MAP exactly ``v``."""
    v = Fraction(v)
    if v < 0:
        raise GfoddError("target value must be non-negative")
    ensure_valid(g)
    found, examined, exhausted = _search(_Probe("value", g, target=v, cfg=cfg), g.signature, budget)
    if found:
        return DecisionOutcome(Answer.YES, witness=found[0], value=found[1][0], examined=examined)
    return DecisionOutcome(Answer.BUDGET_EXHAUSTED if exhausted else Answer.NO, examined=examined)


def gfodd_sat(g: GFODD, budget: SearchBudget, cfg: EvalConfig = EvalConfig()) -> DecisionOutcome:
    """Yes iff some interpretation with at most N objects has MAP 1."""
    ensure_valid(g)
    if not g.has_binary_leaves():
        raise GfoddError("satisfiability needs a binary-leaf diagram")
    return gfodd_value(g, budget, 1, cfg)


def small_model_bound(f: GFODD) -> int:
    return max(1, len(f.variables) + len(f.signature.constants))


def fodd_sat(f: GFODD, cfg: EvalConfig = EvalConfig(), jobs: int = 1) -> DecisionOutcome:
    """FODD satisfiability; interpretations beyond #variables + #constants objects are never needed."""
    ensure_valid(f)
    if not f.is_fodd():
        raise GfoddError("fodd_sat needs an all-max aggregation list")
    return gfodd_sat(f, SearchBudget(small_model_bound(f), jobs=jobs), cfg)


def gfodd_equiv(g1: GFODD, g2: GFODD, budget: SearchBudget, cfg: EvalConfig = EvalConfig()) -> DecisionOutcome:
    """No with a counterexample iff some interpretation with at most N objects separates the MAPs."""
    ensure_valid(g1)
    ensure_valid(g2)
    if g1.signature != g2.signature:
        raise GfoddError("equivalence needs both GFODDs over the same signature")
    if sorted(map(str, g1.aggregation.operators)) != sorted(map(str, g2.aggregation.operators)):
        logger.warning("comparing GFODDs with different aggregation operators (%s | %s)",
                       g1.aggregation, g2.aggregation)
    found, examined, exhausted = _search(_Probe("equiv", g1, g2, cfg=cfg), g1.signature, budget)
    if found:
        i, (a, b) = found
        return DecisionOutcome(Answer.NO, counterexample=Counterexample(i, a, b), examined=examined)
    return DecisionOutcome(Answer.BUDGET_EXHAUSTED if exhausted else Answer.YES, examined=examined)


def verify_edge_removal_shape(g1: GFODD, g2: GFODD) -> Optional[Tuple[int, bool]]:
    """The single edge (g1 node id, branch) that g2 redirects to a 0 leaf, if that is the only difference.

    The diagrams are walked in lockstep from their roots; node ids need not
    agree, but reachable structure must match one to one except for that edge.
    """
    d1, d2 = g1.diagram, g2.diagram
    if g1.aggregation != g2.aggregation or g1.signature != g2.signature:
        return None
    pairing = {}
    found: List[Tuple[int, bool]] = []
    stack = [(d1.root, d2.root, None)]
    while stack:
        a, b, edge = stack.pop()
        n1, n2 = d1.nodes[a], d2.nodes[b]
        same = (isinstance(n1, Leaf) and isinstance(n2, Leaf) and n1.value == n2.value) or (
            isinstance(n1, Node) and isinstance(n2, Node) and n1.label == n2.label)
        if not same:
            if edge is None or not (isinstance(n2, Leaf) and n2.value == 0):
                return None
            if edge not in found:
                found.append(edge)
            continue
        if a in pairing:
            if pairing[a] != b:
                return None
            continue
        pairing[a] = b
        if isinstance(n1, Node):
            stack.append((n1.false_child, n2.false_child, (a, False)))
            stack.append((n1.true_child, n2.true_child, (a, True)))
    return found[0] if len(found) == 1 else None


def edge_removal_check(g1: GFODD, g2: GFODD, budget: SearchBudget, cfg: EvalConfig = EvalConfig()) -> DecisionOutcome:
    if verify_edge_removal_shape(g1, g2) is None:
        raise GfoddError("second diagram is not the first with exactly one edge redirected to a 0 leaf")
    return gfodd_equiv(g1, g2, budget, cfg)


def zero_like(g: GFODD) -> GFODD:
    """Constant-0 GFODD with g's signature (for the satisfiability/equivalence duality)."""
    return GFODD(AggregationList(), Diagram.constant(0), g.signature)
