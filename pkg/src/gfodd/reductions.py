"""Reduction generators from classic hard problems to GFODD questions, and brute-force oracles.

Each generator is deterministic and returns diagrams built from single-atom
nodes.  The oracles solve the source problems directly so that every
generator can be checked semantically.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .combine import BinaryOp, InterleavePolicy, apply
from .core import (AggOp, AggregationList, Diagram, DiagramBuilder, Eq, GFODD, GfoddError,
                   Interpretation, Node, Pred, Signature, Var, natural_key)
from .decide import Answer, Counterexample, DecisionOutcome
from .evaluate import EvalConfig, Evaluator

P_T = "P_T"
MAX_ORACLE_VARS = 20
MAX_ORACLE_NODES = 8
MAX_ORACLE_EDGES = 20

# Two objects, the first satisfying P_T: the Boolean domain used by the QBF reductions.
I_STAR = Interpretation(2, {}, {P_T: {(0,)}})


# ---------------------------------------------------------------------------
# Problem instances


@dataclass(frozen=True)
class Cnf:
    """3CNF with DIMACS-style literals: +k is x_k, -k is not x_k."""

    num_vars: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.num_vars < 0:
            raise GfoddError("negative variable count")
        for c in self.clauses:
            if len(c) != 3:
                raise GfoddError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise GfoddError(f"literal {lit} out of range 1..{self.num_vars}")

    def variables_used(self) -> List[int]:
        return sorted({abs(l) for c in self.clauses for l in c})

    def satisfied_by(self, assignment: Dict[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


class Quant(str, enum.Enum):
    FORALL = "forall"
    EXISTS = "exists"

    @property
    def agg(self) -> AggOp:
        return AggOp.MAX if self is Quant.EXISTS else AggOp.MIN


@dataclass(frozen=True)
class Qbf:
    prefix: Tuple[Tuple[Quant, int], ...]
    matrix: Cnf

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((Quant(q), int(v)) for q, v in self.prefix))
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise GfoddError("a variable is quantified twice")
        for v in names:
            if not 1 <= v <= self.matrix.num_vars:
                raise GfoddError(f"quantified variable {v} out of range")
        missing = set(self.matrix.variables_used()) - set(names)
        if missing:
            raise GfoddError(f"unquantified variables {sorted(missing)}")

    def blocks(self) -> List[Tuple[Quant, List[int]]]:
        out: List[Tuple[Quant, List[int]]] = []
        for q, v in self.prefix:
            if out and out[-1][0] is q:
                out[-1][1].append(v)
            else:
                out.append((q, [v]))
        return out


def _edge_set(edges, directed: bool) -> FrozenSet[Tuple[int, int]]:
    if directed:
        return frozenset((int(a), int(b)) for a, b in edges)
    return frozenset((min(a, b), max(a, b)) for a, b in ((int(a), int(b)) for a, b in edges))


@dataclass(frozen=True)
class UGraph:
    num_nodes: int
    edges: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", _edge_set(self.edges, directed=False))
        for a, b in self.edges:
            if a == b:
                raise GfoddError(f"self-loop at {a}")
            if not (0 <= a < self.num_nodes and 0 <= b < self.num_nodes):
                raise GfoddError(f"edge ({a},{b}) out of range")

    @classmethod
    def complete(cls, n: int) -> "UGraph":
        return cls(n, frozenset(itertools.combinations(range(n), 2)))

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class DiGraph:
    num_nodes: int
    edges: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", _edge_set(self.edges, directed=True))
        for a, b in self.edges:
            if not (0 <= a < self.num_nodes and 0 <= b < self.num_nodes):
                raise GfoddError(f"edge ({a},{b}) out of range")


# ---------------------------------------------------------------------------
# Graph interpretations

HAMPATH_SIGNATURE = Signature((("E", 2),), eq_rank=1)
ARROW_SIGNATURE = Signature((("E_F", 2), ("E_C", 2)))


def graph_to_interp(g: DiGraph) -> Interpretation:
    return Interpretation(g.num_nodes, {}, {"E": g.edges})


def ugraphs_to_interp(f: UGraph, red: Iterable[Tuple[int, int]] = ()) -> Interpretation:
    """F as an interpretation; ``red`` edges go into E_C (both directions), the rest are blue."""
    red = _edge_set(red, directed=False)
    if not red <= f.edges:
        raise GfoddError("red edges must be edges of F")
    sym = lambda es: {(a, b) for a, b in es} | {(b, a) for a, b in es}
    return Interpretation(f.num_nodes, {}, {"E_F": sym(f.edges), "E_C": sym(red)})


# ---------------------------------------------------------------------------
# Shared gadgets


def _v(name: str) -> Var:
    return Var(name)


def _fodd_over(diagram: Diagram, sig: Signature) -> GFODD:
    names = sorted(diagram.variables(), key=natural_key)
    return GFODD(AggregationList(tuple((v, AggOp.MAX) for v in names)), diagram, sig)


def _pt_gadget(b: DiagramBuilder, y1: Var, y2: Var, ok: int, bad: int, pred: str = P_T, same: bool = False) -> int:
    """Tests P(y1) != P(y2) (or == when ``same``); exits to ``ok`` or ``bad``."""
    hi = b.node(Pred(pred, (y2,)), bad if not same else ok, ok if not same else bad)
    lo = b.node(Pred(pred, (y2,)), ok if not same else bad, bad if not same else ok)
    return b.node(Pred(pred, (y1,)), hi, lo)


def _clause_blocks(b: DiagramBuilder, clauses: Sequence[Tuple[int, int, int]], success: int, fail: int,
                   pred_for=lambda var: P_T) -> int:
    """Chain of clause blocks over literal variables v{i}_{j}; returns the entry node."""
    nxt = success
    for i in range(len(clauses), 0, -1):
        miss = fail
        for j in range(3, 0, -1):
            lit = clauses[i - 1][j - 1]
            atom = Pred(pred_for(abs(lit)), (_v(f"v{i}_{j}"),))
            miss = b.node(atom, nxt, miss) if lit > 0 else b.node(atom, miss, nxt)
        nxt = miss
    return nxt


def _literal_vars(clauses: Sequence[Tuple[int, int, int]]) -> Dict[int, List[str]]:
    out: Dict[int, List[str]] = {}
    for i, c in enumerate(clauses, 1):
        for j, lit in enumerate(c, 1):
            out.setdefault(abs(lit), []).append(f"v{i}_{j}")
    return {k: sorted(vs, key=natural_key) for k, vs in out.items()}


# ---------------------------------------------------------------------------
# Generators


def gen_hampath(n: int) -> GFODD:
    """FODD with MAP 1 on a digraph interpretation iff it has a Hamiltonian path on ``n`` nodes."""
    if n < 2:
        raise GfoddError("need at least 2 path variables")
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)
    nxt = one
    for i, j in reversed(list(itertools.combinations(range(1, n + 1), 2))):
        nxt = b.node(Eq(_v(f"v{i}"), _v(f"v{j}")), zero, nxt)
    for i in range(n - 1, 0, -1):
        nxt = b.node(Pred("E", (_v(f"v{i}"), _v(f"v{i + 1}"))), nxt, zero)
    diagram = b.build(nxt)
    agg = AggregationList(tuple((f"v{i}", AggOp.MAX) for i in range(1, n + 1)))
    return GFODD(agg, diagram, HAMPATH_SIGNATURE)


PT_SIGNATURE = Signature(((P_T, 1),))


def gen_3sat(f: Cnf) -> GFODD:
    """FODD satisfiable iff ``f`` is; satisfied by the 2-object P_T interpretation when f is."""
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)
    y1, y2 = _v("y1"), _v("y2")
    gadget = _pt_gadget(b, y1, y2, one, zero)
    clauses = _clause_blocks(b, f.clauses, gadget, zero)
    nxt = b.node(Eq(y1, y2), zero, clauses)
    lits = _literal_vars(f.clauses)
    for x in range(f.num_vars, 0, -1):
        w = _v(f"w{x}")
        alt = b.node(Eq(w, y2), nxt, zero)
        nxt = b.node(Eq(w, y1), nxt, alt)
        for name in reversed(lits.get(x, [])):
            nxt = b.node(Eq(w, _v(name)), nxt, zero)
    return _fodd_over(b.build(nxt), PT_SIGNATURE)


def _consistency_blocks(b: DiagramBuilder, q: Qbf, after: int, defaults: Dict[int, int]) -> int:
    """Blocks in prefix order; block k forces every literal variable of x to equal w{k}."""
    lits = _literal_vars(q.matrix.clauses)
    nxt = after
    for k in range(len(q.prefix), 0, -1):
        x = q.prefix[k - 1][1]
        w = _v(f"w{k}")
        names = lits.get(x, [])
        if not names:
            nxt = b.node(Eq(w, w), nxt, defaults[k])
        for name in reversed(names):
            nxt = b.node(Eq(w, _v(name)), nxt, defaults[k])
    return nxt


def _qbf_aggregation(q: Qbf, ops: Optional[Dict[int, AggOp]] = None) -> AggregationList:
    lits = _literal_vars(q.matrix.clauses)
    entries = []
    for k, (quant, x) in enumerate(q.prefix, 1):
        op = (ops or {}).get(k, quant.agg)
        entries.append((f"w{k}", op))
        entries.extend((name, op) for name in lits.get(x, []))
    return AggregationList(tuple(entries))


def gen_qbf_eval(q: Qbf) -> Tuple[GFODD, Interpretation]:
    """GFODD whose MAP on the fixed 2-object interpretation is the truth value of ``q``."""
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)
    clauses = _clause_blocks(b, q.matrix.clauses, one, zero)
    defaults = {k: (zero if quant is Quant.EXISTS else one) for k, (quant, _) in enumerate(q.prefix, 1)}
    root = _consistency_blocks(b, q, clauses, defaults)
    return GFODD(_qbf_aggregation(q), b.build(root), PT_SIGNATURE), I_STAR


def _two_object_checker(b: DiagramBuilder, ok: int, zero: int) -> int:
    """y1 != y2, any three z's collide, then ``ok``."""
    y1, y2 = _v("y1"), _v("y2")
    z1, z2, z3 = _v("z1"), _v("z2"), _v("z3")
    c3 = b.node(Eq(z2, z3), ok, zero)
    c2 = b.node(Eq(z1, z3), ok, c3)
    c1 = b.node(Eq(z1, z2), ok, c2)
    return b.node(Eq(y1, y2), zero, c1)


_CHECKER_AGG = AggregationList.of("max y1", "max y2", "min z1", "min z2", "min z3")


def _require_shape(q: Qbf, lead: Quant, min_blocks: int):
    blocks = q.blocks()
    if not blocks or blocks[0][0] is not lead or len(blocks) < min_blocks:
        raise GfoddError(f"need a {lead.value}-leading prefix with at least {min_blocks} blocks")


def gen_qbf_sat(q: Qbf) -> GFODD:
    """Binary-leaf GFODD satisfiable within 3 objects iff ``q`` is true.

    Its satisfying interpretations are exactly the copies of the 2-object
    P_T interpretation on which the QBF diagram evaluates to 1.
    """
    _require_shape(q, Quant.EXISTS, 2)
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)
    gadget = _pt_gadget(b, _v("y1"), _v("y2"), one, zero)
    b1 = GFODD(_CHECKER_AGG, b.build(_two_object_checker(b, gadget, zero)), PT_SIGNATURE)
    b2, _ = gen_qbf_eval(q)
    return apply(b1, b2, BinaryOp.AND, InterleavePolicy.BLOCK_MERGE)


def qbf_equiv_signature(q: Qbf) -> Signature:
    first = q.blocks()[0][1]
    return Signature(((P_T, 1),) + tuple((f"P_x{x}", 1) for x in first))


def gen_qbf_equiv_simple(q: Qbf) -> Tuple[GFODD, GFODD, int]:
    """(B1, B, N) with B1 equivalent to B on interpretations of up to N objects iff ``q`` is true.

    B1 accepts exactly the legal interpretations: two objects told apart by
    P_T, with each P_x{i} constant on them (a truth setting for the leading
    universal block).  B is B1 conjoined with a QBF diagram that reads the
    leading block from those predicates.  B is not sorted.
    """
    _require_shape(q, Quant.FORALL, 3)
    sig = qbf_equiv_signature(q)
    first = q.blocks()[0][1]
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)
    nxt = one
    for x in reversed(first):
        nxt = _pt_gadget(b, _v("y1"), _v("y2"), nxt, zero, pred=f"P_x{x}", same=True)
    gadget = _pt_gadget(b, _v("y1"), _v("y2"), nxt, zero)
    b1 = GFODD(_CHECKER_AGG, b.build(_two_object_checker(b, gadget, zero)), sig)

    c = DiagramBuilder()
    zero, one = c.leaf(0), c.leaf(1)
    first_set = set(first)
    clauses = _clause_blocks(c, q.matrix.clauses, one, zero,
                             pred_for=lambda x: f"P_x{x}" if x in first_set else P_T)
    lead = len(first)
    defaults = {}
    ops = {}
    for k, (quant, _) in enumerate(q.prefix, 1):
        if k <= lead:
            defaults[k], ops[k] = zero, AggOp.MAX
        else:
            defaults[k] = zero if quant is Quant.EXISTS else one
    root = _consistency_blocks(c, q, clauses, defaults)
    b2 = GFODD(_qbf_aggregation(q, ops), c.build(root), sig)
    combined = apply(b1, b2, BinaryOp.AND, InterleavePolicy.BLOCK_MERGE, check_sorted=False)
    return b1, combined, 2


def gen_arrowing(F: UGraph, G: UGraph, H: UGraph) -> Tuple[GFODD, GFODD]:
    """Sorted FODD pair (B1, B2) with B1 equivalent to B2 iff F arrows (G, H).

    B1 has MAP 1 iff the interpretation contains an induced copy of F (on
    E_F).  B2 additionally needs, inside such a copy, a red copy of G or a
    blue copy of H, where an edge is red when E_C holds in either direction.
    Three routes hang off the selector variables a1..a3: the G route, the H
    route, and a bypass that only checks F.  B2 is B1 with the bypass edge
    redirected to 0, so the pair is also an edge-removal instance.
    """
    for name, gr in (("F", F), ("G", G), ("H", H)):
        if gr.num_nodes < 1:
            raise GfoddError(f"graph {name} must have at least one node")
    n = F.num_nodes
    f = [_v(f"f{i}") for i in range(1, n + 1)]
    b = DiagramBuilder()
    zero, one = b.leaf(0), b.leaf(1)

    def f_verifier(nxt: int) -> int:
        pairs = [(a, c) for a in range(n) for c in range(n) if a != c]
        for a, c in reversed(pairs):
            edge = (min(a, c), max(a, c)) in F.edges
            atom = Pred("E_F", (f[a], f[c]))
            nxt = b.node(atom, nxt, zero) if edge else b.node(atom, zero, nxt)
        return nxt

    def f_map(nxt: int) -> int:
        for i, j in reversed(list(itertools.combinations(range(n), 2))):
            nxt = b.node(Eq(f[i], f[j]), zero, nxt)
        return nxt

    def sub_map(xs: List[Var], nxt: int) -> int:
        """Each x equals some f, and the xs are pairwise distinct."""
        for j in range(len(xs) - 1, -1, -1):
            for k in range(j - 1, -1, -1):
                nxt = b.node(Eq(xs[j], xs[k]), zero, nxt)
            miss = zero
            for fk in reversed(f):
                miss = b.node(Eq(xs[j], fk), nxt, miss)
            nxt = miss
        return nxt

    def edges_present(xs: List[Var], edges, nxt: int) -> int:
        for i, j in reversed(edges):
            nxt = b.node(Pred("E_F", (xs[i], xs[j])), nxt, zero)
        return nxt

    # G route: red copy of G
    g = [_v(f"g{i}") for i in range(1, G.num_nodes + 1)]
    g_edges = G.sorted_edges()
    ends = [(_v(f"go{e}a"), _v(f"go{e}b")) for e in range(1, len(g_edges) + 1)]
    nxt = one
    for s, t in reversed(ends):
        nxt = b.node(Pred("E_C", (s, t)), nxt, zero)
    nxt = edges_present(g, g_edges, nxt)
    nxt = f_verifier(nxt)
    for (i, j), (s, t) in reversed(list(zip(g_edges, ends))):
        swap_t = b.node(Eq(t, g[i]), nxt, zero)
        swap_s = b.node(Eq(s, g[j]), swap_t, zero)
        keep_t = b.node(Eq(t, g[j]), nxt, zero)
        nxt = b.node(Eq(s, g[i]), keep_t, swap_s)
    nxt = sub_map(g, nxt)
    g_route = f_map(nxt)

    # H route: blue copy of H
    h = [_v(f"h{i}") for i in range(1, H.num_nodes + 1)]
    h_edges = H.sorted_edges()
    nxt = one
    for i, j in sorted({(i, j) for e in h_edges for i, j in (e, e[::-1])}, reverse=True):
        nxt = b.node(Pred("E_C", (h[i], h[j])), zero, nxt)
    nxt = edges_present(h, h_edges, nxt)
    nxt = f_verifier(nxt)
    nxt = sub_map(h, nxt)
    h_route = f_map(nxt)

    bypass = f_map(f_verifier(one))
    a1, a2, a3 = _v("a1"), _v("a2"), _v("a3")
    split = b.node(Eq(a1, a3), bypass, h_route)
    root = b.node(Eq(a1, a2), split, g_route)
    d1 = b.build(root).compact()
    nodes = list(b.nodes)
    nodes[split] = Node(nodes[split].label, zero, h_route)
    d2 = Diagram(tuple(nodes), root).compact()
    g1 = _fodd_over(d1, ARROW_SIGNATURE)
    return g1, GFODD(g1.aggregation, d2, ARROW_SIGNATURE)


def gen_value_instance(g1: GFODD, g2: GFODD) -> Tuple[GFODD, Fraction]:
    """B = g1 + g2; some interpretation gives B the value 1 iff g1 and g2 disagree on it."""
    if not (g1.has_binary_leaves() and g2.has_binary_leaves()):
        raise GfoddError("value instance needs binary-leaf diagrams")
    return apply(g1, g2, BinaryOp.PLUS, InterleavePolicy.BLOCK_MERGE), Fraction(1)


def restricted_arrowing_equiv(F: UGraph, G: UGraph, H: UGraph,
                              pair: Optional[Tuple[GFODD, GFODD]] = None,
                              cfg: EvalConfig = EvalConfig()) -> DecisionOutcome:
    """Compare B1 and B2 on the 2^|E(F)| colourings of F only.

    These interpretations suffice to expose any failure of arrowing, so
    this is a sound and complete test of F -> (G, H) that avoids full
    bounded equivalence over all interpretations.
    """
    if len(F.edges) > MAX_ORACLE_EDGES:
        raise GfoddError(f"F has more than {MAX_ORACLE_EDGES} edges")
    b1, b2 = pair or gen_arrowing(F, G, H)
    e1, e2 = Evaluator(b1, cfg), Evaluator(b2, cfg)
    edges = F.sorted_edges()
    count = 0
    for mask in range(2 ** len(edges)):
        red = [e for k, e in enumerate(edges) if mask >> k & 1]
        i = ugraphs_to_interp(F, red)
        count += 1
        x, y = e1.map(i), e2.map(i)
        if x != y:
            return DecisionOutcome(Answer.NO, counterexample=Counterexample(i, x, y), examined=count)
    return DecisionOutcome(Answer.YES, examined=count)


# ---------------------------------------------------------------------------
# Oracles


def cnf_sat(f: Cnf) -> bool:
    if f.num_vars > MAX_ORACLE_VARS:
        raise GfoddError(f"oracle limited to {MAX_ORACLE_VARS} variables")
    for bits in itertools.product((False, True), repeat=f.num_vars):
        if f.satisfied_by(dict(enumerate(bits, 1))):
            return True
    return False


def qbf_eval(q: Qbf) -> bool:
    if len(q.prefix) > MAX_ORACLE_VARS:
        raise GfoddError(f"oracle limited to {MAX_ORACLE_VARS} variables")
    assignment = {v: False for v in range(1, q.matrix.num_vars + 1)}

    def rec(k: int) -> bool:
        if k == len(q.prefix):
            return q.matrix.satisfied_by(assignment)
        quant, x = q.prefix[k]
        for val in (False, True):
            assignment[x] = val
            r = rec(k + 1)
            if quant is Quant.EXISTS and r:
                return True
            if quant is Quant.FORALL and not r:
                return False
        return quant is Quant.FORALL

    return rec(0)


def hampath(g: DiGraph) -> bool:
    if g.num_nodes > MAX_ORACLE_NODES:
        raise GfoddError(f"oracle limited to {MAX_ORACLE_NODES} nodes")
    return any(all((p[k], p[k + 1]) in g.edges for k in range(len(p) - 1))
               for p in itertools.permutations(range(g.num_nodes)))


def _embeds(pattern: UGraph, host_nodes: int, host_edges: FrozenSet[Tuple[int, int]]) -> bool:
    """Injective map of pattern nodes to host nodes carrying every pattern edge onto a host edge."""
    adj = host_edges | {(b, a) for a, b in host_edges}
    image: List[int] = []

    def rec(k: int) -> bool:
        if k == pattern.num_nodes:
            return True
        for o in range(host_nodes):
            if o in image:
                continue
            if all((image[j], o) in adj for j in range(k) if (j, k) in pattern.edges):
                image.append(o)
                if rec(k + 1):
                    return True
                image.pop()
        return False

    return rec(0)


def arrows(F: UGraph, G: UGraph, H: UGraph) -> bool:
    """Every red/blue colouring of F's edges has a red G or a blue H."""
    if F.num_nodes > MAX_ORACLE_NODES or len(F.edges) > MAX_ORACLE_EDGES:
        raise GfoddError("arrowing oracle instance too large")
    edges = F.sorted_edges()
    for mask in range(2 ** len(edges)):
        red = frozenset(e for k, e in enumerate(edges) if mask >> k & 1)
        blue = frozenset(edges) - red
        if not (_embeds(G, F.num_nodes, red) or _embeds(H, F.num_nodes, blue)):
            return False
    return True


def is_isomorphic_to_i_star(i: Interpretation) -> bool:
    """Two objects, exactly one of them in P_T."""
    return i.domain_size == 2 and len(i.extensions.get(P_T, ())) == 1
