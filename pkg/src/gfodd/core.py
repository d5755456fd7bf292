"""Signatures, terms, atoms, diagrams, aggregation lists and interpretations.

Everything here is immutable once built.  Diagrams are stored as an
append-only node table; :class:`DiagramBuilder` is the mutable helper used
to assemble one.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

DEFAULT_MAX_ARITY = 3

EQ = "eq"  # reserved name used for the built-in equality predicate in text formats


class GfoddError(ValueError):
    """Raised for malformed input to any gfodd operation."""


# ---------------------------------------------------------------------------
# Signatures, terms, atoms


@dataclass(frozen=True)
class Signature:
    predicates: Tuple[Tuple[str, int], ...] = ()
    constants: Tuple[str, ...] = ()
    # position of "=" among the predicates; 0 means equality is ranked first
    eq_rank: int = 0
    max_arity: int = DEFAULT_MAX_ARITY

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple((str(n), int(a)) for n, a in self.predicates))
        object.__setattr__(self, "constants", tuple(self.constants))

    def arity(self, name: str) -> int:
        for n, a in self.predicates:
            if n == name:
                return a
        raise GfoddError(f"unknown predicate {name!r}")

    def has_predicate(self, name: str) -> bool:
        return any(n == name for n, _ in self.predicates)

    def violations(self) -> List[str]:
        out = []
        names = [n for n, _ in self.predicates]
        for n in sorted({n for n in names if names.count(n) > 1}):
            out.append(f"duplicate predicate {n}")
        for n in sorted({c for c in self.constants if self.constants.count(c) > 1}):
            out.append(f"duplicate constant {n}")
        for n, a in self.predicates:
            if n in (EQ, "="):
                out.append(f"equality is implicit and may not be declared ({n})")
            if a < 0 or a > self.max_arity:
                out.append(f"predicate {n} has arity {a} outside 0..{self.max_arity}")
        if set(names) & set(self.constants):
            out.append("predicate and constant names overlap")
        if not 0 <= self.eq_rank <= len(self.predicates):
            out.append(f"eq_rank {self.eq_rank} out of range")
        return out


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    @property
    def args(self) -> Tuple[Term, Term]:
        return (self.left, self.right)

    def __str__(self):
        return f"{EQ}({self.left},{self.right})"


@dataclass(frozen=True)
class Pred:
    name: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"{self.name}({','.join(map(str, self.args))})"


Atom = Union[Eq, Pred]


def atom_variables(atom: Atom) -> List[str]:
    return [t.name for t in atom.args if isinstance(t, Var)]


def rename_atom(atom: Atom, mapping: Mapping[str, str]) -> Atom:
    def ren(t):
        return Var(mapping.get(t.name, t.name)) if isinstance(t, Var) else t

    if isinstance(atom, Eq):
        return Eq(ren(atom.left), ren(atom.right))
    return Pred(atom.name, tuple(ren(t) for t in atom.args))


# ---------------------------------------------------------------------------
# Diagrams


@dataclass(frozen=True)
class Leaf:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Node:
    label: Atom
    true_child: int
    false_child: int


@dataclass(frozen=True)
class Diagram:
    nodes: Tuple[Union[Node, Leaf], ...]
    root: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    def __len__(self):
        return len(self.nodes)

    def reachable(self) -> List[int]:
        """Node ids reachable from the root, in depth-first preorder (true branch first)."""
        seen = set()
        out = []
        stack = [self.root]
        while stack:
            k = stack.pop()
            if k in seen or not 0 <= k < len(self.nodes):
                continue
            seen.add(k)
            out.append(k)
            n = self.nodes[k]
            if isinstance(n, Node):
                stack.append(n.false_child)
                stack.append(n.true_child)
        return out

    def variables(self) -> List[str]:
        """Variables labelling reachable nodes, in first-seen order."""
        out: Dict[str, None] = {}
        for k in self.reachable():
            n = self.nodes[k]
            if isinstance(n, Node):
                for v in atom_variables(n.label):
                    out.setdefault(v)
        return list(out)

    def leaf_values(self) -> List[Fraction]:
        return sorted({self.nodes[k].value for k in self.reachable() if isinstance(self.nodes[k], Leaf)})

    def edges(self) -> Iterator[Tuple[int, bool, int]]:
        """(parent, branch, child) over reachable internal nodes."""
        for k in self.reachable():
            n = self.nodes[k]
            if isinstance(n, Node):
                yield k, True, n.true_child
                yield k, False, n.false_child

    def rename(self, mapping: Mapping[str, str]) -> "Diagram":
        nodes = [Node(rename_atom(n.label, mapping), n.true_child, n.false_child) if isinstance(n, Node) else n
                 for n in self.nodes]
        return Diagram(tuple(nodes), self.root)

    def map_leaves(self, fn) -> "Diagram":
        return Diagram(tuple(Leaf(fn(n.value)) if isinstance(n, Leaf) else n for n in self.nodes), self.root)

    def compact(self) -> "Diagram":
        """Copy keeping only reachable nodes, renumbered in preorder."""
        order = self.reachable()
        index = {k: i for i, k in enumerate(order)}
        nodes = []
        for k in order:
            n = self.nodes[k]
            if isinstance(n, Node):
                n = Node(n.label, index[n.true_child], index[n.false_child])
            nodes.append(n)
        return Diagram(tuple(nodes), 0)

    @staticmethod
    def constant(value) -> "Diagram":
        return Diagram((Leaf(Fraction(value)),), 0)


class DiagramBuilder:
    """Append-only node table.

    ``hash_cons`` shares structurally identical nodes; it is off by default
    since nothing downstream needs canonical diagrams.
    """

    def __init__(self, hash_cons: bool = False):
        self.nodes: List[Union[Node, Leaf]] = []
        self._leaves: Dict[Fraction, int] = {}
        self._hash_cons = hash_cons
        self._table: Dict[Node, int] = {}

    def leaf(self, value) -> int:
        value = Fraction(value)
        if value not in self._leaves:
            self._leaves[value] = len(self.nodes)
            self.nodes.append(Leaf(value))
        return self._leaves[value]

    def node(self, label: Atom, true_child: int, false_child: int) -> int:
        n = Node(label, true_child, false_child)
        if self._hash_cons and n in self._table:
            return self._table[n]
        self.nodes.append(n)
        k = len(self.nodes) - 1
        if self._hash_cons:
            self._table[n] = k
        return k

    def placeholder(self) -> int:
        """Reserve a slot to be filled later with :meth:`fill` (for top-down construction)."""
        self.nodes.append(None)  # type: ignore[arg-type]
        return len(self.nodes) - 1

    def fill(self, k: int, label: Atom, true_child: int, false_child: int) -> int:
        self.nodes[k] = Node(label, true_child, false_child)
        return k

    def build(self, root: int) -> Diagram:
        if any(n is None for n in self.nodes):
            raise GfoddError("unfilled placeholder in diagram")
        return Diagram(tuple(self.nodes), root)


# ---------------------------------------------------------------------------
# Aggregation and GFODDs


class AggOp(str, enum.Enum):
    MAX = "max"
    MIN = "min"

    def flip(self) -> "AggOp":
        return AggOp.MIN if self is AggOp.MAX else AggOp.MAX

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AggregationList:
    entries: Tuple[Tuple[str, AggOp], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(v), AggOp(op)) for v, op in self.entries))

    @classmethod
    def of(cls, *items: Union[str, Tuple[str, str]]) -> "AggregationList":
        """``AggregationList.of("max x1", ("min", "x2"))``."""
        entries = []
        for it in items:
            if isinstance(it, str):
                op, v = it.split()
            else:
                op, v = it
            entries.append((v, AggOp(op)))
        return cls(tuple(entries))

    @property
    def variables(self) -> List[str]:
        return [v for v, _ in self.entries]

    @property
    def operators(self) -> List[AggOp]:
        return [op for _, op in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def blocks(self) -> List[Tuple[AggOp, List[str]]]:
        out: List[Tuple[AggOp, List[str]]] = []
        for v, op in self.entries:
            if out and out[-1][0] is op:
                out[-1][1].append(v)
            else:
                out.append((op, [v]))
        return out

    def depth(self) -> int:
        """Number of maximal same-operator blocks (aggregation depth)."""
        return len(self.blocks())

    def rename(self, mapping: Mapping[str, str]) -> "AggregationList":
        return AggregationList(tuple((mapping.get(v, v), op) for v, op in self.entries))

    def flipped(self) -> "AggregationList":
        return AggregationList(tuple((v, op.flip()) for v, op in self.entries))

    def __str__(self):
        return ", ".join(f"{op} {v}" for v, op in self.entries)


@dataclass(frozen=True)
class GFODD:
    aggregation: AggregationList
    diagram: Diagram
    signature: Signature

    @property
    def variables(self) -> List[str]:
        return self.aggregation.variables

    def is_fodd(self) -> bool:
        return all(op is AggOp.MAX for op in self.aggregation.operators)

    def has_binary_leaves(self) -> bool:
        return set(self.diagram.leaf_values()) <= {Fraction(0), Fraction(1)}

    def max_leaf(self) -> Fraction:
        return max(self.diagram.leaf_values())


def fodd(diagram: Diagram, signature: Signature, variables: Optional[Sequence[str]] = None) -> GFODD:
    """All-max GFODD over the diagram's variables (or the given order)."""
    if variables is None:
        variables = diagram.variables()
    return GFODD(AggregationList(tuple((v, AggOp.MAX) for v in variables)), diagram, signature)


def constant_gfodd(value, signature: Signature = Signature(), aggregation: AggregationList = AggregationList()) -> GFODD:
    return GFODD(aggregation, Diagram.constant(value), signature)


# ---------------------------------------------------------------------------
# Atom ordering


def natural_key(name: str) -> tuple:
    """Lexicographic key that compares digit runs numerically (x2 before x10)."""
    parts = re.split(r"(\d+)", name)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


class Cmp(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class AtomOrder:
    """Total order on atoms: predicate rank, then argument lists compared
    lexicographically, with every constant below every variable.

    ``predicates`` lists predicate names from smallest to largest and must
    contain ``"="``.  ``variables`` optionally fixes an explicit variable
    ranking; unranked variables follow in natural lexicographic order.
    """

    predicates: Tuple[str, ...]
    constants: Tuple[str, ...] = ()
    variables: Tuple[str, ...] = ()

    @classmethod
    def default(cls, signature: Signature) -> "AtomOrder":
        names = [n for n, _ in signature.predicates]
        names.insert(signature.eq_rank, "=")
        return cls(tuple(names), signature.constants)

    def _term_key(self, t: Term) -> tuple:
        if isinstance(t, Const):
            try:
                return (0, self.constants.index(t.name))
            except ValueError:
                raise GfoddError(f"unknown constant {t.name!r}") from None
        if t.name in self.variables:
            return (1, 0, self.variables.index(t.name))
        return (1, 1, natural_key(t.name))

    def key(self, atom: Atom) -> tuple:
        name = "=" if isinstance(atom, Eq) else atom.name
        try:
            rank = self.predicates.index(name)
        except ValueError:
            raise GfoddError(f"unknown predicate {name!r}") from None
        return (rank, tuple(self._term_key(t) for t in atom.args))


def atom_compare(a: Atom, b: Atom, order: AtomOrder) -> Cmp:
    ka, kb = order.key(a), order.key(b)
    if ka < kb:
        return Cmp.LESS
    if ka > kb:
        return Cmp.GREATER
    return Cmp.EQUAL


def check_ordering(d: Diagram, order: AtomOrder) -> List[Tuple[int, bool, int]]:
    """Edges (parent, branch, child) whose internal child is not strictly above its parent."""
    out = []
    for k, branch, c in d.edges():
        child = d.nodes[c]
        if isinstance(child, Node):
            if atom_compare(d.nodes[k].label, child.label, order) is not Cmp.LESS:
                out.append((k, branch, c))
    return out


def is_sorted(g: Union[GFODD, Diagram], order: Optional[AtomOrder] = None) -> bool:
    if isinstance(g, GFODD):
        order = order or AtomOrder.default(g.signature)
        g = g.diagram
    return not check_ordering(g, order)


# ---------------------------------------------------------------------------
# Validation


def _atom_violations(atom: Atom, sig: Signature) -> List[str]:
    out = []
    for t in atom.args:
        if isinstance(t, Const) and t.name not in sig.constants:
            out.append(f"unknown constant {t.name} in {atom}")
    if isinstance(atom, Pred):
        if not sig.has_predicate(atom.name):
            out.append(f"unknown predicate {atom.name}")
        elif len(atom.args) != sig.arity(atom.name):
            out.append(f"arity mismatch in {atom}: expected {sig.arity(atom.name)}")
    return out


def validate_diagram(d: Diagram, sig: Optional[Signature] = None) -> List[str]:
    out = []
    size = len(d.nodes)
    if not 0 <= d.root < size:
        return [f"root {d.root} is not a node"]
    for k, n in enumerate(d.nodes):
        if isinstance(n, Leaf):
            if n.value < 0:
                out.append(f"negative leaf {n.value} at node {k}")
        elif isinstance(n, Node):
            for c in (n.true_child, n.false_child):
                if not 0 <= c < size:
                    out.append(f"dangling edge {k}->{c}")
            if sig is not None:
                out.extend(f"{m} at node {k}" for m in _atom_violations(n.label, sig))
        else:
            out.append(f"malformed entry at node {k}")
    # cycle detection over the reachable part, iterative colouring
    colour = {}
    stack = [(d.root, False)]
    reported = set()
    while stack:
        k, done = stack.pop()
        if done:
            colour[k] = 2
            continue
        if colour.get(k) == 2:
            continue
        colour[k] = 1
        stack.append((k, True))
        n = d.nodes[k]
        if isinstance(n, Node):
            for c in (n.false_child, n.true_child):
                if not 0 <= c < size:
                    continue
                if colour.get(c) == 1:
                    if c not in reported:
                        out.append(f"cycle at node {c}")
                        reported.add(c)
                elif colour.get(c) is None:
                    stack.append((c, False))
    return out


def validate_gfodd(g: GFODD) -> List[str]:
    """Every violated structural invariant; an empty list means valid."""
    out = list(g.signature.violations())
    out.extend(validate_diagram(g.diagram, g.signature))
    listed = g.aggregation.variables
    for v in sorted({v for v in listed if listed.count(v) > 1}):
        out.append(f"duplicate aggregation variable {v}")
    if any(m.startswith(("cycle", "dangling", "root")) for m in out):
        return out
    used = g.diagram.variables()
    for v in used:
        if v not in listed:
            out.append(f"unlisted variable {v}")
    for v in listed:
        if v not in used:
            out.append(f"aggregated variable {v} does not occur in the diagram")
    return out


def ensure_valid(g: GFODD) -> GFODD:
    problems = validate_gfodd(g)
    if problems:
        raise GfoddError("invalid GFODD: " + "; ".join(problems))
    return g


# ---------------------------------------------------------------------------
# Renaming


def rename_variables(g: GFODD, mapping: Mapping[str, str]) -> GFODD:
    return GFODD(g.aggregation.rename(mapping), g.diagram.rename(mapping), g.signature)


def apart_renaming(g1: GFODD, g2: GFODD, suffix: str = "_r") -> Dict[str, str]:
    """Renaming for g2's variables that avoids every variable of g1.

    Only clashing variables are renamed; a clash ``x`` becomes ``x_r`` (then
    ``x_r2``, ``x_r3`` ... if that is taken too).
    """
    taken = set(g1.variables) | set(g1.diagram.variables()) | set(g2.variables) | set(g2.diagram.variables())
    mapping = {}
    for v in g2.variables:
        if v in g1.variables or v in g1.diagram.variables():
            cand, i = v + suffix, 1
            while cand in taken:
                i += 1
                cand = f"{v}{suffix}{i}"
            taken.add(cand)
            mapping[v] = cand
    return mapping


def standardize_apart(g1: GFODD, g2: GFODD) -> Tuple[GFODD, GFODD]:
    """Copies of g1 and g2 with disjoint variables; g1 is never renamed."""
    mapping = apart_renaming(g1, g2)
    if not mapping:
        return g1, g2
    return g1, rename_variables(g2, mapping)


# ---------------------------------------------------------------------------
# Interpretations


Extension = FrozenSet[Tuple[int, ...]]


@dataclass(frozen=True)
class Interpretation:
    domain_size: int
    constant_map: Mapping[str, int] = field(default_factory=dict)
    extensions: Mapping[str, Extension] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constant_map", dict(self.constant_map))
        object.__setattr__(self, "extensions",
                           {p: frozenset(tuple(t) for t in ts) for p, ts in self.extensions.items()})

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        strip = lambda e: {p: ts for p, ts in e.items() if ts}
        return (self.domain_size == other.domain_size and self.constant_map == other.constant_map
                and strip(self.extensions) == strip(other.extensions))

    def __hash__(self):
        return hash((self.domain_size, tuple(sorted(self.constant_map.items())),
                     tuple(sorted((p, tuple(sorted(ts))) for p, ts in self.extensions.items() if ts))))

    def holds(self, pred: str, args: Tuple[int, ...]) -> bool:
        return tuple(args) in self.extensions.get(pred, frozenset())

    def violations(self, sig: Signature) -> List[str]:
        out = []
        if self.domain_size < 1:
            out.append("domain must contain at least one object")
        for c in sig.constants:
            if c not in self.constant_map:
                out.append(f"constant {c} is not interpreted")
        for c, o in self.constant_map.items():
            if c not in sig.constants:
                out.append(f"unknown constant {c}")
            elif not 0 <= o < self.domain_size:
                out.append(f"constant {c} mapped to out-of-range object {o}")
        for p, ts in self.extensions.items():
            if not sig.has_predicate(p):
                out.append(f"unknown predicate {p}")
                continue
            a = sig.arity(p)
            for t in ts:
                if len(t) != a:
                    out.append(f"tuple {t} for {p} has wrong arity (expected {a})")
                elif any(not 0 <= o < self.domain_size for o in t):
                    out.append(f"tuple {t} for {p} mentions an out-of-range object")
        return out

    def restrict(self, objects: Sequence[int]) -> Tuple["Interpretation", Dict[int, int]]:
        """Induced sub-interpretation on ``objects`` (renumbered in the given order).

        Constants must map into ``objects``.
        """
        remap = {o: i for i, o in enumerate(objects)}
        cmap = {c: remap[o] for c, o in self.constant_map.items()}
        ext = {p: {tuple(remap[o] for o in t) for t in ts if all(o in remap for o in t)}
               for p, ts in self.extensions.items()}
        return Interpretation(len(objects), cmap, ext), remap


def ensure_interpretation(i: Interpretation, sig: Signature) -> Interpretation:
    problems = i.violations(sig)
    if problems:
        raise GfoddError("invalid interpretation: " + "; ".join(problems))
    return i


Valuation = Dict[str, int]
