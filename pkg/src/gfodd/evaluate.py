"""MAP semantics: single-valuation evaluation and nested min/max aggregation.

The first aggregation entry is the outermost quantifier.  Two engines share
one compiled form of the diagram:

* the plain engine enumerates all n**m valuations, optionally stopping a
  max (min) aggregation early once the diagram's largest (smallest) leaf is
  reached;
* the pruned engine (default) partially evaluates the diagram under the
  current partial valuation.  Aggregating over a variable that no longer
  occurs is skipped (min and max are idempotent), a residual whose leaves are
  all equal is returned directly, a suffix of same-operator variables is
  solved by depth-first path search binding variables only when a node needs
  them, and results are memoised on the residual structure.

Both engines compute the same value; the tests compare them.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .core import (AggOp, Eq, GFODD, GfoddError, Interpretation, Leaf, Node, Valuation, Var,
                   ensure_interpretation, ensure_valid)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class EvalConfig:
    short_circuit: bool = True
    parallel_outer: bool = False
    prune: bool = True
    jobs: Optional[int] = None


@dataclass(frozen=True)
class Witness:
    value: Fraction
    valuation: Valuation
    restricted: Optional[Interpretation] = None
    restricted_valuation: Optional[Valuation] = None


_MAX = 0
_MIN = 1


class Evaluator:
    """A GFODD compiled for repeated evaluation on many interpretations."""

    def __init__(self, g: GFODD, cfg: EvalConfig = EvalConfig(), validate: bool = True):
        if validate:
            ensure_valid(g)
        self.g = g
        self.cfg = cfg
        self.vars = g.aggregation.variables
        self.ops = [_MAX if op is AggOp.MAX else _MIN for op in g.aggregation.operators]
        index = {v: i for i, v in enumerate(self.vars)}
        d = g.diagram
        self.root = d.root
        size = len(d.nodes)
        self.is_leaf = [False] * size
        self.value: List[Optional[Fraction]] = [None] * size
        self.pred: List[Optional[str]] = [None] * size
        self.args: List[Tuple] = [()] * size
        self.hi = [0] * size
        self.lo = [0] * size
        for k, n in enumerate(d.nodes):
            if isinstance(n, Leaf):
                self.is_leaf[k] = True
                self.value[k] = n.value
            elif isinstance(n, Node):
                self.pred[k] = None if isinstance(n.label, Eq) else n.label.name
                # variable -> index >= 0 ; constant -> name (resolved per interpretation)
                self.args[k] = tuple(index[t.name] if isinstance(t, Var) else t.name for t in n.label.args)
                self.hi[k] = n.true_child
                self.lo[k] = n.false_child
        self.below = self._below_vars(d)
        leaves = d.leaf_values()
        self.top = leaves[-1]
        self.bottom = leaves[0]

    def _below_vars(self, d) -> List[Tuple[int, ...]]:
        """For each reachable node, the variable indices tested at or below it."""
        out: Dict[int, Tuple[int, ...]] = {}
        state: Dict[int, bool] = {}
        stack = [(d.root, False)]
        while stack:
            k, done = stack.pop()
            if k in out:
                continue
            if self.is_leaf[k]:
                out[k] = ()
                continue
            if done:
                s = set(a for a in self.args[k] if isinstance(a, int))
                s.update(out[self.hi[k]])
                s.update(out[self.lo[k]])
                out[k] = tuple(sorted(s))
                continue
            if state.get(k):
                continue
            state[k] = True
            stack.append((k, True))
            stack.append((self.hi[k], False))
            stack.append((self.lo[k], False))
        return [out.get(k, ()) for k in range(len(d.nodes))]

    # -- per-interpretation state -------------------------------------------

    def _prepare(self, i: Interpretation):
        ensure_interpretation(i, self.g.signature)
        if i.domain_size < 1:
            raise GfoddError("cannot aggregate over an empty domain")
        self.n = i.domain_size
        # constants encoded as negative ints: object o -> -(o+1)
        cmap = i.constant_map
        self.gargs = [tuple(a if isinstance(a, int) else -(cmap[a] + 1) for a in args) for args in self.args]
        self.ext = {p: i.extensions.get(p, frozenset()) for p, _ in self.g.signature.predicates}

    def _truth(self, k: int, binding: List[Optional[int]]) -> Optional[bool]:
        objs = []
        for a in self.gargs[k]:
            if a >= 0:
                o = binding[a]
                if o is None:
                    return None
            else:
                o = -a - 1
            objs.append(o)
        p = self.pred[k]
        if p is None:
            return objs[0] == objs[1]
        return tuple(objs) in self.ext[p]

    def _walk(self, binding) -> Fraction:
        k = self.root
        while not self.is_leaf[k]:
            t = self._truth(k, binding)
            if t is None:
                raise GfoddError("valuation does not bind every variable on the path")
            k = self.hi[k] if t else self.lo[k]
        return self.value[k]

    # -- public entry points --------------------------------------------------

    def valuation_value(self, i: Interpretation, z: Mapping[str, int]) -> Fraction:
        self._prepare(i)
        missing = [v for v in self.vars if v not in z]
        if missing:
            raise GfoddError(f"valuation is missing variables {missing}")
        for v in self.vars:
            if not 0 <= z[v] < i.domain_size:
                raise GfoddError(f"valuation maps {v} to out-of-range object {z[v]}")
        return self._walk([z[v] for v in self.vars])

    def map(self, i: Interpretation, prefix: Optional[Mapping[str, int]] = None) -> Fraction:
        """MAP_B(I); ``prefix`` pre-binds some variables (must be a prefix of the list)."""
        self._prepare(i)
        binding: List[Optional[int]] = [None] * len(self.vars)
        start = 0
        if prefix:
            for j, v in enumerate(self.vars):
                if v not in prefix:
                    break
                binding[j] = prefix[v]
                start = j + 1
            if start != len(prefix):
                raise GfoddError("pre-bound variables must form a prefix of the aggregation list")
        if self.cfg.prune:
            self._memo: Dict = {}
            self._paths: Dict = {}
            return self._pruned(start, binding)
        return self._plain(start, binding)

    # -- plain enumeration ----------------------------------------------------

    def _plain(self, j: int, binding) -> Fraction:
        if j == len(self.vars):
            return self._walk(binding)
        is_max = self.ops[j] == _MAX
        stop = self.top if is_max else self.bottom
        best = None
        for o in range(self.n):
            binding[j] = o
            v = self._plain(j + 1, binding)
            if best is None or (v > best if is_max else v < best):
                best = v
            if self.cfg.short_circuit and best == stop:
                break
        binding[j] = None
        return best

    # -- pruned engine --------------------------------------------------------

    def _residual(self, binding):
        """Partially evaluate the diagram.

        Returns (key, unbound variable indices, leaf values).  ``key`` is
        hashable and determines the value of any further aggregation.
        """
        entries = []
        index: Dict[int, int] = {}
        unbound = set()
        leaves = set()
        is_leaf, hi, lo, gargs = self.is_leaf, self.hi, self.lo, self.gargs

        def resolve(k):
            while not is_leaf[k]:
                t = self._truth(k, binding)
                if t is None:
                    break
                k = hi[k] if t else lo[k]
            if is_leaf[k]:
                leaves.add(self.value[k])
                return ("L", self.value[k])
            if k in index:
                return index[k]
            tref = resolve(hi[k])
            fref = resolve(lo[k])
            bound = []
            for a in gargs[k]:
                if a >= 0:
                    o = binding[a]
                    if o is None:
                        unbound.add(a)
                    bound.append(o)
            index[k] = len(entries)
            entries.append((k, tuple(bound), tref, fref))
            return index[k]

        root = resolve(self.root)
        return (root, tuple(entries)), unbound, leaves

    def _pruned(self, j: int, binding) -> Fraction:
        key, unbound, leaves = self._residual(binding)
        if len(leaves) == 1:
            return next(iter(leaves))
        j = min(unbound)
        memo_key = (j, key)
        if memo_key in self._memo:
            return self._memo[memo_key]
        top, bottom = max(leaves), min(leaves)
        ops = {self.ops[a] for a in unbound}
        if len(ops) == 1:
            is_max = ops.pop() == _MAX
            result = self._path_search(self.root, binding, is_max, top if is_max else bottom)
        else:
            is_max = self.ops[j] == _MAX
            stop = top if is_max else bottom
            result = None
            for o in range(self.n):
                binding[j] = o
                v = self._pruned(j + 1, binding)
                if result is None or (v > result if is_max else v < result):
                    result = v
                if self.cfg.short_circuit and result == stop:
                    break
            binding[j] = None
        self._memo[memo_key] = result
        return result

    def _path_search(self, k: int, binding, is_max: bool, stop: Fraction) -> Fraction:
        # the value below k depends only on the bindings of variables tested below k
        key = (is_max, k, tuple(binding[a] for a in self.below[k]))
        hit = self._paths.get(key)
        if hit is not None:
            return hit
        while not self.is_leaf[k]:
            t = self._truth(k, binding)
            if t is None:
                a = next(a for a in self.gargs[k] if a >= 0 and binding[a] is None)
                best = None
                for o in range(self.n):
                    binding[a] = o
                    v = self._path_search(k, binding, is_max, stop)
                    if best is None or (v > best if is_max else v < best):
                        best = v
                    if best == stop:
                        break
                binding[a] = None
                self._paths[key] = best
                return best
            k = self.hi[k] if t else self.lo[k]
        self._paths[key] = self.value[k]
        return self.value[k]


# ---------------------------------------------------------------------------


def eval_valuation(g: GFODD, i: Interpretation, z: Mapping[str, int]) -> Fraction:
    """Value of the leaf reached by valuation ``z`` (MAP_B(I, z))."""
    return Evaluator(g).valuation_value(i, z)


def _branch_value(g: GFODD, i: Interpretation, cfg: EvalConfig, var: str, obj: int) -> Fraction:
    return Evaluator(g, cfg, validate=False).map(i, {var: obj})


def eval_map(g: GFODD, i: Interpretation, cfg: EvalConfig = EvalConfig()) -> Fraction:
    """MAP_B(I): nested aggregation with the first listed variable outermost."""
    ev = Evaluator(g, cfg)
    if not (cfg.parallel_outer and len(ev.vars) > 0 and i.domain_size > 1):
        return ev.map(i)
    ensure_interpretation(i, g.signature)
    var = ev.vars[0]
    inner = replace(cfg, parallel_outer=False)
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        values = list(pool.map(_branch_value, *zip(*[(g, i, inner, var, o) for o in range(i.domain_size)])))
    return max(values) if ev.ops[0] == _MAX else min(values)


def model_evaluation(g: GFODD, i: Interpretation, v, cfg: EvalConfig = EvalConfig()) -> bool:
    """Yes iff MAP_B(I) >= v."""
    v = Fraction(v)
    if v < 0:
        raise GfoddError("threshold must be non-negative")
    return eval_map(g, i, cfg) >= v


def map_by_sweep(g: GFODD, i: Interpretation, cfg: EvalConfig = EvalConfig()) -> Fraction:
    """MAP recovered from threshold queries, one per distinct leaf value."""
    best = None
    for v in g.diagram.leaf_values():
        if model_evaluation(g, i, v, cfg):
            best = v
    return best


def extract_small_witness(f: GFODD, i: Interpretation, cfg: EvalConfig = EvalConfig()) -> Witness:
    """Maximising valuation plus the sub-interpretation on the objects its path uses.

    The valuation is the lexicographically first one (in aggregation-list
    order) reaching MAP.  The restricted interpretation keeps the objects
    bound to variables tested along the path and every constant's object,
    with all atoms inherited from ``i``.
    """
    if not f.is_fodd():
        raise GfoddError("small-witness extraction needs a FODD (all max aggregation)")
    ev = Evaluator(f, replace(cfg, parallel_outer=False))
    target = ev.map(i)
    chosen: Dict[str, int] = {}
    for v in ev.vars:
        for o in range(i.domain_size):
            trial = dict(chosen)
            trial[v] = o
            if ev.map(i, trial) == target:
                chosen = trial
                break
        else:  # pragma: no cover - the maximum is always attained
            raise AssertionError("no maximising extension found")
    value = ev.valuation_value(i, chosen)
    d = f.diagram
    used = set(i.constant_map.values())
    k = d.root
    binding = [chosen[v] for v in ev.vars]
    while not ev.is_leaf[k]:
        for t in d.nodes[k].label.args:
            if isinstance(t, Var):
                used.add(chosen[t.name])
        k = ev.hi[k] if ev._truth(k, binding) else ev.lo[k]
    if not used:
        used = {0}
    objects = sorted(used)
    restricted, remap = i.restrict(objects)
    default = objects[0]
    rval = {v: remap.get(o, remap[default]) for v, o in chosen.items()}
    return Witness(value, chosen, restricted, rval)
