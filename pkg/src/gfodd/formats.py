"""Text formats: GFODD files, interpretation files, DIMACS/QDIMACS and DOT export.

GFODD file::

    pred E/2
    const c1
    eqrank 1            # optional: position of equality among the predicates
    agg max x1, min x2
    node 3 = E(x1,c1) ? 5 : 7
    leaf 5 = 3/2
    root 3

Interpretation file::

    domain 3
    const c1 = 0
    E: (0,2) (2,0)
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .core import (EQ, GFODD, AggregationList, Const, Diagram, Eq, GfoddError, Interpretation, Leaf, Node,
                   Pred, Signature, Var, validate_gfodd)
from .reductions import Cnf, Qbf, Quant

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RATIONAL = r"-?\d+(?:/\d+)?"

_PRED = re.compile(rf"pred\s+({IDENT})\s*/\s*(\d+)$")
_CONST = re.compile(rf"const\s+({IDENT})$")
_EQRANK = re.compile(r"eqrank\s+(\d+)$")
_AGG = re.compile(r"agg(?:\s+(.*))?$")
_NODE = re.compile(r"node\s+(\d+)\s*=\s*(.+?)\s*\?\s*(\d+)\s*:\s*(\d+)$")
_LEAF = re.compile(rf"leaf\s+(\d+)\s*=\s*({_RATIONAL})$")
_ROOT = re.compile(r"root\s+(\d+)$")
_ATOM = re.compile(rf"({IDENT})\s*(?:\((.*)\))?$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _err(lineno: int, msg: str) -> GfoddError:
    return GfoddError(f"line {lineno}: {msg}")


def _parse_atom(text: str, constants, lineno: int) -> Union[Eq, Pred]:
    m = _ATOM.match(text)
    if not m:
        raise _err(lineno, f"malformed atom {text!r}")
    name, inner = m.group(1), m.group(2)
    args = [a.strip() for a in inner.split(",")] if inner and inner.strip() else []
    for a in args:
        if not re.fullmatch(IDENT, a):
            raise _err(lineno, f"malformed term {a!r}")
    terms = tuple(Const(a) if a in constants else Var(a) for a in args)
    if name == EQ:
        if len(terms) != 2:
            raise _err(lineno, "eq takes exactly two arguments")
        return Eq(*terms)
    return Pred(name, terms)


def parse_gfodd(text: str) -> GFODD:
    preds: List[Tuple[str, int]] = []
    consts: List[str] = []
    eq_rank = 0
    agg: Optional[AggregationList] = None
    raw: Dict[int, Tuple[int, object]] = {}
    root = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = _strip(line)
        if not line:
            continue
        if m := _PRED.match(line):
            preds.append((m.group(1), int(m.group(2))))
        elif m := _CONST.match(line):
            consts.append(m.group(1))
        elif m := _EQRANK.match(line):
            eq_rank = int(m.group(1))
        elif m := _AGG.match(line):
            if agg is not None:
                raise _err(lineno, "second agg line")
            entries = []
            body = (m.group(1) or "").strip()
            for item in filter(None, (s.strip() for s in body.split(","))):
                parts = item.split()
                if len(parts) != 2 or parts[0] not in ("max", "min") or not re.fullmatch(IDENT, parts[1]):
                    raise _err(lineno, f"malformed aggregation entry {item!r}")
                entries.append((parts[1], parts[0]))
            agg = AggregationList(tuple(entries))
        elif m := _NODE.match(line):
            k = int(m.group(1))
            if k in raw:
                raise _err(lineno, f"node id {k} defined twice")
            raw[k] = (lineno, ("node", m.group(2), int(m.group(3)), int(m.group(4))))
        elif m := _LEAF.match(line):
            k = int(m.group(1))
            if k in raw:
                raise _err(lineno, f"node id {k} defined twice")
            raw[k] = (lineno, ("leaf", Fraction(m.group(2))))
        elif m := _ROOT.match(line):
            if root is not None:
                raise _err(lineno, "second root line")
            root = int(m.group(1))
        else:
            raise _err(lineno, f"unrecognised line {line!r}")
    if root is None:
        raise GfoddError("missing root line")
    if not raw:
        raise GfoddError("no nodes")
    ids = sorted(raw)
    pos = {k: i for i, k in enumerate(ids)}
    nodes = []
    for k in ids:
        lineno, item = raw[k]
        if item[0] == "leaf":
            nodes.append(Leaf(item[1]))
        else:
            _, atom, t, f = item
            for c in (t, f):
                if c not in pos:
                    raise _err(lineno, f"dangling edge {k}->{c}")
            nodes.append(Node(_parse_atom(atom, consts, lineno), pos[t], pos[f]))
    if root not in pos:
        raise GfoddError(f"root {root} is not a node")
    g = GFODD(agg or AggregationList(), Diagram(tuple(nodes), pos[root]),
              Signature(tuple(preds), tuple(consts), eq_rank))
    problems = validate_gfodd(g)
    if problems:
        raise GfoddError("invalid GFODD: " + "; ".join(problems))
    return g


def render_gfodd(g: GFODD) -> str:
    lines = [f"pred {n}/{a}" for n, a in g.signature.predicates]
    lines += [f"const {c}" for c in g.signature.constants]
    if g.signature.eq_rank:
        lines.append(f"eqrank {g.signature.eq_rank}")
    lines.append(f"agg {g.aggregation}".rstrip())
    for k, n in enumerate(g.diagram.nodes):
        if isinstance(n, Leaf):
            lines.append(f"leaf {k} = {n.value}")
        else:
            lines.append(f"node {k} = {n.label} ? {n.true_child} : {n.false_child}")
    lines.append(f"root {g.diagram.root}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Interpretations

_DOMAIN = re.compile(r"domain\s+(\d+)$")
_ICONST = re.compile(rf"const\s+({IDENT})\s*=\s*(\d+)$")
_EXT = re.compile(rf"({IDENT})\s*:(.*)$")
_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_interp(text: str, signature: Optional[Signature] = None) -> Interpretation:
    domain = None
    cmap: Dict[str, int] = {}
    ext: Dict[str, set] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = _strip(line)
        if not line:
            continue
        if m := _DOMAIN.match(line):
            domain = int(m.group(1))
            if domain < 1:
                raise _err(lineno, "domain must contain at least one object")
        elif m := _ICONST.match(line):
            cmap[m.group(1)] = int(m.group(2))
        elif m := _EXT.match(line):
            name, body = m.group(1), m.group(2)
            if name in ext:
                raise _err(lineno, f"predicate {name} listed twice")
            leftover = _TUPLE.sub("", body).strip()
            if leftover:
                raise _err(lineno, f"malformed tuple list near {leftover!r}")
            tuples = set()
            for inner in _TUPLE.findall(body):
                parts = [p.strip() for p in inner.split(",")] if inner.strip() else []
                if not all(p.isdigit() for p in parts):
                    raise _err(lineno, f"malformed tuple ({inner})")
                tuples.add(tuple(int(p) for p in parts))
            if len({len(t) for t in tuples}) > 1:
                raise _err(lineno, f"tuples of different arity for {name}")
            if signature is not None:
                if not signature.has_predicate(name):
                    raise _err(lineno, f"unknown predicate {name}")
                bad = [t for t in tuples if len(t) != signature.arity(name)]
                if bad:
                    raise _err(lineno, f"tuple {bad[0]} for {name} has wrong arity")
            ext[name] = tuples
        else:
            raise _err(lineno, f"unrecognised line {line!r}")
    if domain is None:
        raise GfoddError("missing domain line")
    i = Interpretation(domain, cmap, ext)
    problems = i.violations(signature) if signature is not None else _range_problems(i)
    if problems:
        raise GfoddError("invalid interpretation: " + "; ".join(problems))
    return i


def _range_problems(i: Interpretation) -> List[str]:
    out = [f"constant {c} mapped to out-of-range object {o}"
           for c, o in i.constant_map.items() if not 0 <= o < i.domain_size]
    out += [f"tuple {t} for {p} mentions an out-of-range object"
            for p, ts in i.extensions.items() for t in sorted(ts) if any(o >= i.domain_size for o in t)]
    return out


def render_interp(i: Interpretation) -> str:
    lines = [f"domain {i.domain_size}"]
    lines += [f"const {c} = {o}" for c, o in sorted(i.constant_map.items())]
    for p in sorted(i.extensions):
        ts = " ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(i.extensions[p]))
        lines.append(f"{p}: {ts}".rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DIMACS / QDIMACS


def _dimacs_body(text: str, quantified: bool):
    header = None
    prefix: List[Tuple[Quant, int]] = []
    lits: List[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf" or not all(
                    p.isdigit() for p in parts[2:]):
                raise _err(lineno, f"malformed header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise _err(lineno, "clause or quantifier before the header")
        if quantified and line[0] in "ae":
            if lits:
                raise _err(lineno, "quantifier line after clauses")
            try:
                nums = [int(t) for t in line[1:].split()]
            except ValueError:
                raise _err(lineno, f"malformed quantifier line {line!r}") from None
            if not nums or nums[-1] != 0 or any(n <= 0 for n in nums[:-1]):
                raise _err(lineno, f"malformed quantifier line {line!r}")
            q = Quant.EXISTS if line[0] == "e" else Quant.FORALL
            prefix.extend((q, n) for n in nums[:-1])
            continue
        try:
            lits.extend(int(t) for t in line.split())
        except ValueError:
            raise _err(lineno, f"malformed clause line {line!r}") from None
    if header is None:
        raise GfoddError("missing 'p cnf' header")
    clauses = []
    cur: List[int] = []
    for lit in lits:
        if lit == 0:
            if len(cur) != 3:
                raise GfoddError(f"clause {cur} does not have exactly 3 literals")
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise GfoddError("last clause is not terminated by 0")
    if not clauses:
        raise GfoddError("empty clause list")
    if len(clauses) != header[1]:
        raise GfoddError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(clauses)), prefix


def parse_dimacs_cnf(text: str) -> Cnf:
    return _dimacs_body(text, quantified=False)[0]


def parse_qdimacs(text: str) -> Qbf:
    cnf, prefix = _dimacs_body(text, quantified=True)
    return Qbf(tuple(prefix), cnf)


def render_dimacs_cnf(f: Cnf) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def render_qdimacs(q: Qbf) -> str:
    lines = [f"p cnf {q.matrix.num_vars} {len(q.matrix.clauses)}"]
    for quant, xs in q.blocks():
        lines.append(("e " if quant is Quant.EXISTS else "a ") + " ".join(map(str, xs)) + " 0")
    lines += [" ".join(map(str, c)) + " 0" for c in q.matrix.clauses]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: GFODD, name: str = "gfodd") -> str:
    """Reachable part of the diagram; true edges solid, false edges dashed, leaves boxed."""
    d = g.diagram
    out = [f"digraph {name} {{", f"  label={_dot_quote(str(g.aggregation) or 'no aggregation')};",
           "  labelloc=t;"]
    reach = d.reachable()
    for k in reach:
        n = d.nodes[k]
        if isinstance(n, Leaf):
            out.append(f"  n{k} [label={_dot_quote(str(n.value))}, shape=box];")
        else:
            out.append(f"  n{k} [label={_dot_quote(str(n.label))}, shape=ellipse];")
    for k in reach:
        n = d.nodes[k]
        if isinstance(n, Node):
            out.append(f"  n{k} -> n{n.true_child} [style=solid];")
            out.append(f"  n{k} -> n{n.false_child} [style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"
