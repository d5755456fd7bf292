"""Command-line interface.

Exit codes: 0 yes/success, 1 no, 2 error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from typing import List, Optional

from .combine import BinaryOp, InterleavePolicy, apply, complement
from .core import AtomOrder, GfoddError, check_ordering
from .decide import (Answer, DecisionOutcome, SearchBudget, edge_removal_check, gfodd_equiv, gfodd_sat,
                     gfodd_value, search_space_size)
from .evaluate import EvalConfig, eval_map
from .formats import (export_dot, parse_dimacs_cnf, parse_gfodd, parse_interp, parse_qdimacs, render_gfodd,
                      render_interp)
from .reductions import (UGraph, gen_3sat, gen_arrowing, gen_hampath, gen_qbf_equiv_simple, gen_qbf_eval,
                         gen_qbf_sat, gen_value_instance)

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def parse_graph(spec: str) -> UGraph:
    """``"3:0-1,1-2"`` -> 3 nodes with edges 01 and 12."""
    m = re.fullmatch(r"\s*(\d+)\s*:\s*((?:\d+-\d+)(?:\s*,\s*\d+-\d+)*)?\s*", spec)
    if not m:
        raise GfoddError(f"malformed graph {spec!r}; expected N:a-b,c-d")
    edges = []
    if m.group(2):
        for item in m.group(2).split(","):
            a, b = item.strip().split("-")
            edges.append((int(a), int(b)))
    return UGraph(int(m.group(1)), frozenset(edges))


def _cfg(args) -> EvalConfig:
    jobs = getattr(args, "jobs", 1) or 1
    return EvalConfig(parallel_outer=jobs > 1, jobs=jobs)


def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_objects, args.max_interpretations, args.time_limit, args.jobs)


def _announce(sig, budget: SearchBudget):
    print(f"search space: {search_space_size(sig, budget.max_objects)} interpretations "
          f"with 1..{budget.max_objects} objects", flush=True)


def _report(outcome: DecisionOutcome) -> int:
    print(f"answer: {outcome.answer.value}")
    print(f"examined: {outcome.examined}")
    if outcome.witness is not None:
        print(f"witness (MAP = {outcome.value}):")
        sys.stdout.write(render_interp(outcome.witness))
    if outcome.counterexample is not None:
        cx = outcome.counterexample
        print(f"counterexample (MAP1 = {cx.value1}, MAP2 = {cx.value2}):")
        sys.stdout.write(render_interp(cx.interpretation))
    return {Answer.YES: EXIT_YES, Answer.NO: EXIT_NO, Answer.BUDGET_EXHAUSTED: EXIT_BUDGET}[outcome.answer]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    g = parse_gfodd(_read(args.gfodd))
    bad = check_ordering(g.diagram, AtomOrder.default(g.signature))
    print(f"valid: {len(g.diagram.reachable())} reachable nodes, aggregation depth {g.aggregation.depth()}")
    if bad:
        print(f"unsorted: {len(bad)} edge(s) violate the default order")
        for parent, branch, child in bad:
            print(f"  {parent} -{'T' if branch else 'F'}-> {child}")
    else:
        print("sorted under the default order")
    return EXIT_YES


def cmd_eval(args) -> int:
    g = parse_gfodd(_read(args.gfodd))
    i = parse_interp(_read(args.interp), g.signature)
    value = eval_map(g, i, _cfg(args))
    print(f"MAP = {value}")
    if args.value is None:
        return EXIT_YES
    ok = value >= Fraction(args.value)
    print(f"answer: {'yes' if ok else 'no'}")
    return EXIT_YES if ok else EXIT_NO


def cmd_sat(args) -> int:
    g = parse_gfodd(_read(args.gfodd))
    budget = _budget(args)
    _announce(g.signature, budget)
    return _report(gfodd_sat(g, budget))


def cmd_value(args) -> int:
    g = parse_gfodd(_read(args.gfodd))
    budget = _budget(args)
    _announce(g.signature, budget)
    return _report(gfodd_value(g, budget, Fraction(args.target)))


def cmd_equiv(args) -> int:
    g1, g2 = parse_gfodd(_read(args.gfodd1)), parse_gfodd(_read(args.gfodd2))
    budget = _budget(args)
    _announce(g1.signature, budget)
    return _report(gfodd_equiv(g1, g2, budget))


def cmd_edge_removal(args) -> int:
    g1, g2 = parse_gfodd(_read(args.gfodd1)), parse_gfodd(_read(args.gfodd2))
    budget = _budget(args)
    _announce(g1.signature, budget)
    return _report(edge_removal_check(g1, g2, budget))


def cmd_apply(args) -> int:
    g1, g2 = parse_gfodd(_read(args.gfodd1)), parse_gfodd(_read(args.gfodd2))
    policy = InterleavePolicy(args.policy.replace("-", "_"))
    _write(args.output, render_gfodd(apply(g1, g2, BinaryOp(args.op), policy, check_sorted=not args.allow_unsorted)))
    return EXIT_YES


def cmd_complement(args) -> int:
    g = parse_gfodd(_read(args.gfodd))
    m = Fraction(args.max) if args.max is not None else g.max_leaf()
    _write(args.output, render_gfodd(complement(g, m)))
    return EXIT_YES


def cmd_export_dot(args) -> int:
    _write(args.output, export_dot(parse_gfodd(_read(args.gfodd))))
    return EXIT_YES


def cmd_gen(args) -> int:
    kind = args.kind
    rest = args.inputs
    need = {"hampath": 1, "3sat": 1, "qbf-eval": 1, "qbf-sat": 1, "qbf-equiv": 1, "arrowing": 3,
            "value-instance": 2}[kind]
    if len(rest) != need:
        raise GfoddError(f"gen {kind} takes {need} argument(s)")
    if kind == "hampath":
        _write(args.output, render_gfodd(gen_hampath(int(rest[0]))))
    elif kind == "3sat":
        _write(args.output, render_gfodd(gen_3sat(parse_dimacs_cnf(_read(rest[0])))))
    elif kind == "qbf-eval":
        g, i = gen_qbf_eval(parse_qdimacs(_read(rest[0])))
        _write(args.output, render_gfodd(g))
        if args.interp_out:
            _write(args.interp_out, render_interp(i))
    elif kind == "qbf-sat":
        _write(args.output, render_gfodd(gen_qbf_sat(parse_qdimacs(_read(rest[0])))))
    elif kind == "value-instance":
        g, target = gen_value_instance(parse_gfodd(_read(rest[0])), parse_gfodd(_read(rest[1])))
        _write(args.output, f"# target value {target}\n" + render_gfodd(g))
    else:
        if not (args.out1 and args.out2):
            raise GfoddError(f"gen {kind} writes two diagrams; give --out1 and --out2")
        if kind == "qbf-equiv":
            b1, b, n = gen_qbf_equiv_simple(parse_qdimacs(_read(rest[0])))
            print(f"recommended max objects: {n}")
        else:
            b1, b = gen_arrowing(*map(parse_graph, rest))
        _write(args.out1, render_gfodd(b1))
        _write(args.out2, render_gfodd(b))
    return EXIT_YES


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gfodd", description="Generalized first-order decision diagram toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def search_opts(sp):
        sp.add_argument("--max-objects", "-N", type=int, required=True)
        sp.add_argument("--max-interpretations", type=int)
        sp.add_argument("--time-limit", type=float, help="seconds")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("check", help="validate a diagram and report ordering")
    sp.add_argument("gfodd")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("eval", help="MAP on one interpretation")
    sp.add_argument("gfodd")
    sp.add_argument("interp")
    sp.add_argument("--value", help="answer whether MAP >= VALUE")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("sat", help="bounded satisfiability")
    sp.add_argument("gfodd")
    search_opts(sp)
    sp.set_defaults(fn=cmd_sat)

    sp = sub.add_parser("value", help="bounded exact-value search")
    sp.add_argument("gfodd")
    sp.add_argument("--target", required=True)
    search_opts(sp)
    sp.set_defaults(fn=cmd_value)

    for name, fn in (("equiv", cmd_equiv), ("edge-removal", cmd_edge_removal)):
        sp = sub.add_parser(name, help=f"bounded {name.replace('-', ' ')} check")
        sp.add_argument("gfodd1")
        sp.add_argument("gfodd2")
        search_opts(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("apply", help="combine two diagrams")
    sp.add_argument("gfodd1")
    sp.add_argument("gfodd2")
    sp.add_argument("--op", choices=[o.value for o in BinaryOp], default="plus")
    sp.add_argument("--policy", choices=["concat", "block-merge"], default="concat")
    sp.add_argument("--allow-unsorted", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_apply)

    sp = sub.add_parser("complement", help="leaves v -> M - v, min and max swapped")
    sp.add_argument("gfodd")
    sp.add_argument("--max", help="M (default: largest leaf)")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_complement)

    sp = sub.add_parser("gen", help="reduction generators")
    sp.add_argument("kind", choices=["hampath", "3sat", "qbf-eval", "qbf-sat", "qbf-equiv", "arrowing",
                                     "value-instance"])
    sp.add_argument("inputs", nargs="*", help="n | CNF file | QDIMACS file | F G H graphs | two diagrams")
    sp.add_argument("-o", "--output")
    sp.add_argument("--interp-out", help="qbf-eval: where to write the fixed interpretation")
    sp.add_argument("--out1")
    sp.add_argument("--out2")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("export-dot", help="Graphviz rendering")
    sp.add_argument("gfodd")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_export_dot)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (GfoddError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
