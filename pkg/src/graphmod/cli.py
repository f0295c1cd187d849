"""Command-line interface.

Exit codes: 0 success or true, 1 false or no match, 2 unknown or bound
exceeded, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .canonical import canonicalize
from .encodings import (
    EncodingError,
    SHAPES,
    hom_encoding,
    invariant_formula,
    normal_form_formula,
    shape_formula,
    translate_rule,
)
from .fparse import parse_formula
from .hybrid import hybrid_translate, parse_hybrid
from .reduction import ReductionError, eliminate_updates, simplify
from .rewriting import (
    BoundExceeded,
    RewriteRule,
    RuleError,
    find_homomorphisms,
    load_rules,
    normalize,
    rewrite_step,
)
from .semantics import Budget, Verdict, model_check
from .syntax import show
from .tableau import ResourceError, TableauError, countermodel
from .termgraph import GraphError, Termgraph, apply_actions, validate_strict
from .tgparse import ParseError, parse_action_list, parse_termgraph, print_term, print_termgraph

EXIT = {Verdict.TRUE: 0, Verdict.FALSE: 1, Verdict.UNKNOWN: 2}
USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


# -- input -----------------------------------------------------------------


def read_source(spec: str, suffix: str) -> str:
    """Text of a file path, of a bundled data file (``arith`` or
    ``arith.rules``), or ``spec`` itself taken as inline text."""
    path = Path(spec)
    if path.is_file():
        return path.read_text()
    data = resources.files("graphmod").joinpath("data")
    for name in (spec, spec + suffix):
        if "/" not in name and data.joinpath(name).is_file():
            return data.joinpath(name).read_text()
    if spec.endswith(suffix):
        raise UsageError(f"no such file: {spec}")
    return spec


def load_graph(spec: str) -> Termgraph:
    return parse_termgraph(read_source(spec, ".tg"))


def load_formula(spec: str):
    return parse_formula(read_source(spec, ".mlf"))


def load_system(spec: str) -> list[RewriteRule]:
    return load_rules(read_source(spec, ".rules"))


def pick_rule(rules: list[RewriteRule], index: int | None) -> RewriteRule:
    if index is None:
        index = 1
    if not 1 <= index <= len(rules):
        raise UsageError(f"rule index {index} out of range 1..{len(rules)}")
    return rules[index - 1]


# -- output ----------------------------------------------------------------


def graph_text(g: Termgraph) -> str:
    term = print_term(g)
    if term is not None:
        return term
    if validate_strict(g):
        return json.dumps(g.to_dict())
    return print_termgraph(g)


class Report:
    def __init__(self, command: str):
        self.command = command
        self.verdict: str | None = None
        self.graph: Termgraph | None = None
        self.trace: list[dict] | None = None
        self.stats = {"statesExplored": 0, "freshNodes": 0, "steps": 0}
        self.extra: dict = {}
        self.lines: list[str] = []

    def to_json(self) -> dict:
        out: dict = {"command": self.command}
        if self.verdict is not None:
            out["verdict"] = self.verdict
        if self.graph is not None:
            out["graph"] = self.graph.to_dict()
        if self.trace is not None:
            out["trace"] = self.trace
        out.update(self.extra)
        out["stats"] = self.stats
        return out


def report_json(report: Report) -> str:
    return json.dumps(report.to_json(), indent=2)


# -- commands --------------------------------------------------------------


def _variant(args) -> str:
    if args.variant:
        return args.variant
    return "faithful" if args.faithful_anchor else "noninjective"


def cmd_tg(args, rep: Report) -> int:
    op = args.op
    if op in ("parse", "print", "validate"):
        g = load_graph(args.graph)
        if op == "validate":
            problems = validate_strict(g)
            rep.extra["violations"] = problems
            rep.lines += problems or ["ok"]
            rep.verdict = "true" if not problems else "false"
            return 0 if not problems else 1
        rep.graph = g
        if op == "parse":
            rep.extra["canonicalKey"] = canonicalize(g)
            rep.lines.append(canonicalize(g))
        else:
            rep.lines.append(print_termgraph(g))
        return 0
    if op == "apply":
        if not args.actions:
            raise UsageError("tg apply needs --actions")
        g = load_graph(args.graph)
        g = apply_actions(g, parse_action_list(read_source(args.actions, ".act")), literal_root=args.literal_root)
        rep.graph = g
        rep.lines.append(graph_text(g))
        return 0
    if op == "hom":
        if not args.pattern:
            raise UsageError("tg hom needs --pattern")
        pattern, target = load_graph(args.pattern), load_graph(args.graph)
        homs = find_homomorphisms(pattern, target, mode=args.mode, anchor=args.anchor)
        maps = [dict(sorted(h.node_map.items())) for h in homs]
        rep.extra["homomorphisms"] = maps
        rep.lines += [", ".join(f"{k}->{v}" for k, v in m.items()) for m in maps] or ["no homomorphism"]
        rep.verdict = "true" if homs else "false"
        return 0 if homs else 1
    if not args.system:
        raise UsageError(f"tg {op} needs --system")
    rules = load_system(args.system)
    g = load_graph(args.graph)
    if op == "rewrite":
        candidates = [pick_rule(rules, args.rule)] if args.rule else rules
        for rule in candidates:
            if find_homomorphisms(rule.lhs, g):
                out = rewrite_step(g, rule, args.match, literal_root=args.literal_root)
                rep.graph = out
                rep.trace = [{"action": rule.name, "canonicalKey": canonicalize(out)}]
                rep.stats["steps"] = 1
                rep.lines.append(graph_text(out))
                return 0
        rep.lines.append("no match")
        rep.verdict = "false"
        return 1
    trace: list[dict] = []
    result = normalize(
        g, rules, args.strategy, args.max_steps, seed=args.seed, literal_root=args.literal_root,
        on_step=lambda name, h: trace.append({"action": name, "canonicalKey": canonicalize(h)}),
    )
    rep.graph = result.graph
    rep.trace = trace
    rep.stats["steps"] = result.steps
    rep.lines.append(graph_text(result.graph))
    if isinstance(result, BoundExceeded):
        rep.verdict = "unknown"
        rep.lines.append(f"bound of {args.max_steps} steps exceeded")
        return 2
    return 0


def cmd_mc(args, rep: Report) -> int:
    g = load_graph(args.graph)
    f = load_formula(args.formula)
    res = model_check(g, f, Budget(args.max_states, args.max_fresh))
    rep.verdict = res.verdict.value
    rep.stats["statesExplored"] = res.stats.states_explored
    rep.stats["freshNodes"] = res.stats.fresh_nodes
    rep.lines.append(res.verdict.value)
    if args.trace:
        steps = res.witness or ()
        rep.trace = [{"action": a, "canonicalKey": k} for a, k in steps]
        rep.lines += [f"  {a}  {k}" for a, k in steps]
    return EXIT[res.verdict]


def cmd_logic(args, rep: Report) -> int:
    f = load_formula(args.formula)
    if args.op == "simplify":
        rep.extra["formula"] = show(simplify(f))
        rep.lines.append(rep.extra["formula"])
        return 0
    if args.op == "eliminate":
        rep.extra["formula"] = show(eliminate_updates(f))
        rep.lines.append(rep.extra["formula"])
        return 0
    try:
        model = countermodel(f)
    except ResourceError as e:
        rep.verdict = "unknown"
        rep.lines.append(str(e))
        return 2
    if model is None:
        rep.verdict = "true"
        rep.lines.append("valid")
        return 0
    rep.verdict = "false"
    rep.graph = model
    rep.lines += ["not valid; countermodel:", graph_text(model)]
    return 1


def cmd_encode(args, rep: Report) -> int:
    variant = _variant(args)
    if args.op == "shape":
        if not args.name:
            raise UsageError(f"encode shape needs --name (one of {', '.join(SHAPES)})")
        out = shape_formula(args.name, args.a, args.b)
    elif args.op == "hom":
        action, check = hom_encoding(load_graph(args.graph), variant)
        rep.extra["action"] = show(action)
        rep.extra["formula"] = show(check)
        rep.lines += [show(action), show(check)]
        return 0
    else:
        if not args.system:
            raise UsageError(f"encode {args.op} needs --system")
        rules = load_system(args.system)
        if args.op == "rule":
            out = translate_rule(pick_rule(rules, args.rule), variant, collect_garbage=args.gc)
        elif args.op == "nf":
            out = normal_form_formula(rules, load_formula(args.formula or "true"), variant, collect_garbage=args.gc)
        else:
            out = invariant_formula(pick_rule(rules, args.rule), load_formula(args.formula or "true"), variant)
    rep.extra["formula" if args.op != "rule" else "action"] = show(out)
    rep.lines.append(show(out))
    return 0


def cmd_hybrid(args, rep: Report) -> int:
    out = show(hybrid_translate(parse_hybrid(read_source(args.formula, ".hyb"))))
    rep.extra["formula"] = out
    rep.lines.append(out)
    return 0


# -- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print a JSON report")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for random choices")
    common.add_argument("--literal-root", action="store_true", default=argparse.SUPPRESS,
                        help="redirect the root on every global redirection")
    common.add_argument("--faithful-anchor", action="store_true", default=argparse.SUPPRESS,
                        help="default to the root-anchored injective encoding")

    parser = _Parser(prog="graphmod", description=__doc__.splitlines()[0], parents=[common])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    tg = groups.add_parser("tg", help="termgraphs and rewriting", parents=[common])
    tg.add_argument("op", choices=["parse", "print", "validate", "apply", "hom", "rewrite", "normalize"])
    tg.add_argument("--graph", required=True)
    tg.add_argument("--actions")
    tg.add_argument("--pattern")
    tg.add_argument("--mode", choices=["all", "injective"], default="all")
    tg.add_argument("--anchor")
    tg.add_argument("--system")
    tg.add_argument("--rule", type=int)
    tg.add_argument("--match", type=int, default=0)
    tg.add_argument("--strategy", choices=["first", "random"], default="first")
    tg.add_argument("--max-steps", type=int, default=10_000)
    tg.set_defaults(run=cmd_tg)

    mc = groups.add_parser("mc", help="model checking", parents=[common])
    mc.add_argument("op", choices=["check"])
    mc.add_argument("--graph", required=True)
    mc.add_argument("--formula", required=True)
    mc.add_argument("--max-states", type=int, default=5000)
    mc.add_argument("--max-fresh", type=int, default=3)
    mc.add_argument("--trace", action="store_true")
    mc.set_defaults(run=cmd_mc)

    lg = groups.add_parser("logic", help="reduction and validity", parents=[common])
    lg.add_argument("op", choices=["simplify", "eliminate", "valid"])
    lg.add_argument("--formula", required=True)
    lg.set_defaults(run=cmd_logic)

    enc = groups.add_parser("encode", help="modal encodings", parents=[common])
    enc.add_argument("op", choices=["hom", "rule", "nf", "inv", "shape"])
    enc.add_argument("--variant", choices=["faithful", "anywhere", "noninjective"])
    enc.add_argument("--graph")
    enc.add_argument("--system")
    enc.add_argument("--rule", type=int)
    enc.add_argument("--formula")
    enc.add_argument("--gc", action="store_true", help="add the garbage-collection sweep")
    enc.add_argument("--name", choices=SHAPES)
    enc.add_argument("--a", default="a")
    enc.add_argument("--b", default="b")
    enc.set_defaults(run=cmd_encode)

    hy = groups.add_parser("hybrid", help="hybrid logic", parents=[common])
    hy.add_argument("op", choices=["translate"])
    hy.add_argument("--formula", required=True)
    hy.set_defaults(run=cmd_hybrid)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("json", False), ("seed", 0), ("literal_root", False), ("faithful_anchor", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.group == "encode" and args.op == "hom" and not args.graph:
        parser.error("encode hom needs --graph")
    command = f"{args.group} {args.op}"
    rep = Report(command)
    try:
        code = args.run(args, rep)
    except (UsageError, ParseError, RuleError, GraphError, EncodingError, ReductionError,
            TableauError, OSError, ValueError) as e:
        print(f"graphmod: error: {e}", file=sys.stderr)
        return USAGE_ERROR
    if args.json:
        print(report_json(rep))
    else:
        for line in rep.lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
