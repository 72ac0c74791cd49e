"""Command line front end: ``costshare <verb> [input] [flags]``.

Every flag with a default can also be set through an environment variable
named COSTSHARE_<FLAG>, e.g. COSTSHARE_PATH_CAP=5000. Command line flags win.

Exit status: 0 success, 1 malformed input, 2 path or search budget exhausted,
3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import classes, io
from .badconfig import DEFAULT_SEARCH_CAP, detect_bc, generate_witness
from .enforce import check_enforceable, emit_protocol, verify_pne
from .errors import ConsistencyError, CostShareError, InvalidInstance, PathExplosion, SearchBudgetExceeded
from .forests import forest_from_edges, optimal_forests, price_of_stability
from .graph import DEFAULT_PATH_CAP, Graph, Instance, natural_key
from .transform import compute_ordering, is_pushed_left, maximize_for_player2, push_left

ENV_PREFIX = "COSTSHARE_"
EXIT_INPUT, EXIT_BUDGET, EXIT_CONSISTENCY = 1, 2, 3


def _env(name: str, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    return type(default)(raw) if default is not None else raw


# -- input handling -----------------------------------------------------------------

_FAMILY_RE = re.compile(r"^(wheel|fan|cycle|path|complete)(\d+)$")


def _parse_terminals(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4 or not all(parts):
        raise InvalidInstance("--terminals expects s1,t1,s2,t2")
    return (parts[0], parts[1]), (parts[2], parts[3])


def _unit_costs(g: Graph) -> dict:
    return {e.id: Fraction(1) for e in g.edges}


def load_input(args) -> Instance:
    """The instance named by the positional path or by --fixture."""
    terminals = _parse_terminals(args.terminals) if args.terminals else None
    if args.fixture and args.input:
        raise InvalidInstance("give either an instance file or --fixture, not both")
    if args.fixture:
        m = _FAMILY_RE.match(args.fixture)
        if m:
            g = classes.generate(classes.FamilySpec(m.group(1), int(m.group(2))))
            if terminals is None:
                raise InvalidInstance(f"fixture {args.fixture!r} is a bare graph; pass --terminals")
            return Instance(g, terminals, _unit_costs(g))
        inst = classes.fixture(args.fixture, x=Fraction(args.x), eps=Fraction(args.eps))
    elif args.input:
        inst = io.load_instance(args.input)
    else:
        raise InvalidInstance("no input: give an instance file or --fixture")
    if terminals is not None:
        inst = Instance(inst.graph, terminals, inst.cost)
    return inst


def select_forest(inst: Instance, spec: str, cap: int):
    if spec.upper() == "OPT":
        return optimal_forests(inst, cap)[1][0]
    edges = [e.strip() for e in spec.split(",") if e.strip()]
    for e in edges:
        if not inst.graph.has_edge(e):
            raise InvalidInstance(f"--forest: unknown edge {e!r}")
    try:
        return forest_from_edges(inst, edges)
    except ValueError as exc:
        raise InvalidInstance(f"--forest: {exc}") from None


# -- reports ----------------------------------------------------------------------


def _emit(args, report: dict) -> None:
    report = {"schema_version": io.SCHEMA_VERSION, **report}
    if args.format == "json":
        sys.stdout.write(io.dumps(report))
        return
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        sys.stdout.write(f"{key}: {value}\n")


def _write_dot(args, text: str) -> None:
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)


def _edges_json(f) -> list:
    return list(f.sorted_edges)


# -- verbs --------------------------------------------------------------------------


def cmd_opt(args) -> int:
    inst = load_input(args)
    cost, forests = optimal_forests(inst, args.path_cap)
    _emit(args, {"min_cost": str(cost), "count": len(forests), "forests": [_edges_json(f) for f in forests]})
    _write_dot(args, io.to_dot(inst.graph, inst.cost, forests[0].edges))
    return 0


def cmd_pos(args) -> int:
    inst = load_input(args)
    res = price_of_stability(inst, args.path_cap)
    _emit(
        args,
        {
            "pos": str(res.pos),
            "min_cost": str(res.opt_cost),
            "enforceable_cost": str(res.best_enforceable.cost),
            "forests": [_edges_json(f) for f in res.ties],
        },
    )
    _write_dot(args, io.to_dot(inst.graph, inst.cost, res.best_enforceable.edges))
    return 0


def cmd_enforce(args) -> int:
    inst = load_input(args)
    f = select_forest(inst, args.forest, args.path_cap)
    rep = check_enforceable(inst, f, args.path_cap)
    out = {"forest": _edges_json(f), **rep.to_json()}
    if args.protocol:
        if not rep.enforceable:
            out["protocol"] = None
        else:
            proto = emit_protocol(inst, f, rep.shares)
            if not verify_pne(inst, f, proto, args.path_cap):
                raise ConsistencyError("emitted protocol does not make the forest an equilibrium")
            out["protocol"] = proto.to_json()
    _emit(args, out)
    _write_dot(args, io.to_dot(inst.graph, inst.cost, f.edges))
    return 0


def cmd_shares(args) -> int:
    inst = load_input(args)
    f = select_forest(inst, args.forest, args.path_cap)
    out = {"forest": _edges_json(f)}
    if args.max2:
        res = maximize_for_player2(inst, f, args.path_cap)
        shares = res.shares
        out["first_unpaid"] = res.first_unpaid
        out["case"] = res.case
        out["vacuous"] = list(res.vacuous)
        out["passes"] = res.passes
    else:
        shares = check_enforceable(inst, f, args.path_cap).shares
        if args.pl:
            shares = push_left(inst, f, shares, args.path_cap)
    out["pushed_left"] = is_pushed_left(inst, f, shares, args.path_cap)[0]
    out["shares"] = shares.to_json()
    out["totals"] = {"1": str(shares.total(1)), "2": str(shares.total(2))}
    out["ordering"] = compute_ordering(inst, f).to_json()
    _emit(args, out)
    return 0


def cmd_detect(args) -> int:
    inst = load_input(args)
    res = detect_bc(inst.graph, inst.terminals, args.search_cap)
    _emit(args, res.to_json())
    if res.embedding is not None:
        _write_dot(args, io.embedding_to_dot(res.embedding, inst.graph))
    return 0


def cmd_witness(args) -> int:
    inst = load_input(args)
    res = detect_bc(inst.graph, inst.terminals, args.search_cap)
    if res.embedding is None:
        _emit(args, res.to_json())
        return 0
    wit = generate_witness(res.embedding, inst.graph)
    out = {"pattern": res.embedding.pattern, "instance": io.instance_to_json(wit)}
    if not args.no_check:
        # a witness whose optimum is enforceable would contradict the theory
        cost, forests = optimal_forests(wit, args.path_cap)
        if any(check_enforceable(wit, f, args.path_cap, lexicographic=False).enforceable for f in forests):
            raise ConsistencyError(f"witness for {res.embedding.pattern} has an enforceable optimum")
        out["min_cost"] = str(cost)
        out["opt_enforceable"] = False
    _emit(args, out)
    _write_dot(args, io.embedding_to_dot(res.embedding, wit.graph, wit.cost))
    return 0


def cmd_classify(args) -> int:
    inst = load_input(args)
    c = classes.classify_efficiency(inst.graph, inst.terminals, args.search_cap)
    out = {"verdict": c.verdict, "detail": c.detail}
    if c.embedding is not None:
        out["embedding"] = c.embedding.to_json()
    _emit(args, out)
    return EXIT_BUDGET if c.verdict == classes.UNKNOWN else 0


def cmd_gen(args) -> int:
    if args.family == "fixture":
        if args.arg is None:
            raise InvalidInstance("gen fixture needs a fixture id")
        inst = classes.fixture(args.arg, x=Fraction(args.x), eps=Fraction(args.eps))
        doc = io.instance_to_json(inst)
        g = inst.graph
    else:
        try:
            n = int(args.arg)
        except (TypeError, ValueError):
            raise InvalidInstance(f"gen {args.family} needs an integer size") from None
        g = classes.generate(classes.FamilySpec(args.family, n))
        if args.terminals:
            doc = io.instance_to_json(Instance(g, _parse_terminals(args.terminals), _unit_costs(g)))
        else:
            doc = io.graph_to_json(g)
    sys.stdout.write(io.dumps(doc))
    _write_dot(args, io.to_dot(g))
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    rows = run_selftest(seed=args.seed, path_cap=args.path_cap, search_cap=args.search_cap)
    if args.format == "json":
        sys.stdout.write(io.dumps({"schema_version": io.SCHEMA_VERSION, "checks": [r.to_json() for r in rows]}))
    else:
        width = max(len(r.name) for r in rows)
        for r in rows:
            sys.stdout.write(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
    return 0 if all(r.ok for r in rows) else EXIT_CONSISTENCY


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=_env("FORMAT", "json"))
    common.add_argument("--path-cap", type=int, default=_env("PATH_CAP", DEFAULT_PATH_CAP))
    common.add_argument("--search-cap", type=int, default=_env("SEARCH_CAP", DEFAULT_SEARCH_CAP))
    common.add_argument("--seed", type=int, default=_env("SEED", 0))
    common.add_argument("--dot", metavar="FILE", default=_env("DOT", None), help="also write a DOT rendering")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("input", nargs="?", help="instance JSON file")
    source.add_argument("--fixture", help="named fixture, or a family graph such as wheel7")
    source.add_argument("--x", default="1", help="parameter of the pos-lower-bound fixture")
    source.add_argument("--eps", default="1/4", help="epsilon of the fig1-shapley fixture")
    source.add_argument("--terminals", help="override terminals: s1,t1,s2,t2")

    parser = argparse.ArgumentParser(prog="costshare", description="Two-player network design games.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("opt", parents=[common, source], help="optimal Steiner forests")
    p.set_defaults(func=cmd_opt)
    p = sub.add_parser("pos", parents=[common, source], help="price of stability")
    p.set_defaults(func=cmd_pos)
    p = sub.add_parser("enforce", parents=[common, source], help="solve LP(F) for one forest")
    p.add_argument("--forest", default="OPT", help="OPT or a comma separated edge list")
    p.add_argument("--protocol", action="store_true", help="also emit the separable protocol")
    p.set_defaults(func=cmd_enforce)
    p = sub.add_parser("shares", parents=[common, source], help="cost shares of a forest")
    p.add_argument("--forest", default="OPT")
    p.add_argument("--pl", action="store_true", help="push shares to the left")
    p.add_argument("--max2", action="store_true", help="maximise for Player 2")
    p.set_defaults(func=cmd_shares)
    p = sub.add_parser("detect-bc", parents=[common, source], help="search for a Bad Configuration")
    p.set_defaults(func=cmd_detect)
    p = sub.add_parser("witness", parents=[common, source], help="witness costs for a found Bad Configuration")
    p.add_argument("--no-check", action="store_true", help="skip verifying that the optimum is not enforceable")
    p.set_defaults(func=cmd_witness)
    p = sub.add_parser("classify", parents=[common, source], help="Efficient / NotEfficient / Unknown")
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("gen", parents=[common], help="emit a family graph or a fixture instance")
    p.add_argument("family", choices=classes.FAMILIES + ("fixture",))
    p.add_argument("arg", nargs="?", help="size, or fixture id")
    p.add_argument("--x", default="1")
    p.add_argument("--eps", default="1/4")
    p.add_argument("--terminals")
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("selftest", parents=[common], help="run the pinned fixture checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PathExplosion, SearchBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (CostShareError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
