"""Command line front end.

Exit status: 0 success, 1 a property violation was found, 2 usage or input
error, 3 a search ran out of budget."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import TextIO

from . import __version__
from .engine import (
    DEFAULT_NODE_BUDGET,
    SOLVER_LIMIT,
    BudgetExceeded,
    ProtocolError,
    Round,
    SolverLimitError,
    check_solver_limit,
    Transcript,
    check_drawer_move,
    check_painter_move,
    initial_state,
    legal_drawer_moves,
    legal_painter_colors,
    painter_wins,
    verify_drawer_strategy,
    verify_painter_strategy,
)
from .graphcore import GraphError, GraphFormatError, bits, chromatic_number, format_graph, induced_embeddings, parse_graph
from .qdnf import QdnfError, QdnfParseError, evaluate_qdnf, parse_qdnf
from .reduction import ReductionOutput, build_g1, build_g2, build_g3, remove_precolored_vertex, wrap_host
from .strategies import DRAWERS, PAINTERS, RecognitionError, StrategyContext, make_drawer, make_painter

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_MAX_EDGES = 5_000_000


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def load_graph(path: str):
    try:
        return parse_graph(_read(path))
    except GraphFormatError as e:
        raise UsageError(f"{path}:{e}") from None
    except GraphError as e:
        raise UsageError(f"{path}: {e}") from None


def load_formula(path: str):
    try:
        return parse_qdnf(_read(path))
    except QdnfParseError as e:
        raise UsageError(f"{path}:{e}") from None
    except QdnfError as e:
        raise UsageError(f"{path}: {e}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


# ---------------------------------------------------------------------------
# verbs


def cmd_solve(args, out: TextIO) -> int:
    host = load_graph(args.graph)
    budget = args.node_budget
    total = {"nodes": 0, "table_size": 0, "tt_hits": 0}
    ks = [args.k] if args.k is not None else None
    try:
        check_solver_limit(host, SOLVER_LIMIT)
        if ks is None:
            k = max(chromatic_number(host.graph), len(set(host.coloring.values())))
        else:
            k = ks[0]
        while True:
            outcome, stats = painter_wins(host, k, transcript=args.transcript, node_budget=budget, jobs=args.jobs)
            for key, val in stats.to_dict().items():
                total[key] += val
            if ks is not None or outcome.painter_wins:
                break
            k += 1
    except SolverLimitError as e:
        raise UsageError(str(e)) from None
    except BudgetExceeded:
        print(f"budget exceeded after {budget} nodes", file=out)
        print(f"stats {_dump(total)}", file=out)
        return EXIT_BUDGET
    if ks is None:
        print(f"chi_online = {k}", file=out)
    else:
        print(f"k = {k}: {outcome.winner} wins", file=out)
    print(f"stats {_dump(total)}", file=out)
    if outcome.transcript is not None:
        out.write(outcome.transcript.to_text())
    return EXIT_OK


def cmd_chromatic(args, out: TextIO) -> int:
    host = load_graph(args.graph)
    try:
        print(f"chi = {chromatic_number(host.graph)}", file=out)
    except GraphError as e:
        raise UsageError(str(e)) from None
    return EXIT_OK


def cmd_eval(args, out: TextIO) -> int:
    f = load_formula(args.formula)
    try:
        value = evaluate_qdnf(f)
    except QdnfError as e:
        raise UsageError(str(e)) from None
    print("true" if value else "false", file=out)
    return EXIT_OK


def build_stage(f, stage: str) -> ReductionOutput:
    return {"g1": build_g1, "g2": build_g2, "g3": build_g3}[stage](f)


def cmd_reduce(args, out: TextIO) -> int:
    f = load_formula(args.formula)
    red = build_stage(f, args.stage)
    if args.output:
        stem = Path(args.output)
    else:
        src = Path(args.formula)
        stem = src.with_name(f"{src.stem}.{args.stage}")
    roles_path = stem.with_name(stem.name + ".roles.json")
    graph_path = stem.with_name(stem.name + ".graph")
    roles_path.write_text(red.sidecar_json())
    s = red.stats
    print(f"stage {args.stage}: k = {red.k}, |V| = {red.n}", file=out)
    print(f"roles written to {roles_path}", file=out)
    host = red.graph
    if not hasattr(host, "graph"):
        edges = host.num_edges
        if edges > args.max_edges:
            print(f"graph not written: {edges} edges exceeds --max-edges {args.max_edges}", file=out)
            return EXIT_BUDGET
        host = host.materialize(max_vertices=red.n)
    graph_path.write_text(format_graph(host))
    print(f"graph written to {graph_path}", file=out)
    if args.stage == "g3":
        print(f"iterations {_dump(s['iterations'])}", file=out)
    return EXIT_OK


def _context(args) -> StrategyContext:
    if args.host:
        host = load_graph(args.host)
        red = wrap_host(host, args.budget)
    elif args.formula:
        red = build_stage(load_formula(args.formula), args.stage)
        if not hasattr(red.graph, "graph"):
            raise UsageError("strategies need a materialised host; use --stage g1 or g2")
    else:
        raise UsageError("give --host or --formula")
    base = None
    base_k = None
    if args.remove is not None:
        base = red.graph
        if args.remove not in base.coloring:
            raise UsageError(f"vertex {args.remove} is not precolored")
        red = remove_precolored_vertex(red, args.remove)
        base_k = args.inner_budget if args.inner_budget is not None else args.budget - 2 * red.stats["S"]
    return StrategyContext(red=red, k=args.budget, seed=args.seed, base=base, base_k=base_k, inner=args.inner)


def cmd_verify(args, out: TextIO) -> int:
    ctx = _context(args)
    host = ctx.host
    try:
        if args.painter:
            strat = make_painter(args.painter, ctx)
            mode = "sampled" if args.samples else "exhaustive"
            rep = verify_painter_strategy(
                host, args.budget, strat, mode=mode, seed=args.seed, trials=args.samples or 0, node_budget=args.node_budget
            )
            print(rep.to_json(), file=out)
            if not rep.complete:
                return EXIT_BUDGET
            return EXIT_VIOLATION if rep.violation else EXIT_OK
        strat = make_drawer(args.drawer, ctx)
        rep = verify_drawer_strategy(host, args.budget, strat, node_budget=args.node_budget)
    except (ValueError, RecognitionError, ProtocolError) as e:
        raise UsageError(str(e)) from None
    print(rep.to_json(), file=out)
    if not rep.complete:
        return EXIT_BUDGET
    return EXIT_OK if rep.forced else EXIT_VIOLATION


def _ask(prompt: str, n: int, inp: TextIO, out: TextIO) -> int:
    while True:
        out.write(prompt)
        out.flush()
        line = inp.readline()
        if not line:
            raise UsageError("input ended")
        line = line.strip()
        if line.isdigit() and 0 <= int(line) < n:
            return int(line)
        print(f"enter a number between 0 and {n - 1}", file=out)


def cmd_play(args, out: TextIO, inp: TextIO) -> int:
    ctx = _context(args)
    host = ctx.host
    k = args.budget
    try:
        if args.as_ == "painter":
            other = make_drawer(args.opponent, ctx)
        else:
            other = make_painter(args.opponent, ctx)
    except ValueError as e:
        raise UsageError(str(e)) from None
    state = initial_state(host)
    t = Transcript()
    witness = tuple(state.anchors)
    rnd = 0
    print(f"host: {host.n} vertices, {len(host.anchors)} precolored; budget {k}", file=out)
    while state.revealed < host.n:
        rnd += 1
        if args.as_ == "drawer":
            moves = legal_drawer_moves(state, host)
            print(f"round {rnd}: legal neighbourhoods", file=out)
            for i, m in enumerate(moves):
                print(f"  [{i}] {sorted(bits(m))}", file=out)
            mask = moves[_ask("your move: ", len(moves), inp, out)]
            ext = state.graph.extend(mask, -1)
            witness = induced_embeddings(ext, host, limit=1)[0]
            pend = state.present(mask)
            color = other.choose(pend)
            check_painter_move(pend, color, rnd)
            print(f"painter colors vertex {state.revealed} with {color}", file=out)
        else:
            mask, witness = other.move(state)
            check_drawer_move(state, host, mask, witness, rnd)
            pend = state.present(mask)
            legal = legal_painter_colors(pend, k)
            nb = ", ".join(f"{w}:{state.colors[w]}" for w in bits(mask)) or "none"
            print(f"round {rnd}: vertex {state.revealed} sees {nb}", file=out)
            if not legal:
                print("no legal color within the budget: drawer wins", file=out)
                return EXIT_OK
            for i, c in enumerate(legal):
                print(f"  [{i}] color {c}" + (" (new)" if c == pend.used_colors else ""), file=out)
            color = legal[_ask("your color: ", len(legal), inp, out)]
        state = pend.paint(color)
        t.rounds.append(Round(rnd, mask, color, state.used_colors, witness[-1]))
        if state.used_colors > k:
            print(f"color {k + 1} needed: drawer wins", file=out)
            return EXIT_OK
    print(f"all vertices colored with {state.used_colors} colors: painter wins", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onlinecolor", description="Online graph coloring games and hardness gadgets.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=0, help="seed for all sampling (default 0)")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="search node budget")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the solver")
    p.add_argument("-o", "--output", help="output path (reduce: file stem)")
    # -o is also accepted after the verb
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve", parents=[common], help="online chromatic number or a k-decision")
    s.add_argument("graph")
    s.add_argument("--k", type=int)
    s.add_argument("--transcript", action="store_true", help="print a principal variation")

    s = sub.add_parser("chromatic", parents=[common], help="ordinary chromatic number")
    s.add_argument("graph")

    s = sub.add_parser("eval", parents=[common], help="truth value of a quantified formula")
    s.add_argument("formula")

    s = sub.add_parser("reduce", parents=[common], help="build a gadget graph from a formula")
    s.add_argument("formula")
    s.add_argument("--stage", choices=("g1", "g2", "g3"), required=True)
    s.add_argument("--max-edges", type=int, default=DEFAULT_MAX_EDGES)

    def host_args(s):
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--host", help="graph file")
        src.add_argument("--formula", help="formula file; the host is built from it")
        s.add_argument("--stage", choices=("g1", "g2"), default="g1")
        s.add_argument("--remove", type=int, help="replace this precolored vertex by a supernode")
        s.add_argument("--inner", help="strategy for the graph before the removal")
        s.add_argument("--inner-budget", type=int, help="color budget before the removal")
        s.add_argument("--budget", type=int, required=True, help="number of colors k")

    s = sub.add_parser("verify", parents=[common], help="check a named strategy against all or sampled opponents")
    host_args(s)
    who = s.add_mutually_exclusive_group(required=True)
    who.add_argument("--painter", choices=sorted(PAINTERS))
    who.add_argument("--drawer", choices=sorted(DRAWERS))
    how = s.add_mutually_exclusive_group()
    how.add_argument("--exhaustive", action="store_true", help="every Drawer reply (default)")
    how.add_argument("--samples", type=int, help="random presentation orders instead")

    s = sub.add_parser("play", parents=[common], help="play interactively in the terminal")
    host_args(s)
    s.add_argument("--as", dest="as_", choices=("painter", "drawer"), required=True)
    s.add_argument("--opponent", required=True)
    return p


def run(argv: list[str] | None = None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.jobs < 1 or args.node_budget < 1:
        print("error: --jobs and --node-budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "solve": cmd_solve,
        "chromatic": cmd_chromatic,
        "eval": cmd_eval,
        "reduce": cmd_reduce,
        "verify": cmd_verify,
    }
    try:
        if args.verb == "play":
            return cmd_play(args, out, inp)
        return handlers[args.verb](args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
