"""Command-line front end.

Every subcommand reads an open graph with ``--graph``.  Output is
human-readable by default and JSON with ``--json``.

Exit codes: 0 success, 2 unreadable or malformed graph, 3 size cap or
resource limit exceeded, 4 no witness exists.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import chooser, classify, flow, sim
from .opengraph import CapExceeded, GraphError, OpenGraph, ParseError, load, to_dot

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_NO_WITNESS = 4

#: ``analyze`` only runs the simulator cross-check up to this many vertices.
ANALYZE_SIM_LIMIT = 10

log = logging.getLogger("gflowkit")


def _emit(args, data: dict | list, text: str) -> None:
    print(json.dumps(data, indent=2) if args.json else text)


def _names(og: OpenGraph, mask: int) -> str:
    return "{" + ", ".join(og.names(mask)) + "}"


def _gflow_text(og: OpenGraph, f: flow.FocusedGFlow | None) -> str:
    if f is None:
        return "gflow: none"
    lines = ["gflow (focused):"]
    for u in sorted(f.g, key=lambda v: (-f.layers[v], v)):
        lines.append(f"  g({og.labels[u]}) = {_names(og, f.g[u])}  layer {f.layers[u]}")
    return "\n".join(lines)


def _report_text(og: OpenGraph, r: classify.ClassificationReport) -> str:
    yn = {True: "yes", False: "no"}
    lines = [
        f"vertices: {og.n}  edges: {og.num_edges()}  inputs: {_names(og, og.inputs)}  "
        f"outputs: {_names(og, og.outputs)}",
        f"gflow: {yn[r.has_gflow]}",
        f"equiprobable: {yn[r.equiprobable]}",
        f"constant probability: {yn[r.constant_probability]}",
    ]
    if r.internal_sets:
        shown = ", ".join(_names(og, w) for w in r.internal_sets[:8])
        more = f" (+{len(r.internal_sets) - 8} more)" if len(r.internal_sets) > 8 else ""
        lines.append(f"internal sets: {shown}{more}")
    if r.strongly_internal_sets:
        shown = ", ".join(_names(og, w) for w in r.strongly_internal_sets[:8])
        lines.append(f"strongly internal sets: {shown}")
    if r.notes:
        lines.append(f"notes: {r.notes}")
    return "\n".join(lines)


def cmd_analyze(args, og: OpenGraph) -> int:
    r = classify.classify(og, args.cap)
    data = r.to_dict()
    text = [_report_text(og, r)]
    if r.gflow is not None:
        text.append(_gflow_text(og, r.gflow))
    if og.n <= ANALYZE_SIM_LIMIT:
        check = {
            "equiprobable": sim.check_equiprobability(og, 5, args.tol, args.seed),
            "constant_probability": sim.check_constant_probability(og, 5, 1e-6, args.seed),
        }
        if r.gflow is not None:
            rng = np.random.default_rng(args.seed)
            plan = sim.corrections_from_gflow(og, r.gflow).with_angles(sim.random_angles(og, rng))
            table = sim.run_branches(og, plan)
            strict, residual = sim.check_strong_determinism(table, args.tol)
            signed, _ = sim.check_strong_determinism(table, args.tol, allow_sign=True)
            check["strongly_deterministic"] = strict
            check["deterministic_up_to_sign"] = signed
            check["determinism_residual"] = residual
        data["simulation"] = check
        text.append("simulation: " + ", ".join(f"{k}={v}" for k, v in check.items()))
    _emit(args, data, "\n".join(text))
    return EXIT_OK


def cmd_gflow(args, og: OpenGraph) -> int:
    f = flow.find_gflow(og)
    gf = None if f is None else flow.focus(og, f)
    _emit(args, {"gflow": None if gf is None else gf.to_dict()}, _gflow_text(og, gf))
    return EXIT_OK


def cmd_classify(args, og: OpenGraph) -> int:
    r = classify.classify(og, args.cap)
    _emit(args, r.to_dict(), _report_text(og, r))
    return EXIT_OK


def cmd_choose_io(args, og: OpenGraph) -> int:
    if og.inputs or og.outputs:
        log.warning("ignoring the input/output lines of the graph file")
    og = og.bare()
    placements = chooser.choose_io(og, args.k, args.cap)
    if not args.all_orbits:
        placements = chooser.dedupe_by_symmetry(og, placements)
    data = [p.to_dict(og, None if args.all_orbits else True) for p in placements]
    lines = [f"{len(placements)} placement(s) with {args.k} inputs and {args.k} outputs"]
    if not args.all_orbits:
        lines[0] += " up to symmetry"
    for p in placements:
        lines.append(f"  I={_names(og, p.inputs)}  O={_names(og, p.outputs)}  gflow={p.has_gflow}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_witness(args, og: OpenGraph) -> int:
    r = classify.classify(og, args.cap)
    if args.const:
        if not r.strongly_internal_sets:
            print("no witness exists: the open graph has constant probability", file=sys.stderr)
            return EXIT_NO_WITNESS
        w0 = r.strongly_internal_sets[0]
        plans = classify.make_distinguishing_witness(og, w0)
        probs = [p.branch_probabilities() for p in plans]
        s = int(np.argmax(np.abs(probs[0] - probs[1])))
        branch = sim.branch_label(og, s)
        data = {
            "plans": [p.to_dict() for p in plans],
            "forbidden_probability": [p.forbidden_probability() for p in plans],
            "branch": branch,
            "branch_probabilities": [float(probs[0][s]), float(probs[1][s])],
        }
        text = (
            f"strongly internal set {_names(og, w0)}\n"
            f"branch {branch}: probability {probs[0][s]:.6g} under plan 0, "
            f"{probs[1][s]:.6g} under plan 1"
        )
    else:
        if not r.internal_sets:
            print("no witness exists: the open graph is equiprobable", file=sys.stderr)
            return EXIT_NO_WITNESS
        w0 = r.internal_sets[0]
        plan = classify.make_witness(og, w0)
        p = plan.forbidden_probability()
        data = {"plan": plan.to_dict(), "forbidden_probability": p, "confirmed": p < args.tol}
        text = (
            f"internal set {_names(og, w0)}\n"
            f"forbidden parity {plan.forbidden_parity}: largest forbidden-branch probability {p:.3g}"
        )
    _emit(args, data, text)
    return EXIT_OK


def _input_state(args, og: OpenGraph) -> np.ndarray:
    k = og.inputs.bit_count()
    if args.input_state:
        names = args.input_state.split(",")
        if len(names) != k:
            raise ValueError(f"--input-state needs {k} comma-separated names")
        return sim.product_state(names)
    rng = np.random.default_rng(args.seed)
    return sim.random_states(1 << k, 1, rng)[:, 0]


def cmd_simulate(args, og: OpenGraph) -> int:
    rng = np.random.default_rng(args.seed)
    if args.plan:
        with open(args.plan, encoding="utf-8") as fh:
            plan = sim.MeasurementPlan.from_dict(og, json.load(fh))
    else:
        f = flow.find_gflow(og)
        plan = sim.MeasurementPlan.uncorrected(og) if f is None else sim.corrections_from_gflow(og, f)
        plan = plan.with_angles(sim.random_angles(og, rng))
    table = sim.run_branches(og, plan)
    state = _input_state(args, og)
    strict, residual = sim.check_strong_determinism(table, args.tol)
    data = {
        "plan": plan.to_dict(og),
        "table": table.to_dict(state, include_maps=args.maps),
        "completeness_residual": table.completeness_residual(),
        "strongly_deterministic": strict,
        "determinism_residual": residual,
    }
    lines = [f"{len(data['table']['branches'])} branch(es) over {_names(og, og.non_outputs)}"]
    for b in data["table"]["branches"]:
        lines.append(f"  {b['outcome'] or '-'}  p={b['probability']:.6g}")
    lines.append(f"completeness residual {data['completeness_residual']:.3g}")
    lines.append(f"strongly deterministic: {strict} (residual {residual:.3g})")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_export_dot(args, og: OpenGraph) -> int:
    highlight = None
    if args.highlight == "gflow":
        f = flow.find_gflow(og)
        if f is None:
            log.warning("no gflow to highlight")
        else:
            highlight = flow.focus(og, f).g
    sys.stdout.write(to_dot(og, highlight))
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "gflow": cmd_gflow,
    "classify": cmd_classify,
    "choose-io": cmd_choose_io,
    "witness": cmd_witness,
    "simulate": cmd_simulate,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, help="graph file (text format or .json)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=42, help="seed for random states and angles")
    common.add_argument(
        "--cap", type=int, default=classify.DEFAULT_CAP, help="largest vertex count to enumerate subsets of"
    )
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance")

    parser = argparse.ArgumentParser(
        prog="gflowkit", description="Analyse determinism of measurement patterns on open graphs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="classification, gflow and simulator check")
    sub.add_parser("gflow", parents=[common], help="find a focused gflow")
    sub.add_parser("classify", parents=[common], help="determinism class verdicts")
    p = sub.add_parser("choose-io", parents=[common], help="search input/output placements")
    p.add_argument("-k", type=int, required=True, help="number of inputs and of outputs")
    p.add_argument("--all-orbits", action="store_true", help="list every placement, not one per orbit")
    p = sub.add_parser("witness", parents=[common], help="measurement plan exposing a violation")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--equi", action="store_true", help="witness against equiprobability (default)")
    mode.add_argument("--const", action="store_true", help="witness against constant probability")
    p = sub.add_parser("simulate", parents=[common], help="branch table of a measurement plan")
    p.add_argument("--plan", help="plan JSON; default uses gflow corrections and random angles")
    p.add_argument("--input-state", help="comma-separated zero/one/plus/minus per input")
    p.add_argument("--maps", action="store_true", help="include the branch matrices")
    p = sub.add_parser("export-dot", parents=[common], help="Graphviz DOT export")
    p.add_argument("--highlight", choices=["gflow"], help="overlay the focused gflow arcs")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        og = load(args.graph)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read graph: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args, og)
    except CapExceeded as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (GraphError, ValueError, KeyError) as exc:
        # invalid input that only shows up once the command runs
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
