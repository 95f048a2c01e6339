"""Command-line interface.

Subcommands::

    atltab decide FORMULA   report SAT/UNSAT with tableau statistics
    atltab model FORMULA    synthesize and verify a model, write it as JSON
    atltab graph FORMULA    write a tableau phase as DOT
    atltab check MODEL FORMULA   model-check a formula on a saved model

Exit status: 0 for SAT/true, 1 for UNSAT/false, 2 for errors (including an
exceeded node cap).  Everything written to stdout and to output files is
deterministic; wall-clock timings go to stderr, and into the statistics
record only when ``--timing`` is given.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import cgm as cgm_io
from .dot import pretableau_dot, tableau_dot
from .elimination import Verdict, decide
from .formula import Formula, ParseError, agents_of, extended_closure, length, parse
from .mcheck import check, verify_hintikka
from .synthesis import synthesize
from .tableau import DEFAULT_NODE_CAP, ResourceLimit

MODES = ("tight", "loose", "general", "turn_based")
PHASES = ("pretableau", "initial", "final")

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "tight"
    ctl: bool = False
    bijective: bool = False
    node_cap: int = DEFAULT_NODE_CAP
    dot_phase: Optional[str] = None
    dot_out: Optional[str] = None
    model_out: Optional[str] = None
    stats_json: Optional[str] = None
    timing: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.ctl and self.mode == "loose":
            raise UsageError("CTL input is decided over exactly one agent; loose mode does not apply")


def _parse_formula(text: str, cfg: RunConfig) -> Formula:
    f = parse(text, ctl=cfg.ctl)
    if cfg.ctl and agents_of(f) not in ((), (1,)):
        raise UsageError("CTL input may only use agent 1")
    return f


def _decide(theta: Formula, cfg: RunConfig) -> Verdict:
    agents = (1,) if cfg.ctl else None
    return decide(theta, cfg.mode, cfg.node_cap, agents)


def _stats(theta: Formula, cfg: RunConfig, v: Verdict) -> dict:
    s = v.stats
    record = {
        "formula_size": length(theta),
        "ecl_size": len(extended_closure(theta, v.final.agents)),
        "mode": cfg.mode,
        "decided_in_mode": v.mode.value,
        "agents": list(v.final.agents),
        "satisfiable": v.satisfiable,
        "prestates_created": s["prestates"],
        "states_created": s["states"],
        "eliminated": {"E1": s["eliminated_e1"], "E2": s["eliminated_e2"], "E3": s["eliminated_e3"]},
        "final_states": s["final_states"],
        "designated_states": len(v.designated),
    }
    if cfg.timing:
        record["time"] = {"construction": s["time_construction"], "elimination": s["time_elimination"]}
    return record


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _graph(v: Verdict, phase: str) -> str:
    if phase == "pretableau":
        return pretableau_dot(v.pretableau)
    if phase == "initial":
        return tableau_dot(v.initial, "initial")
    return tableau_dot(v.final, "final")


def _report(v: Verdict, record: dict) -> str:
    e = record["eliminated"]
    return "\n".join([
        "SAT" if v.satisfiable else "UNSAT",
        f"mode: {record['mode']} (decided in {record['decided_in_mode']} mode)",
        f"agents: {','.join(map(str, record['agents'])) or '-'}",
        f"formula size: {record['formula_size']}, extended closure: {record['ecl_size']}",
        f"pretableau: {record['prestates_created']} prestates, {record['states_created']} states",
        f"eliminated: E1 {e['E1']}, E2 {e['E2']}, E3 {e['E3']}",
        f"final tableau: {record['final_states']} states, {record['designated_states']} designated",
    ]) + "\n"


def _emit_common(theta: Formula, cfg: RunConfig, v: Verdict, record: dict) -> None:
    if cfg.dot_phase is not None:
        _write(cfg.dot_out, _graph(v, cfg.dot_phase))
    if cfg.stats_json is not None:
        _write(cfg.stats_json, json.dumps(record, indent=1, sort_keys=True) + "\n")


def _timing(v: Verdict, extra: str = "") -> None:
    s = v.stats
    print(f"time: construction {s['time_construction']:.3f}s, "
          f"elimination {s['time_elimination']:.3f}s{extra}", file=sys.stderr)


def cmd_decide(text: str, cfg: RunConfig) -> int:
    theta = _parse_formula(text, cfg)
    v = _decide(theta, cfg)
    record = _stats(theta, cfg, v)
    sys.stdout.write(_report(v, record))
    _emit_common(theta, cfg, v, record)
    _timing(v)
    return EXIT_TRUE if v.satisfiable else EXIT_FALSE


def cmd_model(text: str, cfg: RunConfig) -> int:
    theta = _parse_formula(text, cfg)
    v = _decide(theta, cfg)
    record = _stats(theta, cfg, v)
    if not v.satisfiable:
        sys.stdout.write(_report(v, record))
        _emit_common(theta, cfg, v, record)
        _timing(v)
        return EXIT_FALSE
    t0 = time.perf_counter()
    h, model = synthesize(v.final, cfg.bijective)
    hint = verify_hintikka(h)
    holds = check(model, model.designated, theta)
    elapsed = time.perf_counter() - t0
    record["hintikka_states"] = len(h.states)
    record["model_states"] = len(model.states)
    record["verified"] = hint.ok and holds
    if cfg.timing:
        record["time"]["synthesis"] = elapsed
    out = cgm_io.dumps(model)
    if cfg.model_out is None or cfg.model_out == "-":
        sys.stdout.write(out)
    else:
        Path(cfg.model_out).write_text(out)
        sys.stdout.write(_report(v, record))
        sys.stdout.write(f"model: {len(model.states)} states written to {cfg.model_out}\n")
    _emit_common(theta, cfg, v, record)
    _timing(v, f", synthesis {elapsed:.3f}s")
    verdict = "holds" if holds else "FAILS"
    print(f"verification: Hintikka conditions {hint.summary()}; "
          f"formula {verdict} at designated state {model.designated}", file=sys.stderr)
    return EXIT_TRUE if record["verified"] else EXIT_ERROR


def cmd_graph(text: str, cfg: RunConfig) -> int:
    theta = _parse_formula(text, cfg)
    v = _decide(theta, cfg)
    _write(cfg.dot_out, _graph(v, cfg.dot_phase or "final"))
    if cfg.stats_json is not None:
        _write(cfg.stats_json, json.dumps(_stats(theta, cfg, v), indent=1, sort_keys=True) + "\n")
    return EXIT_TRUE


def cmd_check(model_path: str, text: str, state: Optional[int], ctl: bool = False) -> int:
    model = cgm_io.loads(Path(model_path).read_text())
    phi = parse(text, ctl=ctl)
    s = model.designated if state is None else state
    if s not in model.states:
        raise UsageError(f"unknown state {s}")
    result = check(model, s, phi)
    print("true" if result else "false")
    return EXIT_TRUE if result else EXIT_FALSE


# ---------------------------------------------------------------- argument parsing

def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("formula", help="formula text (see README for the syntax)")
    p.add_argument("--mode", choices=MODES, default="tight",
                   help="satisfiability notion (default: tight)")
    p.add_argument("--ctl", action="store_true",
                   help="accept CTL path quantifiers and decide over one agent")
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP,
                   help="abort once this many tableau nodes exist")
    p.add_argument("--dot", choices=PHASES, dest="dot_phase",
                   help="also write this tableau phase as DOT")
    p.add_argument("--dot-out", "-o", default=None,
                   help="DOT output path (default: stdout)")
    p.add_argument("--stats-json", default=None, help="write statistics as JSON to this path")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock times in the statistics record")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atltab", description="Tableau-based satisfiability checking for ATL.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("decide", help="decide satisfiability")
    _add_run_options(p)
    p = sub.add_parser("model", help="synthesize a model of a satisfiable formula")
    _add_run_options(p)
    p.add_argument("--bijective", action="store_true",
                   help="emit a model whose transition maps are injective")
    p.add_argument("--model-out", default=None, help="model output path (default: stdout)")
    p = sub.add_parser("graph", help="write a tableau phase as DOT")
    _add_run_options(p)
    p = sub.add_parser("check", help="model-check a formula on a saved model")
    p.add_argument("model", help="model file written by 'atltab model'")
    p.add_argument("formula")
    p.add_argument("--state", type=int, default=None, help="state id (default: designated)")
    p.add_argument("--ctl", action="store_true", help="accept CTL path quantifiers")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args.model, args.formula, args.state, args.ctl)
        cfg = RunConfig(
            mode=args.mode, ctl=args.ctl, bijective=getattr(args, "bijective", False),
            node_cap=args.node_cap, dot_phase=args.dot_phase, dot_out=args.dot_out,
            model_out=getattr(args, "model_out", None), stats_json=args.stats_json,
            timing=args.timing,
        )
        if cfg.dot_phase is not None and cfg.dot_out is None and args.command != "graph":
            raise UsageError("--dot needs --dot-out for this command")
        command = {"decide": cmd_decide, "model": cmd_model, "graph": cmd_graph}[args.command]
        return command(args.formula, cfg)
    except ParseError as exc:
        print(f"error: {exc.diagnostic()}", file=sys.stderr)
    except ResourceLimit as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
    except (UsageError, cgm_io.ModelFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
