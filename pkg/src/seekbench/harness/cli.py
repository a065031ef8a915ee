"""Command line entry point: run, report, replay and validate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from ..envs.core import Transcript
from .config import ConfigError, load_config
from .records import AXES, curve, load_records, success_rate, write_reports
from .runner import enumerate_trials, run_experiment


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(str(exc))
    n = sum(1 for _ in enumerate_trials(config))
    print(f"ok: {len(config.tasks)} tasks, {len(config.methods)} methods, {n} trials")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(str(exc))
    if args.output:
        config = type(config)(**{**config.__dict__, "output_dir": Path(args.output)})
    records = run_experiment(config, resume=not args.fresh)
    ok = sum(r.success for r in records)
    errored = sum(r.errored for r in records)
    print(f"{len(records)} trials, {ok} successes, {errored} errored -> {config.output_dir}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.dir) / "records.jsonl"
    if not path.exists():
        return _fail(f"no records.jsonl in {args.dir}")
    records = load_records(path)
    if not records:
        return _fail(f"{path} holds no records")
    rows = success_rate(records)
    points = [p for axis in AXES for p in curve(records, axis)]
    write_reports(records, Path(args.dir))
    if args.json:
        print(json.dumps({"metrics": [asdict(r) for r in rows], "curves": [asdict(p) for p in points]}, indent=2))
        return 0
    width = max(len(r.group) for r in rows)
    print(f"{'group':<{width}}  trials  success  rate")
    for r in rows:
        flag = "  (errored >= 50%)" if r.flagged else ""
        print(f"{r.group:<{width}}  {r.trials:>6}  {r.successes:>7}  {r.rate:5.1f}{flag}")
    for p in points:
        print(f"curve {p.group} {p.axis}={p.budget}: {p.rate:.1f}")
    return 0


def _phase(tag: str | None) -> str:
    if not tag:
        return "actions"
    attempt, _, phase = tag.partition(":")
    label = {"seek": "information seeking", "plan": "task plan", "act": "react"}.get(phase, phase)
    return f"attempt {attempt}: {label}"


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        transcript = Transcript.load(args.transcript)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot read transcript: {exc}")
    markers = set(transcript.markers)
    current: object = object()
    for i, e in enumerate(transcript.entries):
        if i in markers:
            print("-- history reset --")
        if e.tag != current:
            current = e.tag
            print(f"== {_phase(e.tag)} ==")
        print(f"{i + 1:>4} > {e.action}")
        for line in e.observation.splitlines():
            print(f"       {line}")
    print(f"{transcript.steps_used} steps")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seekbench", description="Text-environment benchmark harness.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="execute an experiment config")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="override output_dir")
    p.add_argument("--fresh", action="store_true", help="discard existing records instead of resuming")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("report", help="write metrics.csv and curves.csv for a results directory")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p.set_defaults(func=cmd_report)
    p = sub.add_parser("replay", help="pretty-print a transcript")
    p.add_argument("transcript")
    p.set_defaults(func=cmd_replay)
    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
