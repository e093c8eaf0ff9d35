"""``planner`` command line: plan, suite, accuracy, ground."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .approx import ApproxConfig
from .experiments import (
    DETAIL_COLUMNS,
    SUITE_COLUMNS,
    SUMMARY_COLUMNS,
    AccuracyConfig,
    build_corpus,
    load_manifest,
    run_accuracy,
    run_suite,
    suite_table,
    write_csv,
)
from .gstrips import GStripsFormatError, read_ground_strips, write_ground_strips
from .pddl import PDDLError, load_files
from .search import EXHAUSTED, PLANNERS, RESOURCE_LIMIT, SOLVED, UNSOLVABLE, bfws, config_from_name
from .strips import format_plan

EXIT_CODES = {SOLVED: 0, EXHAUSTED: 10, RESOURCE_LIMIT: 11, UNSOLVABLE: 12}
EXIT_USAGE = 2

log = logging.getLogger("noveltyplan")


class UsageError(Exception):
    pass


def _auto_int(text: str) -> int | None:
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _seed_list(text: str) -> list[int]:
    # "4" alone is ambiguous; accept "0-3" ranges and explicit lists
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return _int_list(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planner", description="Width-based planning with approximate novelty.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve one instance")
    p.add_argument("--domain", type=Path)
    p.add_argument("--problem", type=Path)
    p.add_argument("--gstrips", type=Path, help="read the grounded task from this file instead of PDDL")
    p.add_argument("--planner", choices=sorted(PLANNERS), default="bfws-f5")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--approx", action="store_true", help="use approximate novelty")
    p.add_argument("--control", action="store_true", help="enable open-list control")
    p.add_argument("--sample-size", type=_auto_int, default=None, metavar="N|auto")
    p.add_argument("--bloom-bits", type=_auto_int, default=None, metavar="N|auto")
    p.add_argument("--dmax", type=int, default=524288000, metavar="BYTES")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, metavar="SECS")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--plan-out", type=Path, help="plan file (default: stdout)")
    p.add_argument("--stats-out", type=Path, help="stats JSON (default: stderr)")
    p.add_argument("--no-duplicate-check", action="store_true")
    p.add_argument("--timing", action="store_true", help="include wall time in the stats")
    p.set_defaults(func=cmd_plan)

    s = sub.add_parser("suite", help="run a benchmark manifest")
    s.add_argument("--manifest", required=True, help="manifest JSON, or 'mini' for the bundled suite")
    s.add_argument("--configs", required=True, type=lambda t: [c for c in t.split(",") if c])
    s.add_argument("--seeds", required=True, type=_seed_list)
    s.add_argument("--out", required=True, type=Path)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--time-limit", type=float, metavar="SECS")
    s.add_argument("--timing", action="store_true", help="fill the time column")
    s.set_defaults(func=cmd_suite)

    a = sub.add_parser("accuracy", help="approximate vs exact novelty on recorded streams")
    a.add_argument("--manifest", required=True)
    a.add_argument("--delta", required=True, type=_float_list)
    a.add_argument("--arity-cap", type=int, choices=(1, 2, 3), default=3)
    a.add_argument("--bloom", choices=("on", "off", "both"), default="both")
    a.add_argument("--seeds", required=True, type=_seed_list)
    a.add_argument("--out", required=True, type=Path)
    a.add_argument("--detail-out", type=Path, help="per-state CSV (default: <out>.states.csv)")
    a.add_argument("--stream-limit", type=int, default=AccuracyConfig.stream_limit)
    a.add_argument("--instances", type=lambda t: [c for c in t.split(",") if c], help="subset of ids")
    a.set_defaults(func=cmd_accuracy)

    g = sub.add_parser("ground", help="write the grounded task in gstrips format")
    g.add_argument("--domain", type=Path, required=True)
    g.add_argument("--problem", type=Path, required=True)
    g.add_argument("--out", type=Path)
    g.set_defaults(func=cmd_ground)
    return parser


def _load_task(args):
    if args.gstrips:
        return read_ground_strips(args.gstrips.read_text())
    if not args.domain or not args.problem:
        raise UsageError("--domain and --problem are required unless --gstrips is given")
    return load_files(args.domain, args.problem)


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_plan(args) -> int:
    gp = _load_task(args)
    approx = ApproxConfig(sample_size=args.sample_size, bloom_bits=args.bloom_bits, dmax=args.dmax)
    config = config_from_name(args.planner)
    config = replace(
        config,
        approximate=config.approximate or args.approx,
        control=config.control or args.control,
        arity=args.arity,
        approx=approx,
        seed=args.seed,
        time_limit=args.time_limit,
        node_limit=args.node_limit,
        duplicate_check=not args.no_duplicate_check,
    )
    result = bfws(gp, config)
    if result.status == SOLVED:
        text = format_plan(gp, result.plan)
        if args.plan_out:
            args.plan_out.write_text(text)
        else:
            sys.stdout.write(text)
    else:
        log.warning("no plan: %s", result.status)
    stats = result.stats.to_dict(timing=args.timing)
    stats_text = _dump_json(stats)
    if args.stats_out:
        args.stats_out.write_text(stats_text)
    else:
        sys.stderr.write(stats_text)
    return EXIT_CODES[result.status]


def cmd_suite(args) -> int:
    instances = load_manifest(args.manifest)
    rows = run_suite(instances, args.configs, args.seeds, jobs=args.jobs, time_limit=args.time_limit)
    args.out.write_text(write_csv(suite_table(rows, timing=args.timing), SUITE_COLUMNS))
    bad = [r for r in rows if r.status == "error"]
    for r in bad:
        log.error("row %s/%s/%d: %s", r.instance, r.config, r.seed, r.error)
    return 0


def cmd_accuracy(args) -> int:
    modes = {"on": (True,), "off": (False,), "both": (False, True)}[args.bloom]
    cfg = AccuracyConfig(deltas=tuple(args.delta), arity_cap=args.arity_cap, bloom_modes=modes,
                         seeds=tuple(args.seeds), stream_limit=args.stream_limit)
    instances = load_manifest(args.manifest)
    if args.instances:
        instances = [i for i in instances if i.id in set(args.instances)]
    corpus = build_corpus(instances, cfg)
    summary, detail = run_accuracy(corpus, cfg)
    args.out.write_text(write_csv(summary, SUMMARY_COLUMNS))
    detail_path = args.detail_out or args.out.with_suffix(".states.csv")
    detail_path.write_text(write_csv(detail, DETAIL_COLUMNS))
    return 0


def cmd_ground(args) -> int:
    text = write_ground_strips(load_files(args.domain, args.problem))
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _setup_logging() -> None:
    level = os.environ.get("PLANNER_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, PDDLError, GStripsFormatError, OSError, ValueError) as exc:
        print(f"planner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
