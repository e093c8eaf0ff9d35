"""Mini-benchmark suite and novelty-accuracy experiment.

Both produce plain CSV (comma separated, header row, ``.`` decimals, LF line
endings) whose content depends only on the configuration and the seeds.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .approx import ApproxConfig
from .error_model import CSV_COLUMNS, empirical_vs_analytic
from .gstrips import read_ground_strips
from .heuristics import RelaxedUnreachable, relevance_set
from .novelty import NoveltyMemoryError, estimate_table_bytes
from .pddl import load_files
from .search import BFWS, SOLVED, bfws, config_from_name
from .strips import GroundProblem, validate_plan

log = logging.getLogger(__name__)

BUILTIN_MANIFESTS = {"mini": "mini/manifest.json"}


@dataclass(frozen=True)
class Instance:
    id: str
    domain: str | None = None
    problem: str | None = None
    gstrips: str | None = None
    solvable: bool | None = None
    width: int | None = None

    def load(self) -> GroundProblem:
        if self.gstrips:
            gp = read_ground_strips(Path(self.gstrips).read_text())
        else:
            gp = load_files(self.domain, self.problem)
        return gp


def manifest_path(name: str) -> Path:
    if name in BUILTIN_MANIFESTS:
        return Path(str(resources.files("noveltyplan") / "data" / BUILTIN_MANIFESTS[name]))
    return Path(name)


def load_manifest(name: str) -> list[Instance]:
    """Read a suite manifest; ``"mini"`` names the bundled one.

    Format: ``{"version": 1, "instances": [{"id", "domain", "problem" | "gstrips",
    "solvable", "width"}]}`` with paths relative to the manifest file.
    """
    path = manifest_path(name)
    data = json.loads(path.read_text())
    if data.get("version") != 1:
        raise ValueError(f"{path}: unsupported manifest version {data.get('version')}")
    base = path.parent
    out = []
    for entry in data["instances"]:
        paths = {k: str(base / entry[k]) for k in ("domain", "problem", "gstrips") if entry.get(k)}
        out.append(Instance(entry["id"], solvable=entry.get("solvable"), width=entry.get("width"), **paths))
    return out


# -- suite -------------------------------------------------------------------------

SUITE_COLUMNS = (
    "row_type", "instance", "config", "seed", "status", "solved", "valid", "expanded", "generated",
    "plan_length", "plan_max_novelty", "time", "bounds_ok", "coverage_mean", "coverage_sd",
    "novelty_w", "novelty_fraction",
)


@dataclass
class SuiteRow:
    instance: str
    config: str
    seed: int
    status: str
    solved: bool
    valid: bool
    expanded: int
    generated: int
    plan_length: int | None
    plan_max_novelty: int | None
    time: float
    bounds_ok: bool
    error: str = ""


def run_one(instance: Instance, config_name: str, seed: int, time_limit: float | None = None,
            node_limit: int | None = None) -> SuiteRow:
    try:
        gp = instance.load()
        config = config_from_name(config_name, seed=seed, time_limit=time_limit, node_limit=node_limit)
        result = bfws(gp, config)
    except Exception as exc:  # recorded per row, the suite goes on
        log.error("%s/%s/%d failed: %s", instance.id, config_name, seed, exc)
        return SuiteRow(instance.id, config_name, seed, "error", False, False, 0, 0, None, None, 0.0,
                        False, str(exc))
    st = result.stats
    valid = result.plan is not None and validate_plan(gp, result.plan).valid
    return SuiteRow(
        instance.id, config_name, seed, result.status, result.status == SOLVED and valid, valid,
        st.expanded, st.generated, st.plan_length, st.plan_max_novelty, st.wall_time, st.bounds_ok,
    )


def _run_packed(args):
    return run_one(*args)


def run_suite(instances: Sequence[Instance], configs: Sequence[str], seeds: Sequence[int], jobs: int = 1,
              time_limit: float | None = None, node_limit: int | None = None) -> list[SuiteRow]:
    tasks = [(inst, cfg, seed, time_limit, node_limit) for inst in instances for cfg in configs for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_run_packed, tasks))
    else:
        rows = [_run_packed(t) for t in tasks]
    return sorted(rows, key=lambda r: (r.instance, r.config, r.seed))


def _fmt(x, digits: int = 4) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.{digits}f}"
    return str(x)


def _sd(values: list[float]) -> float:
    return statistics.stdev(values) if len(values) > 1 else 0.0


def suite_table(rows: Sequence[SuiteRow], timing: bool = False) -> list[dict]:
    """Per-run rows, then per (instance, config) and per-config aggregates."""
    table = []
    for r in rows:
        table.append({
            "row_type": "run", "instance": r.instance, "config": r.config, "seed": r.seed,
            "status": r.status, "solved": r.solved, "valid": r.valid, "expanded": r.expanded,
            "generated": r.generated, "plan_length": r.plan_length, "plan_max_novelty": r.plan_max_novelty,
            "time": r.time if timing else None, "bounds_ok": r.bounds_ok,
        })
    configs = sorted({r.config for r in rows})
    instances = sorted({r.instance for r in rows})
    for inst in instances:
        for cfg in configs:
            sel = [r for r in rows if r.instance == inst and r.config == cfg]
            if sel:
                solved = [float(r.solved) for r in sel]
                table.append({"row_type": "instance-mean", "instance": inst, "config": cfg,
                              "coverage_mean": statistics.fmean(solved), "coverage_sd": _sd(solved),
                              "expanded": round(statistics.fmean(r.expanded for r in sel), 2)})
    for cfg in configs:
        sel = [r for r in rows if r.config == cfg]
        seeds = sorted({r.seed for r in sel})
        per_seed = [sum(r.solved for r in sel if r.seed == s) / len(instances) for s in seeds]
        table.append({"row_type": "coverage", "instance": "ALL", "config": cfg,
                      "coverage_mean": statistics.fmean(per_seed), "coverage_sd": _sd(per_seed),
                      "bounds_ok": all(r.bounds_ok for r in sel)})
        solved = [r for r in sel if r.solved]
        for w in sorted({r.plan_max_novelty for r in solved if r.plan_max_novelty is not None}):
            frac = sum(r.plan_max_novelty == w for r in solved) / len(solved)
            table.append({"row_type": "plan-novelty", "instance": "ALL", "config": cfg,
                          "novelty_w": w, "novelty_fraction": frac})
    return table


def write_csv(table: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in table:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


# -- accuracy experiment -----------------------------------------------------------


@dataclass
class AccuracyConfig:
    """Settings of the novelty-accuracy experiment.

    ``deltas`` scale the sample size ``|F|``. Without Bloom filters tuples are
    stored exactly; with them every arity goes through ``r = bloom_factor *
    |F|`` bit filters, fixed across ``deltas``. Streams are the first
    ``stream_limit`` states generated by an exact search at ``arity_cap``.
    """

    deltas: tuple[float, ...] = (0.25, 0.5, 1.0)
    arity_cap: int = 3
    bloom_modes: tuple[bool, ...] = (False, True)
    seeds: tuple[int, ...] = tuple(range(10))
    stream_limit: int = 400
    bloom_factor: float = 1.0
    oracle_memory_cap: int = 1 << 28

    def __post_init__(self):
        if not 1 <= self.arity_cap <= 3:
            raise ValueError("arity cap must be 1, 2 or 3 for the exact oracle")


@dataclass
class ReplayStream:
    instance: str
    num_atoms: int
    partitions_bound: int
    states: list = field(default_factory=list)


def record_stream(gp: GroundProblem, arity: int, limit: int) -> ReplayStream:
    """States and partition keys of an exact unpruned search, in generation order.

    The search keeps going past goal states until ``limit`` states exist or
    the space is exhausted.
    """
    rel = relevance_set(gp)
    config = config_from_name("bfws-f5", arity=arity, node_limit=limit)
    engine = BFWS(gp, config, rel, record=True, stop_at_goal=False)
    engine.run()
    return ReplayStream(gp.name, gp.num_atoms, engine.partitions_bound, engine.stream)


def build_corpus(instances: Sequence[Instance], cfg: AccuracyConfig) -> list[ReplayStream]:
    corpus = []
    for inst in instances:
        try:
            gp = inst.load()
            need = estimate_table_bytes(gp.num_atoms, cfg.arity_cap, 1)
            if need > cfg.oracle_memory_cap:
                raise NoveltyMemoryError(f"oracle needs {need} bytes")
            stream = record_stream(gp, cfg.arity_cap, cfg.stream_limit)
        except (NoveltyMemoryError, RelaxedUnreachable) as exc:
            log.warning("skipping %s: %s", inst.id, exc)
            continue
        stream.instance = inst.id
        corpus.append(stream)
    return corpus


SUMMARY_COLUMNS = ("instance", "bloom", "delta", "w", "n", "correct", "lower", "higher", "P_C", "P_L", "P_H")
DETAIL_COLUMNS = ("instance", "bloom", "delta") + CSV_COLUMNS


def approx_config_for(stream: ReplayStream, delta: float, bloom: bool, cfg: AccuracyConfig) -> ApproxConfig:
    f = stream.num_atoms
    return ApproxConfig(
        sample_size=max(1, round(delta * f)),
        bloom_bits=max(8, round(cfg.bloom_factor * f)),
        storage="bloom" if bloom else "exact",
        exact_low_arity=False,
    )


def run_accuracy(corpus: Sequence[ReplayStream], cfg: AccuracyConfig) -> tuple[list[dict], list[dict]]:
    """Returns (summary rows, per-state rows).

    Summary rates are computed per seed and averaged over seeds; the
    ``instance == "ALL"`` rows pool every stream of the corpus.
    """
    summary, detail = [], []
    for bloom in cfg.bloom_modes:
        for delta in cfg.deltas:
            per_seed: dict[tuple[str, str], list[dict]] = {}
            for stream in corpus:
                comp = empirical_vs_analytic(
                    stream.states, approx_config_for(stream, delta, bloom, cfg), cfg.arity_cap,
                    stream.num_atoms, cfg.seeds, stream.partitions_bound,
                )
                for o, row in zip(comp.outcomes, comp.rows()):
                    detail.append(dict(zip(DETAIL_COLUMNS, (stream.instance, int(bloom), delta) + row)))
                for seed in cfg.seeds:
                    sel = [o for o in comp.outcomes if o.seed == seed]
                    per_seed.setdefault((stream.instance, seed), []).extend(sel)
                    per_seed.setdefault(("ALL", seed), []).extend(sel)
            for inst in [s.instance for s in corpus] + ["ALL"]:
                for w in ["all"] + list(range(1, cfg.arity_cap + 2)):
                    rates = []
                    for seed in cfg.seeds:
                        outs = [o for o in per_seed.get((inst, seed), []) if w == "all" or o.w == w]
                        if outs:
                            rates.append(_rates(outs))
                    if not rates:
                        continue
                    row = {"instance": inst, "bloom": int(bloom), "delta": delta, "w": w,
                           "n": rates[0]["n"]}
                    for k in ("correct", "lower", "higher", "P_C", "P_L", "P_H"):
                        row[k] = statistics.fmean(r[k] for r in rates)
                    summary.append(row)
    return summary, detail


def _rates(outs) -> dict:
    n = len(outs)
    return {
        "n": n,
        "correct": sum(o.w_hat == o.w for o in outs) / n,
        "lower": sum(o.w_hat < o.w for o in outs) / n,
        "higher": sum(o.w_hat > o.w for o in outs) / n,
        "P_C": sum(o.report.P_C for o in outs) / n,
        "P_L": sum(o.report.P_L for o in outs) / n,
        "P_H": sum(o.report.P_H for o in outs) / n,
    }


def correct_rate(summary: Sequence[dict], bloom: bool, delta: float, w="all", instance: str = "ALL") -> float:
    for row in summary:
        if (row["instance"], row["bloom"], row["delta"], row["w"]) == (instance, int(bloom), delta, w):
            return row["correct"]
    raise KeyError((instance, bloom, delta, w))
