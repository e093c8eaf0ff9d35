"""Best-first width search with novelty pruning and open-list control.

Nodes are ordered by ``(w, #g)`` with generation order as the final
tie-break. Each novelty category has its own heap and the lowest non-empty
one is always served first. Under open-list control a successor of novelty
``w >= 2`` is dropped with probability ``policy_mu``; a node that lost
successors this way waits in a holding queue and gets its deferred
successors re-drawn when every open list is empty.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
import re
import time
from collections import Counter, deque
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

from .approx import ApproxConfig, ApproxNoveltyStore, _mix64
from .combin import binom
from .heuristics import (
    PathRelevance,
    RelaxedUnreachable,
    RelevanceSet,
    extend_path_relevance,
    goal_count,
    relevance_set,
)
from .novelty import NoveltyMemoryError, NoveltyTable
from .strips import GroundProblem, state_atoms, validate_plan

log = logging.getLogger(__name__)

STATS_SCHEMA_VERSION = 1

SOLVED = "solved"
EXHAUSTED = "exhausted"
RESOURCE_LIMIT = "resource-limit"
UNSOLVABLE = "unsolvable"


# -- open-list control ------------------------------------------------------


@dataclass
class ControlState:
    n_e: int = 0
    n_v: Counter = field(default_factory=Counter)


def policy_mu(x: ControlState, w: int) -> float:
    """Pruning probability for a successor of novelty ``w``.

    Minimiser of the average stage cost: ``1 - sqrt(n_e / n_v(w))`` while the
    category produces more novel states than there are expansions, else 0.
    Novelty-1 successors are never pruned.
    """
    if w <= 1:
        return 0.0
    n_v = x.n_v.get(w, 0)
    if n_v <= 0 or x.n_e >= n_v:
        return 0.0
    return 1.0 - math.sqrt(x.n_e / n_v)


def stage_cost(mu: Sequence[float], c: Sequence[float]) -> float:
    """Per-expansion cost: queued successors plus inverse generation rate."""
    total = 0.0
    for m, cw in zip(mu, c):
        if not 0.0 <= m < 1.0:
            raise ValueError("pruning rates must lie in [0, 1)")
        total += cw * (1.0 - m) + 1.0 / (1.0 - m)
    return total


def average_cost(x: ControlState, mu: dict[int, float]) -> float:
    """Stationary average cost with ``E[c^w] = n_v(w) / n_e``."""
    ws = sorted(mu)
    return stage_cost([mu[w] for w in ws], [x.n_v.get(w, 0) / x.n_e for w in ws])


# -- configuration -----------------------------------------------------------


@dataclass
class PlannerConfig:
    """Variant flags and limits.

    ``prune`` drops successors whose novelty exceeds ``arity``; ``iterate``
    reruns pruned searches with arity 1, 2, ... up to ``max_arity``
    (default ``|F|``); ``approximate`` swaps the exact novelty table for the
    sampled store; ``control`` turns on open-list control.
    """

    prune: bool = False
    iterate: bool = False
    approximate: bool = False
    control: bool = False
    arity: int = 2
    approx: ApproxConfig = field(default_factory=ApproxConfig)
    seed: int = 0
    time_limit: float | None = None
    node_limit: int | None = None
    duplicate_check: bool = True
    max_arity: int | None = None
    exact_memory_cap: int = 1 << 30

    def __post_init__(self):
        if self.iterate and not self.prune:
            raise ValueError("iterated search requires pruning")
        if self.arity < 1:
            raise ValueError("arity must be >= 1")


PLANNERS = {
    "bfws-f5": {},
    "p-bfws": {"prune": True},
    "bfws-a": {"approximate": True},
    "bfws-ac": {"approximate": True, "control": True},
    "pi-ac": {"prune": True, "iterate": True, "approximate": True, "control": True},
}

_NAME_RE = re.compile(r"^(?P<exact>exact-)?(?P<p>p)?(?P<i>I)?-?(?:P(?P<arity>\d+))?(?P<flags>A?C?)$")


def config_from_name(name: str, **overrides) -> PlannerConfig:
    """Build a config from a planner name.

    Accepts the CLI names (``bfws-f5``, ``pi-ac``, ...) and the compact
    family notation: optional ``p`` (prune), ``I`` (iterate), ``P<N>``
    (arity N), then ``A`` (approximate) and ``C`` (control), e.g. ``P2AC``,
    ``pI-AC``, ``exact-P2``, ``p-P1``.
    """
    if name in PLANNERS:
        return PlannerConfig(**{**PLANNERS[name], **overrides})
    m = _NAME_RE.match(name)
    if not m or name in ("", "exact-"):
        raise ValueError(f"unknown planner configuration {name!r}")
    opts = {
        "prune": bool(m["p"]) or bool(m["i"]),
        "iterate": bool(m["i"]),
        "approximate": "A" in m["flags"],
        "control": "C" in m["flags"],
    }
    if m["exact"] and opts["approximate"]:
        raise ValueError(f"{name!r} is both exact and approximate")
    if m["arity"]:
        opts["arity"] = int(m["arity"])
    return PlannerConfig(**{**opts, **overrides})


# -- statistics ----------------------------------------------------------------


@dataclass
class RunStats:
    status: str = ""
    expanded: int = 0
    reexpanded: int = 0
    generated: int = 0
    duplicates: int = 0
    pruned_bound: int = 0
    control_deferred: int = 0
    novelty_counts: dict[int, int] = field(default_factory=dict)
    queued_by_w: dict[int, int] = field(default_factory=dict)
    count_bound: dict[int, int] = field(default_factory=dict)
    count_bound_loose: dict[int, int] = field(default_factory=dict)
    count_bound_violations: list[int] = field(default_factory=list)
    bank_bound: int | None = None
    bank_bound_violations: list[int] = field(default_factory=list)
    open_at_end: int = 0
    deferred_at_end: int = 0
    plan_length: int | None = None
    plan_max_novelty: int | None = None
    arity: int = 0
    peak_store_bytes: int = 0
    partitions: int = 0
    bank_collisions: int = 0
    relevance_size: int = 0
    seed: int = 0
    wall_time: float = 0.0
    iterations: list[dict] = field(default_factory=list)
    instance: str = ""
    config: dict = field(default_factory=dict)
    schema_version: int = STATS_SCHEMA_VERSION

    def to_dict(self, timing: bool = False) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, dict) and f.name != "config":
                value = {str(k): v for k, v in sorted(value.items())}
            out[f.name] = value
        if not timing:
            out.pop("wall_time")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunStats":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown RunStats fields: {sorted(unknown)}")
        if data.get("schema_version", STATS_SCHEMA_VERSION) != STATS_SCHEMA_VERSION:
            raise ValueError(f"unsupported stats schema {data['schema_version']}")
        kwargs = dict(data)
        for name in ("novelty_counts", "queued_by_w", "count_bound", "count_bound_loose"):
            if name in kwargs:
                kwargs[name] = {int(k): v for k, v in kwargs[name].items()}
        return cls(**kwargs)

    @property
    def bounds_ok(self) -> bool:
        return not self.count_bound_violations and not self.bank_bound_violations


@dataclass
class SearchResult:
    status: str
    plan: list[int] | None
    stats: RunStats


class _Node:
    __slots__ = ("state", "parent", "action", "e", "g", "rel", "w")

    def __init__(self, state, parent, action, e, g, rel, w=0):
        self.state = state
        self.parent = parent
        self.action = action
        self.e = e
        self.g = g
        self.rel = rel
        self.w = w


class _ResourceLimit(Exception):
    pass


def _iteration_seed(seed: int, arity: int) -> int:
    return _mix64(seed * 1_000_003 + arity) & 0x7FFFFFFF


class BFWS:
    """One best-first width search over a ground problem.

    Owns its novelty store, open lists, holding queue, duplicate set and
    control state; nothing is shared between instances.
    """

    def __init__(self, gp: GroundProblem, config: PlannerConfig, relevance: RelevanceSet,
                 arity: int | None = None, deadline: float | None = None, debug: bool = False,
                 record: bool = False, stop_at_goal: bool = True):
        self.gp = gp
        self.config = config
        self.rel = relevance
        self.arity = arity or config.arity
        self.deadline = deadline
        self.debug = debug
        self.stop_at_goal = stop_at_goal
        self.seed = _iteration_seed(config.seed, self.arity)
        self.rng = random.Random(self.seed)
        self.partitions_bound = (len(gp.goal) + 1) * (len(relevance) + 1)
        if config.approximate:
            self.store = ApproxNoveltyStore(
                gp.num_atoms, self.arity, replace(config.approx, seed=self.seed), self.partitions_bound
            )
        else:
            self.store = NoveltyTable(self.arity, gp.num_atoms, self.partitions_bound, config.exact_memory_cap)
        self.control = ControlState()
        self.stats = RunStats(arity=self.arity, seed=config.seed, relevance_size=len(relevance))
        self.trace: list[tuple[int, int, int]] = []
        # (true atoms, partition key) of every evaluated state, in generation order
        self.stream: list[tuple[tuple[int, ...], tuple[int, int]]] | None = [] if record else None
        self._open: list[list] = [[] for _ in range(self.arity + 1)]
        self._holding: deque = deque()
        self._seen: set[int] = set()
        self._e = 0

    # node bookkeeping

    def _make(self, state, parent, action) -> _Node:
        limit = self.config.node_limit
        if limit is not None and self.stats.generated >= limit:
            raise _ResourceLimit
        rel = (PathRelevance.initial(state, self.rel) if parent is None
               else extend_path_relevance(parent.rel, state, self.rel))
        node = _Node(state, parent, action, self._e, goal_count(self.gp, state), rel)
        self._e += 1
        atoms = state_atoms(state)
        node.w = self.store.evaluate_and_register(atoms, (node.g, rel.count))
        if self.stream is not None:
            self.stream.append((atoms, (node.g, rel.count)))
        self.stats.generated += 1
        self.control.n_v[node.w] += 1
        return node

    def _push(self, node: _Node) -> None:
        heapq.heappush(self._open[node.w - 1], (node.g, node.e, node))
        self.stats.queued_by_w[node.w] = self.stats.queued_by_w.get(node.w, 0) + 1

    def _pop(self) -> _Node | None:
        for q in self._open:
            if q:
                item = heapq.heappop(q)
                if self.debug:
                    for other in self._open:
                        if other:
                            assert (item[2].w, item[0], item[1]) <= (other[0][2].w, other[0][0], other[0][1])
                return item[2]
        return None

    def _check_limits(self) -> None:
        if self.deadline is not None and time.perf_counter() >= self.deadline:
            raise _ResourceLimit
        limit = self.config.node_limit
        if limit is not None and self.stats.generated >= limit:
            raise _ResourceLimit

    def _admit(self, node: _Node) -> bool:
        if self.config.control:
            mu = policy_mu(self.control, node.w)
            if mu > 0.0 and self.rng.random() < mu:
                return False
        return True

    def expand(self, node: _Node) -> list[_Node]:
        """Generate, evaluate and admit the successors of ``node``."""
        gp = self.gp
        self.stats.expanded += 1
        self.control.n_e += 1
        state = node.state
        admitted, deferred = [], []
        for a, act in enumerate(gp.actions):
            if state & act.pre_mask != act.pre_mask:
                continue
            succ = (state & ~act.del_mask) | act.add_mask
            if self.config.duplicate_check:
                if succ in self._seen:
                    self.stats.duplicates += 1
                    continue
                self._seen.add(succ)
            child = self._make(succ, node, a)
            if self.config.prune and child.w > self.arity:
                self.stats.pruned_bound += 1
                continue
            if self._admit(child):
                self._push(child)
                admitted.append(child)
            else:
                self.stats.control_deferred += 1
                deferred.append(child)
        if deferred:
            self._holding.append((node, deferred))
        return admitted

    def _reexpand(self) -> None:
        node, deferred = self._holding.popleft()
        self.stats.reexpanded += 1
        self.control.n_e += 1
        keep = []
        for child in deferred:
            if self._admit(child):
                self._push(child)
            else:
                keep.append(child)
        if keep:
            self._holding.append((node, keep))

    def run(self) -> SearchResult:
        gp = self.gp
        status, goal_node = EXHAUSTED, None
        try:
            self._check_limits()
            self._seen.add(gp.init)
            root = self._make(gp.init, None, None)
            self._push(root)
            while True:
                self._check_limits()
                node = self._pop()
                if node is None:
                    if self._holding:
                        self._reexpand()
                        continue
                    break
                if self.debug:
                    self.trace.append((node.w, node.g, node.e))
                if self.stop_at_goal and gp.is_goal(node.state):
                    status, goal_node = SOLVED, node
                    break
                self.expand(node)
        except _ResourceLimit:
            status = RESOURCE_LIMIT
        return self._finish(status, goal_node)

    def _finish(self, status: str, goal_node: _Node | None) -> SearchResult:
        st = self.stats
        st.status = status
        st.open_at_end = sum(len(q) for q in self._open)
        st.deferred_at_end = sum(len(d) for _, d in self._holding)
        self._fill_bounds()
        plan = None
        if goal_node is not None:
            plan, ws = [], []
            node = goal_node
            while node.parent is not None:
                plan.append(node.action)
                ws.append(node.w)
                node = node.parent
            plan.reverse()
            st.plan_length = len(plan)
            st.plan_max_novelty = max(ws, default=0)
        return SearchResult(status, plan, st)

    def _fill_bounds(self) -> None:
        st, gp = self.stats, self.gp
        nf = gp.num_atoms
        st.novelty_counts = {w: self.store.count_novel(w) for w in range(1, self.arity + 2)
                             if self.store.count_novel(w)}
        for w in range(1, self.arity + 1):
            st.count_bound[w] = binom(nf, w) * self.partitions_bound
            st.count_bound_loose[w] = binom(nf, w) * len(gp.goal) * nf
            if self.store.count_novel(w) > st.count_bound[w]:
                st.count_bound_violations.append(w)
        if isinstance(self.store, ApproxNoveltyStore):
            st.peak_store_bytes = self.store.peak_bytes
            st.bank_collisions = self.store.collisions
            bank = self.store.bank
            if bank is not None:
                st.bank_bound = bank.num_slots * bank.bits
                for w in bank.levels:
                    if self.store.count_novel(w) > st.bank_bound:
                        st.bank_bound_violations.append(w)
            st.partitions = (bank.partitions_seen if bank is not None
                             else len({k for lv in self.store._levels for k in getattr(lv, "_store", {})}))
        else:
            st.peak_store_bytes = self.store.stored_tuples() * 72
            st.partitions = self.store.partitions


def _config_echo(config: PlannerConfig) -> dict:
    out = {f.name: getattr(config, f.name) for f in fields(config) if f.name != "approx"}
    out["approx"] = dict(config.approx.__dict__)
    return out


def _unsolvable_result(gp: GroundProblem, config: PlannerConfig) -> SearchResult:
    stats = RunStats(status=UNSOLVABLE, seed=config.seed, instance=gp.name, config=_config_echo(config))
    return SearchResult(UNSOLVABLE, None, stats)


def bfws(gp: GroundProblem, config: PlannerConfig, debug: bool = False) -> SearchResult:
    """Run the configured planner on ``gp``; dispatches to the iterated driver."""
    if config.iterate:
        return iterative_driver(gp, config)
    start = time.perf_counter()
    deadline = start + config.time_limit if config.time_limit is not None else None
    if gp.unsolvable:
        return _unsolvable_result(gp, config)
    try:
        rel = relevance_set(gp)
    except RelaxedUnreachable:
        return _unsolvable_result(gp, config)
    try:
        engine = BFWS(gp, config, rel, deadline=deadline, debug=debug)
    except NoveltyMemoryError as exc:
        log.error("%s", exc)
        stats = RunStats(status=RESOURCE_LIMIT, seed=config.seed)
        result = SearchResult(RESOURCE_LIMIT, None, stats)
    else:
        result = engine.run()
    result.stats.wall_time = time.perf_counter() - start
    result.stats.instance = gp.name
    result.stats.config = _config_echo(config)
    return result


def iterative_driver(gp: GroundProblem, config: PlannerConfig) -> SearchResult:
    """Pruned searches with arity 1, 2, ... each from scratch, until a plan is found."""
    if not config.iterate:
        raise ValueError("config.iterate is not set")
    start = time.perf_counter()
    deadline = start + config.time_limit if config.time_limit is not None else None
    if gp.unsolvable:
        return _unsolvable_result(gp, config)
    try:
        rel = relevance_set(gp)
    except RelaxedUnreachable:
        return _unsolvable_result(gp, config)
    top = config.max_arity or max(1, gp.num_atoms)
    total = RunStats(seed=config.seed, relevance_size=len(rel))
    result = None
    status = EXHAUSTED
    for arity in range(1, top + 1):
        limit = None
        if config.node_limit is not None:
            limit = config.node_limit - total.generated
            if limit <= 0:
                status = RESOURCE_LIMIT
                break
        sub = replace(config, iterate=False, arity=arity, node_limit=limit)
        try:
            engine = BFWS(gp, sub, rel, deadline=deadline)
        except NoveltyMemoryError as exc:
            log.error("%s", exc)
            status = RESOURCE_LIMIT
            break
        result = engine.run()
        st = result.stats
        total.iterations.append({
            "arity": arity, "status": st.status, "expanded": st.expanded, "generated": st.generated,
            "reexpanded": st.reexpanded, "control_deferred": st.control_deferred,
            "pruned_bound": st.pruned_bound, "plan_length": st.plan_length,
        })
        for name in ("expanded", "reexpanded", "generated", "duplicates", "pruned_bound", "control_deferred"):
            setattr(total, name, getattr(total, name) + getattr(st, name))
        total.count_bound_violations += [w for w in st.count_bound_violations if w not in total.count_bound_violations]
        total.bank_bound_violations += [w for w in st.bank_bound_violations
                                        if w not in total.bank_bound_violations]
        total.peak_store_bytes = max(total.peak_store_bytes, st.peak_store_bytes)
        total.bank_collisions += st.bank_collisions
        log.info("iteration arity=%d: %s after %d expansions", arity, st.status, st.expanded)
        status = st.status
        if st.status in (SOLVED, RESOURCE_LIMIT):
            break
    plan = result.plan if result is not None and status == SOLVED else None
    if result is not None:
        last = result.stats
        for name in ("novelty_counts", "queued_by_w", "count_bound", "count_bound_loose",
                     "bank_bound", "open_at_end", "deferred_at_end", "plan_length",
                     "plan_max_novelty", "arity", "partitions"):
            setattr(total, name, getattr(last, name))
    total.status = status
    total.wall_time = time.perf_counter() - start
    total.instance = gp.name
    total.config = _config_echo(config)
    return SearchResult(status, plan, total)


def check_plan(gp: GroundProblem, plan: Sequence[int]) -> bool:
    return validate_plan(gp, plan).valid
