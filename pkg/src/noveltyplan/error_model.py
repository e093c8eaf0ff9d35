"""Probabilistic model of approximate-novelty errors and its empirical check.

The analytic side gives, per state, the probability that the approximate
novelty is lower than, equal to or higher than the exact one, treating
distinct tuples as independent. :func:`empirical_vs_analytic` replays a fixed
stream of (state, partition) pairs through seeded approximate stores and
pairs the observed outcomes with those probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .approx import ApproxConfig, ApproxNoveltyStore
from .combin import binom
from .novelty import NoveltyTable

CSV_COLUMNS = ("seed", "state_index", "w", "w_hat", "P_L", "P_C", "P_H")


def bloom_fp(k: int, q: float, r: int) -> float:
    """False-positive probability of an ``r``-bit filter holding ``q`` items with ``k`` hashes."""
    return (1.0 - math.exp(-k * q / r)) ** k


@dataclass(frozen=True)
class SamplingScenario:
    """Sampling situation of one tuple at one level.

    ``z`` is the sample size, ``beta_s`` the number of level-l tuples of the
    evaluated state and ``prior_beta_sizes`` the same count for every earlier
    state of the partition that contains the tuple.
    """

    z: int
    beta_s: int
    prior_beta_sizes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.z < 1 or self.beta_s < 1 or any(b < 1 for b in self.prior_beta_sizes):
            raise ValueError("sizes must be >= 1")


def gamma_t(scenario: SamplingScenario, fp: float = 0.0) -> float:
    """Probability the tuple is sampled now and was never sampled before.

    ``fp`` multiplies in ``1 - P_f`` for Bloom-backed storage. Inclusion
    probabilities are clipped at 1 when the sample covers the population.
    """
    log_miss = 0.0
    for b in scenario.prior_beta_sizes:
        incl = min(1.0, scenario.z / b)
        if incl >= 1.0:
            return 0.0
        log_miss += math.log1p(-incl)
    return math.exp(log_miss) * min(1.0, scenario.z / scenario.beta_s) * (1.0 - fp)


def p_level(gammas: Iterable[float]) -> float:
    """Probability that no tuple of the level is found new."""
    out = 1.0
    for g in gammas:
        out *= 1.0 - g
    return out


@dataclass(frozen=True)
class ErrorReport:
    P_H: float
    P_L: float
    P_C: float
    p_levels: tuple[float, ...] = ()

    @property
    def P_error(self) -> float:
        return self.P_L + self.P_H


def error_probs(p_levels: Sequence[float], w: int) -> ErrorReport:
    """Higher/lower/correct probabilities for a state of true novelty ``w``.

    ``p_levels[i]`` is the no-new-tuple probability of level ``i + 1``.
    """
    if w < 1 or len(p_levels) < w:
        raise ValueError("p_levels must cover levels 1..w")
    prefix = math.prod(p_levels[: w - 1])
    return ErrorReport(
        P_H=prefix * p_levels[w - 1],
        P_L=1.0 - prefix,
        P_C=prefix * (1.0 - p_levels[w - 1]),
        p_levels=tuple(p_levels[:w]),
    )


Stream = Sequence[tuple[Sequence[int], Hashable]]


class _AnalyticTracker:
    """Incremental ``prod (1 - z/|beta|)`` per (partition, level, tuple) along a stream."""

    def __init__(self, arity: int, sample_size: int, exhaustive: Sequence[bool] = ()):
        self.arity = arity
        self.z = sample_size
        self.exhaustive = tuple(exhaustive) or (False,) * arity
        self._miss: dict[tuple[Hashable, int], dict[tuple, float]] = {}
        self._inserted: dict[tuple[Hashable, int], int] = {}

    def _incl(self, l: int, beta: int) -> float:
        return 1.0 if self.exhaustive[l - 1] else min(1.0, self.z / beta)

    def report(self, atoms: tuple[int, ...], key: Hashable, w: int, fp_of=None) -> ErrorReport:
        m = len(atoms)
        p_levels = []
        for l in range(1, self.arity + 1):
            beta = binom(m, l)
            miss = self._miss.get((key, l), {})
            if beta == 0:
                p_levels.append(1.0)
                continue
            incl = self._incl(l, beta)
            fp = fp_of(key, l) if fp_of else 0.0
            p = 1.0
            for t in combinations(atoms, l):
                p *= 1.0 - miss.get(t, 1.0) * incl * (1.0 - fp)
            p_levels.append(p)
        # a state with no new tuple up to the cap sits in the top category:
        # the approximation cannot exceed it
        p_levels.append(0.0)
        return error_probs(p_levels, w)

    def register(self, atoms: tuple[int, ...], key: Hashable) -> None:
        m = len(atoms)
        for l in range(1, self.arity + 1):
            beta = binom(m, l)
            if beta == 0:
                continue
            keep = 1.0 - self._incl(l, beta)
            miss = self._miss.setdefault((key, l), {})
            for t in combinations(atoms, l):
                miss[t] = miss.get(t, 1.0) * keep
            drawn = beta if self.exhaustive[l - 1] else min(self.z, beta)
            self._inserted[(key, l)] = self._inserted.get((key, l), 0) + drawn

    def expected_inserted(self, key: Hashable, l: int) -> int:
        return self._inserted.get((key, l), 0)


@dataclass
class StateOutcome:
    seed: int
    state_index: int
    w: int
    w_hat: int
    report: ErrorReport

    def row(self) -> tuple:
        r = self.report
        return (self.seed, self.state_index, self.w, self.w_hat,
                f"{r.P_L:.6f}", f"{r.P_C:.6f}", f"{r.P_H:.6f}")


@dataclass
class Comparison:
    outcomes: list[StateOutcome] = field(default_factory=list)
    note: str = ("analytic probabilities assume tuples are independent; "
                 "deviations on correlated streams are expected")

    def rates(self, w: int | None = None, seed: int | None = None) -> dict[str, float]:
        sel = [o for o in self.outcomes
               if (w is None or o.w == w) and (seed is None or o.seed == seed)]
        n = len(sel)
        if not n:
            return {"n": 0, "correct": math.nan, "lower": math.nan, "higher": math.nan,
                    "P_C": math.nan, "P_L": math.nan, "P_H": math.nan}
        return {
            "n": n,
            "correct": sum(o.w_hat == o.w for o in sel) / n,
            "lower": sum(o.w_hat < o.w for o in sel) / n,
            "higher": sum(o.w_hat > o.w for o in sel) / n,
            "P_C": sum(o.report.P_C for o in sel) / n,
            "P_L": sum(o.report.P_L for o in sel) / n,
            "P_H": sum(o.report.P_H for o in sel) / n,
        }

    def rows(self) -> list[tuple]:
        return [o.row() for o in self.outcomes]


def exact_novelties(stream: Stream, arity: int) -> list[int]:
    table = NoveltyTable(arity)
    return [table.evaluate_and_register(atoms, key) for atoms, key in stream]


def empirical_vs_analytic(stream: Stream, config: ApproxConfig, arity: int, num_atoms: int,
                          seeds: Sequence[int], partitions_bound: int = 1) -> Comparison:
    """Replay ``stream`` once per seed and pair observed outcomes with the model.

    ``config.seed`` is overridden by each trial seed. The analytic overlay
    uses the configured sample size; in Bloom mode ``P_f`` is evaluated with
    the tuples inserted so far into the partition as ``q``.
    """
    if arity > 3:
        raise ValueError("the exact oracle is limited to arity 3")
    stream = [(tuple(sorted(atoms)), key) for atoms, key in stream]
    exact = exact_novelties(stream, arity)
    sample_size = config.sample_size or max(1, num_atoms)
    comparison = Comparison()
    for seed in seeds:
        cfg = ApproxConfig(**{**config.__dict__, "seed": seed})
        store = ApproxNoveltyStore(num_atoms, arity, cfg, partitions_bound)
        tracker = _AnalyticTracker(arity, sample_size, store.exhaustive)
        fp_of = None
        if store.bank is not None:
            bank = store.bank

            def fp_of(key, l, bank=bank, tracker=tracker):
                if l not in bank.ks:
                    return 0.0
                return bloom_fp(bank.ks[l], tracker.expected_inserted(key, l), bank.bits)

        for idx, ((atoms, key), w) in enumerate(zip(stream, exact)):
            report = tracker.report(atoms, key, w, fp_of)
            w_hat = store.evaluate_and_register(atoms, key)
            tracker.register(atoms, key)
            comparison.outcomes.append(StateOutcome(seed, idx, w, w_hat, report))
    return comparison
