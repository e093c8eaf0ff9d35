"""Acceptance criteria 1-10, each with its tolerance and runtime budget.

Every test records one PASS/FAIL line; the lines are printed at the end of
the pytest run (and directly when this file is executed as a script).
"""

import json
import logging
import math
import random
import time
from collections import Counter
from itertools import combinations

import pytest
from scipy.stats import chisquare

from conftest import fixture_paths, load_fixture
from oracles import bfs_plan_length, brute_stream
from noveltyplan.approx import ApproxConfig, ApproxNoveltyStore, BloomFilter, TupleSampler
from noveltyplan.cli import main as cli_main
from noveltyplan.error_model import error_probs
from noveltyplan.experiments import AccuracyConfig, build_corpus, correct_rate, load_manifest, run_accuracy, run_suite
from noveltyplan.search import EXHAUSTED, SOLVED, ControlState, average_cost, bfws, config_from_name, policy_mu
from noveltyplan.strips import validate_plan

RESULTS: dict[int, str] = {}


class Criterion:
    def __init__(self, num, title, budget):
        self.num, self.title, self.budget = num, title, budget

    def __enter__(self):
        self.start = time.perf_counter()
        RESULTS[self.num] = f"criterion {self.num:2d} FAIL  {self.title}"
        self.detail = ""
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        status = "PASS" if ok else "FAIL"
        RESULTS[self.num] = f"criterion {self.num:2d} {status}  {self.title}  ({elapsed:.1f}s) {self.detail}".rstrip()
        print(RESULTS[self.num])
        if exc_type is None:
            assert elapsed < self.budget, f"took {elapsed:.1f}s, budget {self.budget}s"
        return False


MINI_CONFIGS = ["exact-P2", "P2A", "P2AC", "pI-AC"]
SEEDS4 = [0, 1, 2, 3]


@pytest.fixture(scope="module")
def mini():
    return load_manifest("mini")


class TestAcceptance:
    def test_c01_exactness_reduction(self):
        with Criterion(1, "approximate store with full samples and exact sets equals the oracle", 30) as c:
            rng = random.Random(2024)
            checked = mismatches = 0
            for i in range(120):
                n_atoms = rng.randint(3, 12)
                arity = rng.randint(1, 3)
                keys = rng.randint(1, 4)
                stream = []
                for _ in range(rng.randint(20, 80)):
                    size = rng.randint(0, min(6, n_atoms))
                    stream.append((tuple(sorted(rng.sample(range(n_atoms), size))), rng.randrange(keys)))
                cfg = ApproxConfig(sample_size=math.comb(12, 6), storage="exact", exact_low_arity=False, seed=i)
                store = ApproxNoveltyStore(n_atoms, arity, cfg, partitions_bound=keys)
                got = [store.evaluate_and_register(a, k) for a, k in stream]
                want = brute_stream(stream, arity)
                checked += len(got)
                mismatches += sum(g != w for g, w in zip(got, want))
            c.detail = f"{checked} evaluations, {mismatches} mismatches"
            assert mismatches == 0

    def test_c02_error_components_sum_to_one(self):
        with Criterion(2, "P_L + P_H + P_C = 1 on random parameterizations", 5) as c:
            rng = random.Random(7)
            worst = 0.0
            for _ in range(10_000):
                levels = [rng.random() for _ in range(rng.randint(1, 6))]
                r = error_probs(levels, rng.randint(1, len(levels)))
                worst = max(worst, abs(r.P_L + r.P_H + r.P_C - 1.0))
            c.detail = f"max deviation {worst:.2e}"
            assert worst < 1e-9

    def test_c03_bloom_false_positive_rate(self):
        with Criterion(3, "Bloom false-positive rate r=65536, K=1, q=32768", 10) as c:
            expected = 1 - math.exp(-0.5)
            rates = []
            for seed in range(5):
                rng = random.Random(seed)
                pool = rng.sample(range(10**9), 32768 + 100_000)
                f = BloomFilter(65536, 1, seed=seed)
                for key in pool[:32768]:
                    f.add_key(key)
                rates.append(sum(f.contains_key(key) for key in pool[32768:]) / 100_000)
            c.detail = "rates " + " ".join(f"{r:.4f}" for r in rates)
            assert all(abs(r - expected) / expected <= 0.10 for r in rates)

    def test_c04_sampler_uniformity(self):
        with Criterion(4, "sampler chi-square uniformity, singletons and pairs", 10) as c:
            pvals = []
            for seed in range(10):
                sampler = TupleSampler(3, seed)
                for l in (1, 2):
                    atoms = tuple(range(8))
                    support = list(combinations(atoms, l))
                    counts = Counter()
                    for _ in range(4000):
                        got = sampler.sample(atoms, l)
                        assert len(got) == len(set(got)) == 3
                        counts.update(got)
                    pvals.append(chisquare([counts[t] for t in support]).pvalue)
            c.detail = f"min p {min(pvals):.4f}"
            assert min(pvals) > 0.001

    def test_c05_accuracy_trends(self, mini):
        with Criterion(5, "accuracy trends over sample size, with and without Bloom filters", 300) as c:
            cfg = AccuracyConfig(deltas=(0.25, 0.5, 1.0), arity_cap=3, seeds=tuple(range(10)))
            summary, _ = run_accuracy(build_corpus(mini, cfg), cfg)
            plain = [correct_rate(summary, False, d) for d in cfg.deltas]
            bloom = [correct_rate(summary, True, d) for d in cfg.deltas]
            w3 = correct_rate(summary, False, 1.0, w=3)
            c.detail = (f"no-Bloom {'/'.join(f'{x:.3f}' for x in plain)}; "
                        f"Bloom {'/'.join(f'{x:.3f}' for x in bloom)}; w=3 {w3:.3f}")
            assert all(a <= b + 0.05 for a, b in zip(plain, plain[1:])), "no-Bloom rate decreases"
            assert all(b <= a + 0.05 for a, b in zip(bloom, bloom[1:])), "Bloom rate increases"
            assert bloom[-1] < bloom[0], "Bloom trend is not reversed"
            assert w3 >= 0.5

    def test_c06_policy_optimality(self):
        with Criterion(6, "closed-form pruning policy is optimal on the grid", 5) as c:
            rng = random.Random(11)
            worst = -math.inf
            for _ in range(100):
                x = ControlState(rng.randint(1, 1000), Counter({w: rng.randint(0, 5000) for w in (2, 3)}))
                best = average_cost(x, {w: policy_mu(x, w) for w in (2, 3)})
                for m in range(100):
                    worst = max(worst, best - average_cost(x, {2: m / 100, 3: m / 100}))
                    for w in (2, 3):
                        mu = {v: policy_mu(x, v) for v in (2, 3)}
                        mu[w] = m / 100
                        worst = max(worst, best - average_cost(x, mu))
            c.detail = f"max excess {worst:.2e}"
            assert worst <= 1e-9

    def test_c07_planner_correctness(self, mini):
        with Criterion(7, "mini-suite solved by exact BFWS(f5) w=2 and pI-AC", 120) as c:
            rows = run_suite(mini, ["exact-P2", "pI-AC"], SEEDS4)
            unsolved = [(r.instance, r.config, r.seed) for r in rows if not (r.solved and r.valid)]
            chain = load_fixture("chain", "p01")
            chain_lengths = {r.plan_length for r in rows if r.instance == "chain-1"}
            two = load_fixture("twochains", "p01")
            one_status = bfws(two, config_from_name("p-P1")).status
            two_result = bfws(two, config_from_name("p-P2"))
            c.detail = f"{len(rows)} runs, {len(unsolved)} unsolved"
            assert not unsolved
            assert chain_lengths == {3} == {bfs_plan_length(chain)}
            assert one_status == EXHAUSTED
            assert two_result.status == SOLVED and validate_plan(two, two_result.plan).valid

    def test_c08_bound_instrumentation(self, mini):
        with Criterion(8, "no novelty-count bound violations on suite runs", 300) as c:
            violations = []
            runs = 0
            configs = MINI_CONFIGS + ["bfws-f5", "p-bfws", "bfws-a", "bfws-ac", "pi-ac"]
            bloom = ApproxConfig(storage="bloom", dmax=1 << 16)
            for inst in mini:
                gp = inst.load()
                for name in configs:
                    for seed in SEEDS4:
                        overrides = [{}]
                        if config_from_name(name).approximate:
                            overrides.append({"approx": bloom})
                        for extra in overrides:
                            st = bfws(gp, config_from_name(name, seed=seed, **extra)).stats
                            runs += 1
                            if not st.bounds_ok:
                                violations.append((inst.id, name, seed, st.count_bound_violations,
                                                   st.bank_bound_violations))
            c.detail = f"{runs} runs, {len(violations)} with violations"
            assert not violations

    def test_c09_determinism(self, tmp_path):
        with Criterion(9, "identical config and seed give byte-identical outputs", 60) as c:
            cases = [("gripper", "p05", "pi-ac"), ("blocksworld", "p06", "bfws-ac"), ("logistics", "p01", "bfws-a"),
                     ("twochains", "p01", "pi-ac")]
            for domain, problem, planner in cases:
                d, p = fixture_paths(domain, problem)
                blobs = []
                for rep in range(2):
                    plan, stats = tmp_path / f"plan{rep}", tmp_path / f"stats{rep}"
                    code = cli_main(["plan", "--domain", str(d), "--problem", str(p), "--planner", planner,
                                     "--seed", "5", "--plan-out", str(plan), "--stats-out", str(stats)])
                    assert code == 0
                    blobs.append((plan.read_bytes(), stats.read_bytes()))
                assert blobs[0] == blobs[1], f"{domain}/{problem} {planner} differs"
            c.detail = f"{len(cases)} cases"

    def test_c10_memory_budget(self, caplog):
        with Criterion(10, "novelty store stays within a 1 MB budget on gripper-6", 60) as c:
            caplog.set_level(logging.DEBUG, logger="noveltyplan.approx")
            gp = load_fixture("gripper", "p06")
            dmax = 1_000_000
            approx = ApproxConfig(dmax=dmax, storage="bloom", bloom_bits=1 << 20)
            result = bfws(gp, config_from_name("P2A", approx=approx))
            st = result.stats
            logged = [r for r in caplog.records if "shares bank slot" in r.getMessage()]
            c.detail = f"peak {st.peak_store_bytes} B, {st.bank_collisions} collisions, {len(logged)} logged"
            assert result.status == SOLVED
            assert st.peak_store_bytes <= dmax
            assert st.bank_collisions >= 1 and len(logged) == st.bank_collisions


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
