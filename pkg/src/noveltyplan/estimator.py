"""scikit-learn style wrapper around the planner.

``fit`` takes a grounded problem (or a ``(domain_path, problem_path)`` pair)
and searches; results land in trailing-underscore attributes. ``predict``
returns the plan as action names.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils import check_random_state as _sk_check_random_state

from .approx import ApproxConfig
from .pddl import load_files
from .search import PlannerConfig, bfws, config_from_name
from .strips import GroundProblem


def check_problem(problem) -> GroundProblem:
    """Accept a ``GroundProblem`` or a ``(domain_path, problem_path)`` pair."""
    if isinstance(problem, GroundProblem):
        return problem
    if isinstance(problem, (tuple, list)) and len(problem) == 2:
        return load_files(*problem)
    raise TypeError(f"expected a GroundProblem or (domain, problem) paths, got {type(problem).__name__}")


def check_random_state(seed) -> int:
    """Reduce ``seed`` (None, int or RandomState) to a non-negative int seed."""
    if isinstance(seed, numbers.Integral) and not isinstance(seed, bool):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        return int(seed)
    rng = _sk_check_random_state(seed)
    return int(rng.randint(np.iinfo(np.int32).max))


class BFWSPlanner(BaseEstimator):
    """Best-first width search as an estimator.

    Parameters mirror the ``plan`` command. ``planner`` is a preset name
    (``bfws-f5``, ``pi-ac``, ``P2AC``...); ``approximate`` and ``control``
    switch the corresponding features on in addition to the preset.
    """

    def __init__(self, planner="bfws-f5", arity=2, approximate=False, control=False, sample_size=None,
                 bloom_bits=None, dmax=524288000, random_state=0, time_limit=None, node_limit=None,
                 duplicate_check=True):
        self.planner = planner
        self.arity = arity
        self.approximate = approximate
        self.control = control
        self.sample_size = sample_size
        self.bloom_bits = bloom_bits
        self.dmax = dmax
        self.random_state = random_state
        self.time_limit = time_limit
        self.node_limit = node_limit
        self.duplicate_check = duplicate_check

    def _config(self) -> PlannerConfig:
        base = config_from_name(self.planner)
        return PlannerConfig(
            prune=base.prune,
            iterate=base.iterate,
            approximate=base.approximate or self.approximate,
            control=base.control or self.control,
            arity=self.arity,
            approx=ApproxConfig(sample_size=self.sample_size, bloom_bits=self.bloom_bits, dmax=self.dmax),
            seed=check_random_state(self.random_state),
            time_limit=self.time_limit,
            node_limit=self.node_limit,
            duplicate_check=self.duplicate_check,
        )

    def fit(self, problem, y=None):
        gp = check_problem(problem)
        result = bfws(gp, self._config())
        self.problem_ = gp
        self.status_ = result.status
        self.plan_ = result.plan
        self.stats_ = result.stats
        return self

    def predict(self, problem=None) -> list[str] | None:
        """Action names of the plan found by ``fit`` (None when unsolved).

        Passing a problem refits first.
        """
        if problem is not None:
            self.fit(problem)
        if not hasattr(self, "status_"):
            raise NotFittedError("call fit before predict")
        if self.plan_ is None:
            return None
        return [self.problem_.actions[a].name for a in self.plan_]

    def score(self, problem=None, y=None) -> float:
        """1.0 when solved, 0.0 otherwise."""
        if problem is not None:
            self.fit(problem)
        return float(self.plan_ is not None)
