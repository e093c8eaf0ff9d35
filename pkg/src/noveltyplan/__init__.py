"""Best-first width search with exact and sampled novelty."""

from .approx import ApproxConfig, ApproxNoveltyStore
from .novelty import NoveltyTable
from .pddl import load, load_files
from .search import PlannerConfig, RunStats, SearchResult, bfws, config_from_name
from .strips import GroundAction, GroundProblem, validate_plan

__version__ = "0.1.0"

__all__ = [
    "ApproxConfig",
    "ApproxNoveltyStore",
    "GroundAction",
    "GroundProblem",
    "NoveltyTable",
    "PlannerConfig",
    "RunStats",
    "SearchResult",
    "bfws",
    "config_from_name",
    "load",
    "load_files",
    "validate_plan",
]
