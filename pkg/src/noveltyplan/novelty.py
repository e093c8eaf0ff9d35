"""Exact partitioned novelty.

A state's novelty is the size of the smallest tuple of its true atoms that
no earlier state of the same partition made true; states with no new tuple
up to the arity bound ``i`` get ``i + 1``.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations
from typing import Hashable, Iterable

from .combin import binom

PartitionKey = Hashable

TUPLE_BYTES = 72


class NoveltyMemoryError(MemoryError):
    """The exact table for the requested arity would exceed the memory cap."""


def estimate_table_bytes(num_atoms: int, arity: int, partitions: int) -> int:
    return partitions * sum(binom(num_atoms, l) for l in range(1, arity + 1)) * TUPLE_BYTES


class NoveltyTable:
    """Per-partition, per-arity seen-tuple sets.

    Tuples are registered when a state is evaluated, whatever its novelty.
    Arity above 2 is refused when the worst-case table estimate for
    ``partitions`` partitions exceeds ``memory_cap`` bytes.
    """

    def __init__(self, arity: int, num_atoms: int | None = None, partitions: int = 1,
                 memory_cap: int = 1 << 30):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        if arity > 2 and num_atoms is not None:
            need = estimate_table_bytes(num_atoms, arity, partitions)
            if need > memory_cap:
                raise NoveltyMemoryError(
                    f"exact novelty at arity {arity} needs up to {need} bytes (cap {memory_cap}); "
                    "use the approximate evaluator"
                )
        self.arity = arity
        self._seen: dict[PartitionKey, list[set]] = {}
        self._counts: Counter = Counter()
        self.evaluated = 0

    def evaluate_and_register(self, atoms: Iterable[int], key: PartitionKey = None) -> int:
        atoms = tuple(sorted(atoms))
        levels = self._seen.get(key)
        if levels is None:
            levels = self._seen[key] = [set() for _ in range(self.arity)]
        w = self.arity + 1
        for l in range(1, self.arity + 1):
            seen = levels[l - 1]
            before = len(seen)
            seen.update(combinations(atoms, l))
            if len(seen) > before and w > self.arity:
                w = l
        self._counts[w] += 1
        self.evaluated += 1
        return w

    def count_novel(self, w: int) -> int:
        return self._counts[w]

    @property
    def partitions(self) -> int:
        return len(self._seen)

    def stored_tuples(self) -> int:
        return sum(len(s) for levels in self._seen.values() for s in levels)
