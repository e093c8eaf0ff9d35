"""Ranking and unranking of k-combinations."""

from __future__ import annotations

from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def colex_rank(t: tuple[int, ...]) -> int:
    """Rank of a sorted tuple in co-lexicographic order; independent of the universe size."""
    return sum(binom(c, j + 1) for j, c in enumerate(t))


def lex_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of range(n) in lexicographic order."""
    out = []
    x = 0
    for j in range(k, 0, -1):
        # skip blocks of combinations starting with x
        while True:
            block = binom(n - x - 1, j - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def lex_rank(t: tuple[int, ...], n: int) -> int:
    k = len(t)
    rank = 0
    prev = -1
    for j, c in enumerate(t):
        for x in range(prev + 1, c):
            rank += binom(n - x - 1, k - j - 1)
        prev = c
    return rank
