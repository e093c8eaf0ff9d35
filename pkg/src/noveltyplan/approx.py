"""Approximate novelty: uniform tuple sampling plus budgeted tuple storage.

For every arity ``l`` up to the bound, a state's tuples are drawn uniformly
without replacement (at most ``sample_size`` of them), tested against the
store of its partition and then inserted. Each arity is stored either in an
exact dense bitmap indexed by tuple rank or, when that cannot fit in the
byte budget, in a bank of Bloom filters shared by partitions.
"""

from __future__ import annotations

import logging
import math
import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Sequence

from .combin import binom, colex_rank, lex_unrank

log = logging.getLogger(__name__)

_M64 = (1 << 64) - 1
# filters larger than this buy nothing at desk scale and cost RAM in CPython
MAX_AUTO_BITS = 1 << 23
SET_ENTRY_BYTES = 64
DENSE_LIMIT_BITS = 1 << 27
# beyond this many probes the false-positive rate is already negligible
MAX_HASHES = 16


def _mix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _fold64(x: int) -> int:
    out = 0
    while True:
        out ^= x & _M64
        x >>= 64
        if not x:
            return out


def tuple_key(t: Sequence[int]) -> int:
    """Injective integer encoding of a sorted tuple (rank plus length)."""
    return (colex_rank(tuple(t)) << 8) | len(t)


def _rank(t: tuple[int, ...]) -> int:
    if len(t) == 1:
        return t[0]
    if len(t) == 2:
        return t[0] + t[1] * (t[1] - 1) // 2
    return colex_rank(t)


class TupleSampler:
    """Draws ``l``-tuples of a state's true atoms uniformly without replacement."""

    def __init__(self, max_size: int, seed: int | random.Random | None = None):
        if max_size < 1:
            raise ValueError("sample size must be >= 1")
        self.max_size = max_size
        self.rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    def sample(self, atoms: Sequence[int], l: int) -> list[tuple[int, ...]]:
        m = len(atoms)
        population = binom(m, l)
        if population == 0:
            return []
        if population <= self.max_size:
            return list(combinations(atoms, l))
        ranks = self.rng.sample(range(population), self.max_size)
        return [tuple(atoms[i] for i in lex_unrank(r, m, l)) for r in ranks]


def choose_k(r: int, q: int) -> int:
    """Number of hash functions minimising the false-positive rate, capped at ``MAX_HASHES``."""
    if r * math.log(2) <= q:
        return 1
    return min(MAX_HASHES, max(1, round(r / q * math.log(2))))


class BloomFilter:
    """Bit-array membership sketch with ``k`` double-hashed probes."""

    def __init__(self, bits: int, k: int = 1, seed: int = 0):
        if bits < 8:
            raise ValueError("a Bloom filter needs at least 8 bits")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.bits = bits
        self.k = k
        self.seed = seed
        self._s1 = _mix64(seed * 2 + 1)
        self._s2 = _mix64(seed * 2 + 2)
        self.array = bytearray((bits + 7) // 8)
        self.inserted = 0

    @property
    def nbytes(self) -> int:
        return len(self.array)

    def _positions(self, key: int):
        key = _fold64(key)
        h1 = _mix64(key ^ self._s1)
        h2 = _mix64(key ^ self._s2) | 1
        r = self.bits
        return [(h1 + j * h2) % r for j in range(self.k)]

    def add_key(self, key: int) -> bool:
        """Insert; returns True when at least one bit flipped (the key was absent)."""
        arr = self.array
        flipped = False
        for p in self._positions(key):
            byte, bit = p >> 3, 1 << (p & 7)
            if not arr[byte] & bit:
                arr[byte] |= bit
                flipped = True
        self.inserted += 1
        return flipped

    def contains_key(self, key: int) -> bool:
        arr = self.array
        return all(arr[p >> 3] & (1 << (p & 7)) for p in self._positions(key))

    def add(self, t: Sequence[int]) -> None:
        self.add_key(tuple_key(t))

    def __contains__(self, t: Sequence[int]) -> bool:
        return self.contains_key(tuple_key(t))

    def fill_ratio(self) -> float:
        return sum(bin(b).count("1") for b in self.array) / self.bits


def bloom_insert(f: BloomFilter, t: Sequence[int]) -> None:
    f.add(t)


def bloom_query(f: BloomFilter, t: Sequence[int]) -> bool:
    return t in f


class BloomBank:
    """Partition-indexed bank of Bloom filters.

    Partitions get slots in order of first appearance; once all ``num_slots``
    are taken, a new partition shares a uniformly chosen existing slot. The
    mapping of a partition never changes. One filter per (level, slot) is
    allocated on first use.
    """

    def __init__(self, levels: Sequence[int], bits: int, num_slots: int, ks: dict[int, int],
                 seed: int = 0):
        if num_slots < 1:
            raise ValueError("bank needs at least one slot")
        self.levels = tuple(levels)
        self.bits = bits
        self.num_slots = num_slots
        self.ks = dict(ks)
        self.seed = seed
        self._overlap_rng = random.Random(_mix64(seed ^ 0xB10F))
        self._slot_of: dict[Hashable, int] = {}
        self._filters: dict[tuple[int, int], BloomFilter] = {}
        self.collisions = 0
        self.allocated_bytes = 0

    def slot(self, key: Hashable) -> int:
        slot = self._slot_of.get(key)
        if slot is None:
            n = len(self._slot_of)
            if n < self.num_slots:
                slot = n
            else:
                slot = self._overlap_rng.randrange(self.num_slots)
                self.collisions += 1
                log.debug("partition %r shares bank slot %d (collision %d)", key, slot, self.collisions)
            self._slot_of[key] = slot
        return slot

    def filter(self, key: Hashable, level: int) -> BloomFilter:
        slot = self.slot(key)
        f = self._filters.get((level, slot))
        if f is None:
            f = BloomFilter(self.bits, self.ks[level], seed=_mix64(self.seed + 1000003 * level + slot))
            self._filters[(level, slot)] = f
            self.allocated_bytes += f.nbytes
        return f

    @property
    def partitions_seen(self) -> int:
        return len(self._slot_of)


def bank_slot(bank: BloomBank, key: Hashable, level: int) -> BloomFilter:
    return bank.filter(key, level)


class _ExactLevel:
    """Exact tuple storage per partition: a dense bitmap over tuple ranks, or a set."""

    def __init__(self, num_tuples: int):
        self.num_tuples = num_tuples
        self.dense = num_tuples <= DENSE_LIMIT_BITS
        self._store: dict[Hashable, object] = {}
        self.allocated_bytes = 0

    def register(self, key: Hashable, ranks: list[int]) -> bool:
        store = self._store.get(key)
        if self.dense:
            if store is None:
                store = self._store[key] = bytearray((self.num_tuples + 7) // 8)
                self.allocated_bytes += len(store)
            new = False
            for r in ranks:
                byte, bit = r >> 3, 1 << (r & 7)
                if not store[byte] & bit:
                    new = True
                    store[byte] |= bit
            return new
        if store is None:
            store = self._store[key] = set()
        before = len(store)
        store.update(ranks)
        self.allocated_bytes += (len(store) - before) * SET_ENTRY_BYTES
        return len(store) > before


class _BloomLevel:
    def __init__(self, bank: BloomBank, level: int):
        self.bank = bank
        self.level = level

    def register(self, key: Hashable, ranks: list[int]) -> bool:
        f = self.bank.filter(key, self.level)
        new = not all(f.contains_key(r) for r in ranks)
        for r in ranks:
            f.add_key(r)
        return new


@dataclass
class ApproxConfig:
    """Hyperparameters of the approximate novelty store.

    ``sample_size`` and ``bloom_bits`` of None mean automatic sizing
    (``|F|`` tuples and ``|F|**2`` bits grown to the budget). ``storage`` is
    ``"auto"`` (exact where the budget allows, Bloom elsewhere), ``"exact"`` or
    ``"bloom"``. With ``exact_low_arity`` arities 1 and 2 are enumerated
    exhaustively instead of sampled.
    """

    sample_size: int | None = None
    bloom_bits: int | None = None
    dmax: int = 500 * 1024 * 1024
    storage: str = "auto"
    exact_low_arity: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.sample_size is not None and self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.bloom_bits is not None and self.bloom_bits < 8:
            raise ValueError("bloom_bits must be >= 8")
        if self.storage not in ("auto", "exact", "bloom"):
            raise ValueError(f"unknown storage mode {self.storage!r}")
        if self.dmax < 1:
            raise ValueError("dmax must be positive")


def plan_bloom_bits(num_atoms: int, bloom_levels: int, max_slots: int, budget_bits: int,
                    fixed_bits: int | None = None) -> tuple[int, int]:
    """Filter size and slot count for the bank under ``budget_bits``.

    Starts from ``|F|**2`` bits, doubles while a full bank still fits, halves
    while one partition's filters do not. Returns (bits, slots).
    """
    if fixed_bits is not None:
        r = fixed_bits
    else:
        r = max(8, num_atoms * num_atoms)
        while bloom_levels * 2 * r * max_slots <= budget_bits and 2 * r <= MAX_AUTO_BITS:
            r *= 2
        while bloom_levels * r > budget_bits and r > 8:
            r //= 2
    slots = max(1, min(max_slots, budget_bits // max(1, bloom_levels * r)))
    return r, slots


class ApproxNoveltyStore:
    """Approximate partitioned novelty evaluator.

    ``partitions_bound`` is the number of distinct partition keys the caller
    can produce; it sizes the bank and the exact-storage reservations.
    """

    def __init__(self, num_atoms: int, arity: int, config: ApproxConfig | None = None,
                 partitions_bound: int = 1):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        self.config = config = config or ApproxConfig()
        self.num_atoms = num_atoms
        self.arity = arity
        self.partitions_bound = max(1, partitions_bound)
        self.sample_size = config.sample_size or max(1, num_atoms)
        self.sampler = TupleSampler(self.sample_size, random.Random(_mix64(config.seed ^ 0x5A5A)))
        self._counts: Counter = Counter()
        self.evaluated = 0
        self.tuples_touched = 0
        self.peak_bytes = 0

        budget = config.dmax
        self.exhaustive = [config.exact_low_arity and l <= 2 for l in range(1, arity + 1)]
        modes = []
        for l in range(1, arity + 1):
            n = binom(num_atoms, l)
            if config.storage == "exact":
                modes.append("exact")
            elif config.storage == "bloom":
                modes.append("bloom")
            else:
                need = self.partitions_bound * ((n + 7) // 8)
                if n <= DENSE_LIMIT_BITS and need <= budget:
                    modes.append("exact")
                    budget -= need
                else:
                    modes.append("bloom")
        self.modes = modes
        bloom_levels = [l for l, m in zip(range(1, arity + 1), modes) if m == "bloom"]
        self.bank = None
        if bloom_levels:
            bits, slots = plan_bloom_bits(num_atoms, len(bloom_levels), self.partitions_bound,
                                          8 * budget, config.bloom_bits)
            ks = {l: choose_k(bits, max(1, binom(num_atoms, l))) for l in bloom_levels}
            self.bank = BloomBank(bloom_levels, bits, slots, ks, seed=config.seed)
        self._levels = [
            _ExactLevel(binom(num_atoms, l)) if m == "exact" else _BloomLevel(self.bank, l)
            for l, m in zip(range(1, arity + 1), modes)
        ]

    def evaluate_and_register(self, atoms: Sequence[int], key: Hashable = None) -> int:
        atoms = tuple(sorted(atoms))
        w = 0
        for l in range(1, self.arity + 1):
            if self.exhaustive[l - 1]:
                tuples = combinations(atoms, l)
            else:
                tuples = self.sampler.sample(atoms, l)
            ranks = [_rank(t) for t in tuples]
            self.tuples_touched += len(ranks)
            if self._levels[l - 1].register(key, ranks) and not w:
                w = l
        w = w or self.arity + 1
        self._counts[w] += 1
        self.evaluated += 1
        self.peak_bytes = max(self.peak_bytes, self.allocated_bytes)
        return w

    def count_novel(self, w: int) -> int:
        return self._counts[w]

    @property
    def allocated_bytes(self) -> int:
        total = sum(lv.allocated_bytes for lv in self._levels if isinstance(lv, _ExactLevel))
        if self.bank is not None:
            total += self.bank.allocated_bytes
        return total

    @property
    def bloom_levels(self) -> tuple[int, ...]:
        return self.bank.levels if self.bank is not None else ()

    @property
    def collisions(self) -> int:
        return self.bank.collisions if self.bank is not None else 0


def evaluate_and_register_approx(store: ApproxNoveltyStore, atoms: Sequence[int], key: Hashable = None) -> int:
    return store.evaluate_and_register(atoms, key)
