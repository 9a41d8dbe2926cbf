"""Xor filters: peeling construction and three-probe membership test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import ConstructionFailed
from .hashing import (
    SUPPORTED_FINGERPRINT_BITS,
    as_keys,
    fingerprint,
    fingerprint_array,
    mix64,
    mix64_array,
    seed_stream,
    segment_hashes,
    segment_hashes_array,
)

MAX_ATTEMPTS = 100

# Queries are evaluated in blocks of this many keys to bound temporaries.
QUERY_CHUNK = 1 << 20


class PeelStack(NamedTuple):
    """Hashed keys in the order they were peeled, with the slot each one owns."""

    hashes: np.ndarray  # uint64
    slots: np.ndarray  # int64

    def __len__(self) -> int:
        return len(self.hashes)


def capacity(n: int) -> tuple[int, int]:
    """Return ``(seg_len, c)`` for ``n`` keys.

    ``c`` is ``floor(1.23 n) + 32`` rounded up to a multiple of three so the
    three segments have equal length.
    """
    if n < 0:
        raise ValueError("key count must be non-negative")
    c = (123 * n) // 100 + 32
    c += -c % 3
    return c // 3, c


def peel(hashes: np.ndarray, seg_len: int, *, three_queues: bool = False) -> PeelStack | None:
    """Run the mapping step over distinct hashed keys.

    Every slot keeps a key counter and the xor of the hashes it holds; a slot
    whose counter is one therefore names its sole key.  Such slots are
    processed from a FIFO queue.  Returns ``None`` if a non-empty core is
    left over.
    """
    hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
    stack_h, stack_i, size = _kernels.peel(hashes, seg_len, three_queues)
    if size != len(hashes):
        return None
    return PeelStack(stack_h, stack_i)


def assign(stack: PeelStack, seg_len: int, k: int, write_counts: np.ndarray | None = None) -> np.ndarray:
    """Solve for slot values, walking the stack from its top.

    When ``write_counts`` is given it is incremented once per slot write.
    """
    dtype = np.uint8 if k <= 8 else np.uint16
    slots = np.zeros(3 * seg_len, dtype=dtype)
    writes = write_counts if write_counts is not None else np.empty(0, np.int64)
    _kernels.assign(stack.hashes, stack.slots, seg_len, k, slots, writes)
    return slots


def _check_k(k: int) -> None:
    if k not in SUPPORTED_FINGERPRINT_BITS:
        raise ValueError(f"fingerprint width must be one of {SUPPORTED_FINGERPRINT_BITS}, got {k}")


def _peel_with_retries(keys, master_seed: int, max_attempts: int, three_queues: bool):
    keys = np.unique(as_keys(keys))
    seg_len, _ = capacity(len(keys))
    seeds = seed_stream(master_seed)
    for attempt in range(1, max_attempts + 1):
        seed = next(seeds)
        stack = peel(mix64_array(keys, seed), seg_len, three_queues=three_queues)
        if stack is not None:
            return len(keys), seg_len, seed, stack, attempt
    raise ConstructionFailed(
        f"no peelable hypergraph for {len(keys)} keys after {max_attempts} attempts"
    )


def _chunks(keys: np.ndarray):
    for start in range(0, len(keys), QUERY_CHUNK):
        yield keys[start:start + QUERY_CHUNK]


@dataclass(eq=False)
class XorFilter:
    seed: int
    k: int
    seg_len: int
    slots: np.ndarray
    n: int = 0
    # How many seeds construction went through; not part of the filter state.
    attempts: int | None = field(default=None, compare=False)

    kind_prefix = "xor"

    @property
    def kind(self) -> str:
        return f"{self.kind_prefix}{self.k}"

    def contains(self, key: int) -> bool:
        h = mix64(key, self.seed)
        i0, i1, i2 = segment_hashes(h, self.seg_len)
        s = self.slots
        return fingerprint(h, self.k) == int(s[i0]) ^ int(s[i1]) ^ int(s[i2])

    __contains__ = contains

    def contains_many(self, keys) -> np.ndarray:
        keys = as_keys(keys)
        out = np.empty(len(keys), dtype=bool)
        pos = 0
        for chunk in _chunks(keys):
            h = mix64_array(chunk, self.seed)
            i0, i1, i2 = segment_hashes_array(h, self.seg_len)
            s = self.slots
            out[pos:pos + len(chunk)] = fingerprint_array(h, self.k) == (s[i0] ^ s[i1] ^ s[i2])
            pos += len(chunk)
        return out

    def count_positives(self, keys) -> int:
        return int(np.count_nonzero(self.contains_many(keys)))

    def size_in_bits(self) -> int:
        return len(self.slots) * self.k

    def bits_per_key(self) -> float:
        return self.size_in_bits() / self.n if self.n else float("inf")

    def __eq__(self, other):
        if not isinstance(other, XorFilter):
            return NotImplemented
        return (
            (self.seed, self.k, self.seg_len, self.n) == (other.seed, other.k, other.seg_len, other.n)
            and np.array_equal(self.slots, other.slots)
        )


def construct(keys, k: int = 8, seed: int = 0, *, max_attempts: int = MAX_ATTEMPTS) -> XorFilter:
    """Build an xor filter over ``keys`` (duplicates are ignored).

    Hash seeds are drawn from ``seed`` until the mapping step succeeds;
    raises :class:`ConstructionFailed` after ``max_attempts`` failures.
    """
    _check_k(k)
    n, seg_len, used_seed, stack, attempts = _peel_with_retries(keys, seed, max_attempts, False)
    slots = assign(stack, seg_len, k)
    return XorFilter(seed=used_seed, k=k, seg_len=seg_len, slots=slots, n=n, attempts=attempts)


def contains(f: XorFilter, key: int) -> bool:
    return f.contains(key)
