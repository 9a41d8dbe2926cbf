"""Standard Bloom filter with double hashing, used as the comparison baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hashing import MASK32, as_keys, mix64, mix64_array, reduce
from .xorcore import _chunks

SUPPORTED_BITS_PER_KEY = (8, 12, 16)


def optimal_hash_count(bits_per_key: float) -> int:
    """Hash count minimising the false-positive rate: ``round(b ln 2)``, at least 1."""
    if bits_per_key <= 0:
        raise ValueError("bits per key must be positive")
    return max(1, round(bits_per_key * math.log(2)))


def _probe_positions(h: int, num_hashes: int, m: int):
    h1 = h & MASK32
    h2 = h >> 32
    for i in range(num_hashes):
        yield reduce((h1 + i * h2) & MASK32, m)


@dataclass(eq=False)
class BloomFilter:
    seed: int
    m: int
    num_hashes: int
    bits: np.ndarray  # uint8, little-endian bit order, ceil(m / 8) bytes
    n: int = 0
    bits_per_key_target: int = 8

    @property
    def kind(self) -> str:
        return f"bloom{self.bits_per_key_target}"

    def contains(self, key: int) -> bool:
        bits = self.bits
        for pos in _probe_positions(mix64(key, self.seed), self.num_hashes, self.m):
            if not (bits[pos >> 3] >> (pos & 7)) & 1:
                return False
        return True

    __contains__ = contains

    def contains_many(self, keys) -> np.ndarray:
        keys = as_keys(keys)
        out = np.empty(len(keys), dtype=bool)
        pos = 0
        for chunk in _chunks(keys):
            hit = np.ones(len(chunk), dtype=bool)
            for p in _positions_array(mix64_array(chunk, self.seed), self.num_hashes, self.m):
                hit &= ((self.bits[p >> 3] >> (p & 7).astype(np.uint8)) & 1).astype(bool)
            out[pos:pos + len(chunk)] = hit
            pos += len(chunk)
        return out

    def count_positives(self, keys) -> int:
        return int(np.count_nonzero(self.contains_many(keys)))

    def size_in_bits(self) -> int:
        return 8 * len(self.bits)

    def bits_per_key(self) -> float:
        return self.size_in_bits() / self.n if self.n else float("inf")

    def __eq__(self, other):
        if not isinstance(other, BloomFilter):
            return NotImplemented
        return (
            (self.seed, self.m, self.num_hashes, self.n) == (other.seed, other.m, other.num_hashes, other.n)
            and np.array_equal(self.bits, other.bits)
        )


def _positions_array(h: np.ndarray, num_hashes: int, m: int):
    h1 = h & np.uint64(MASK32)
    h2 = h >> np.uint64(32)
    for i in range(num_hashes):
        g = (h1 + np.uint64(i) * h2) & np.uint64(MASK32)
        yield ((g * np.uint64(m)) >> np.uint64(32)).astype(np.int64)


def bloom_construct(keys, bits_per_key: int = 8, seed: int = 0) -> BloomFilter:
    """Build a Bloom filter sized at ``bits_per_key`` bits for each distinct key.

    ``seed`` is used directly as the mixing seed; Bloom construction never
    needs a retry.
    """
    if bits_per_key not in SUPPORTED_BITS_PER_KEY:
        raise ValueError(f"bits per key must be one of {SUPPORTED_BITS_PER_KEY}, got {bits_per_key}")
    keys = np.unique(as_keys(keys))
    n = len(keys)
    # whole bytes so that the stored size is exactly bits_per_key * n when n % 8 == 0
    m = max(8, -(-bits_per_key * n // 8) * 8)
    if m >= 1 << 32:
        raise ValueError("filter too large for 32-bit probe positions")
    num_hashes = optimal_hash_count(bits_per_key)
    scratch = np.zeros(m, dtype=bool)
    for chunk in _chunks(keys):
        for p in _positions_array(mix64_array(chunk, seed), num_hashes, m):
            scratch[p] = True
    bits = np.packbits(scratch, bitorder="little")
    return BloomFilter(seed=seed & 0xFFFF_FFFF_FFFF_FFFF, m=m, num_hashes=num_hashes, bits=bits, n=n,
                       bits_per_key_target=bits_per_key)


def bloom_contains(f: BloomFilter, key: int) -> bool:
    return f.contains(key)
