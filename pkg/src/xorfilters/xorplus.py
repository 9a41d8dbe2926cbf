"""Xor+ filters.

Construction peels with one queue per segment and empties the first two
queues before touching the third, which pushes most unused slots into the
last segment.  That segment is then stored compactly: an occupancy bitmap
with a rank index, and only the occupied slot values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hashing import (
    as_keys,
    fingerprint,
    fingerprint_array,
    mix64,
    mix64_array,
    segment_hashes,
    segment_hashes_array,
)
from .xorcore import MAX_ATTEMPTS, XorFilter, _check_k, _chunks, _peel_with_retries, assign, peel

BLOCK_BITS = 512
WORDS_PER_BLOCK = BLOCK_BITS // 64
SUB_BITS = 9


@dataclass(eq=False)
class RankedBitmap:
    """Bit array with a Rank9-style index.

    Each 512-bit block gets two 64-bit words of index: the number of set bits
    before the block, and seven 9-bit counts of the set bits before each of
    the block's 64-bit sub-words 1..7 (relative to the block start).  One
    block more than the data needs is indexed so ``rank(length)`` is valid.
    """

    length: int
    words: np.ndarray  # uint64, ceil(length / 64)
    counts: np.ndarray  # uint64, 2 per block

    @classmethod
    def from_words(cls, words: np.ndarray, length: int) -> RankedBitmap:
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if len(words) != -(-length // 64):
            raise ValueError("word count does not match bitmap length")
        if length % 64 and len(words) and int(words[-1]) >> (length % 64):
            raise ValueError("bits set past the end of the bitmap")
        nblocks = length // BLOCK_BITS + 1
        pop = np.zeros(nblocks * WORDS_PER_BLOCK, dtype=np.uint64)
        pop[:len(words)] = np.bitwise_count(words)
        pop = pop.reshape(nblocks, WORDS_PER_BLOCK)
        per_block = pop.sum(axis=1)
        before = np.concatenate(([0], np.cumsum(per_block)[:-1])).astype(np.uint64)
        within = np.cumsum(pop, axis=1) - pop  # set bits before each sub-word
        packed = np.zeros(nblocks, dtype=np.uint64)
        for sub in range(1, WORDS_PER_BLOCK):
            packed |= within[:, sub] << np.uint64(SUB_BITS * (sub - 1))
        counts = np.empty(2 * nblocks, dtype=np.uint64)
        counts[0::2] = before
        counts[1::2] = packed
        return cls(length, words, counts)

    @classmethod
    def from_bools(cls, bits) -> RankedBitmap:
        bits = np.asarray(bits, dtype=bool)
        raw = np.packbits(bits, bitorder="little")
        raw = np.concatenate((raw, np.zeros(-len(raw) % 8, dtype=np.uint8)))
        return cls.from_words(raw.view("<u8").astype(np.uint64), len(bits))

    def __len__(self) -> int:
        return self.length

    def get(self, i: int) -> bool:
        return bool((int(self.words[i >> 6]) >> (i & 63)) & 1)

    def rank(self, i: int) -> int:
        """Number of set bits in positions ``[0, i)``."""
        if not 0 <= i <= self.length:
            raise IndexError(i)
        block = i >> 9
        sub = (i >> 6) & 7
        r = int(self.counts[2 * block])
        if sub:
            r += (int(self.counts[2 * block + 1]) >> (SUB_BITS * (sub - 1))) & 0x1FF
        if i & 63:
            r += (int(self.words[i >> 6]) & ((1 << (i & 63)) - 1)).bit_count()
        return r

    def get_array(self, pos: np.ndarray) -> np.ndarray:
        return ((self.words[pos >> 6] >> (pos & 63).astype(np.uint64)) & np.uint64(1)).astype(bool)

    def rank_array(self, pos: np.ndarray) -> np.ndarray:
        pos = np.asarray(pos, dtype=np.int64)
        block = pos >> 9
        sub = ((pos >> 6) & 7).astype(np.uint64)
        r = self.counts[2 * block].copy()
        shift = np.where(sub > 0, np.uint64(SUB_BITS) * (sub - np.uint64(1)), np.uint64(0))
        r += np.where(sub > 0, (self.counts[2 * block + 1] >> shift) & np.uint64(0x1FF), np.uint64(0))
        low = (pos & 63).astype(np.uint64)
        partial = low > 0
        if partial.any():
            words = self.words[pos[partial] >> 6]
            r[partial] += np.bitwise_count(words & ((np.uint64(1) << low[partial]) - np.uint64(1)))
        return r.astype(np.int64)

    def count(self) -> int:
        return self.rank(self.length)

    def aux_bits(self) -> int:
        return 64 * len(self.counts)

    def size_in_bits(self) -> int:
        return 64 * len(self.words) + self.aux_bits()

    def __eq__(self, other):
        if not isinstance(other, RankedBitmap):
            return NotImplemented
        return (
            self.length == other.length
            and np.array_equal(self.words, other.words)
            and np.array_equal(self.counts, other.counts)
        )


def build_rank(bits) -> RankedBitmap:
    return RankedBitmap.from_bools(bits)


def peel_three_queues(hashes: np.ndarray, seg_len: int):
    """Mapping step with per-segment queues, draining segments 0 and 1 first."""
    return peel(hashes, seg_len, three_queues=True)


@dataclass(eq=False)
class XorPlusFilter:
    seed: int
    k: int
    seg_len: int
    dense: np.ndarray  # first two segments, uncompressed
    occupancy: RankedBitmap  # over the last segment
    packed: np.ndarray  # occupied last-segment values in slot order
    n: int = 0
    attempts: int | None = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return f"xorplus{self.k}"

    def _last(self, j: int) -> int:
        if not self.occupancy.get(j):
            return 0
        return int(self.packed[self.occupancy.rank(j)])

    def contains(self, key: int) -> bool:
        h = mix64(key, self.seed)
        i0, i1, i2 = segment_hashes(h, self.seg_len)
        v = int(self.dense[i0]) ^ int(self.dense[i1]) ^ self._last(i2 - 2 * self.seg_len)
        return fingerprint(h, self.k) == v

    __contains__ = contains

    def contains_many(self, keys) -> np.ndarray:
        keys = as_keys(keys)
        out = np.empty(len(keys), dtype=bool)
        pos = 0
        for chunk in _chunks(keys):
            h = mix64_array(chunk, self.seed)
            i0, i1, i2 = segment_hashes_array(h, self.seg_len)
            j = i2 - 2 * self.seg_len
            last = np.zeros(len(chunk), dtype=self.dense.dtype)
            occ = self.occupancy.get_array(j)
            if occ.any():
                last[occ] = self.packed[self.occupancy.rank_array(j[occ])]
            v = self.dense[i0] ^ self.dense[i1] ^ last
            out[pos:pos + len(chunk)] = fingerprint_array(h, self.k) == v
            pos += len(chunk)
        return out

    def count_positives(self, keys) -> int:
        return int(np.count_nonzero(self.contains_many(keys)))

    def last_segment(self) -> np.ndarray:
        """The last segment expanded back to one value per slot."""
        out = np.zeros(self.seg_len, dtype=self.dense.dtype)
        idx = np.arange(self.seg_len)
        occ = self.occupancy.get_array(idx)
        out[occ] = self.packed
        return out

    def to_xor_filter(self) -> XorFilter:
        slots = np.concatenate((self.dense, self.last_segment()))
        return XorFilter(seed=self.seed, k=self.k, seg_len=self.seg_len, slots=slots, n=self.n)

    def empty_fraction(self) -> float:
        """Share of last-segment slots that hold no value."""
        return 1.0 - len(self.packed) / self.seg_len

    def size_in_bits(self) -> int:
        return (len(self.dense) + len(self.packed)) * self.k + self.occupancy.size_in_bits()

    def bits_per_key(self) -> float:
        return self.size_in_bits() / self.n if self.n else float("inf")

    def __eq__(self, other):
        if not isinstance(other, XorPlusFilter):
            return NotImplemented
        return (
            (self.seed, self.k, self.seg_len, self.n) == (other.seed, other.k, other.seg_len, other.n)
            and np.array_equal(self.dense, other.dense)
            and self.occupancy == other.occupancy
            and np.array_equal(self.packed, other.packed)
        )


def compress(slots: np.ndarray, occupied: np.ndarray, seed: int, k: int, seg_len: int, n: int) -> XorPlusFilter:
    """Split a flat slot array into dense two thirds plus a compressed last third.

    ``occupied`` flags the slots that were written during assignment; a
    written slot holding 0 is still stored.
    """
    last_occ = occupied[2 * seg_len:]
    return XorPlusFilter(
        seed=seed,
        k=k,
        seg_len=seg_len,
        dense=slots[:2 * seg_len].copy(),
        occupancy=RankedBitmap.from_bools(last_occ),
        packed=slots[2 * seg_len:][last_occ].copy(),
        n=n,
    )


def construct_plus(keys, k: int = 8, seed: int = 0, *, max_attempts: int = MAX_ATTEMPTS) -> XorPlusFilter:
    _check_k(k)
    n, seg_len, used_seed, stack, attempts = _peel_with_retries(keys, seed, max_attempts, True)
    slots = assign(stack, seg_len, k)
    occupied = np.zeros(3 * seg_len, dtype=bool)
    occupied[stack.slots] = True
    f = compress(slots, occupied, used_seed, k, seg_len, n)
    f.attempts = attempts
    return f


def contains_plus(f: XorPlusFilter, key: int) -> bool:
    return f.contains(key)


def space_estimate_plus(k: float) -> float:
    """Expected bits per key of an xor+ filter with ``k``-bit fingerprints."""
    return 1.0824 * k + 0.5125
