"""Key mixing, fingerprints and range reduction shared by every filter.

All filters work on 64-bit keys.  A key is mixed once per query with a
seeded Murmur3 finalizer; the three slot indexes and the fingerprint are all
carved out of that single 64-bit value.

Each function exists in two flavours: a scalar one working on Python ints
(the readable reference) and an ``*_array`` one working on ``numpy.uint64``
arrays for bulk construction and queries.  The tests check the two against
each other.
"""

from __future__ import annotations

import numpy as np

MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF

MIX_C1 = 0xFF51_AFD7_ED55_8CCD
MIX_C2 = 0xC4CE_B9FE_1A85_EC53

# Each of the three index views is the hash rotated left by j * INDEX_ROTATION.
INDEX_ROTATION = 21

SUPPORTED_FINGERPRINT_BITS = (8, 16)

_U64 = np.uint64


def mix64(key: int, seed: int) -> int:
    """Seeded Murmur3 64-bit finalizer.

    ``key + seed`` is mixed with two xor-shift-multiply rounds and a final
    xor-shift; all arithmetic wraps modulo 2**64.
    """
    h = (key + seed) & MASK64
    h = ((h ^ (h >> 33)) * MIX_C1) & MASK64
    h = ((h ^ (h >> 33)) * MIX_C2) & MASK64
    return h ^ (h >> 33)


def fingerprint(h: int, k: int) -> int:
    """The low ``k`` bits of the hash folded onto itself (``h ^ h >> 32``)."""
    return (h ^ (h >> 32)) & ((1 << k) - 1)


def reduce(x: int, m: int) -> int:
    """Map a 32-bit ``x`` onto ``[0, m)`` with a multiply and a shift."""
    return (x * m) >> 32


def rotl64(h: int, r: int) -> int:
    r &= 63
    if r == 0:
        return h
    return ((h << r) | (h >> (64 - r))) & MASK64


def segment_hashes(h: int, seg_len: int) -> tuple[int, int, int]:
    """Return one slot index in each of the three segments of length ``seg_len``."""
    return tuple(
        reduce(rotl64(h, j * INDEX_ROTATION) & MASK32, seg_len) + j * seg_len
        for j in range(3)
    )  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# numpy versions


def as_keys(keys) -> np.ndarray:
    """Coerce a sequence of 64-bit keys into a contiguous uint64 array."""
    if isinstance(keys, np.ndarray):
        if keys.dtype == np.uint64:
            return np.ascontiguousarray(keys)
        if keys.dtype.kind == "u":
            return keys.astype(np.uint64)
        if keys.dtype.kind == "i":
            if len(keys) and keys.min() < 0:
                raise ValueError("keys must be non-negative")
            return keys.astype(np.uint64)
        raise TypeError(f"keys must be integers, got dtype {keys.dtype}")
    keys = list(keys)
    for key in keys:
        if not 0 <= key <= MASK64:
            raise ValueError(f"key {key} does not fit in 64 unsigned bits")
    return np.array(keys, dtype=np.uint64)


def mix64_array(keys: np.ndarray, seed: int) -> np.ndarray:
    h = keys + _U64(seed & MASK64)
    h ^= h >> _U64(33)
    h *= _U64(MIX_C1)
    h ^= h >> _U64(33)
    h *= _U64(MIX_C2)
    h ^= h >> _U64(33)
    return h


def fingerprint_array(h: np.ndarray, k: int) -> np.ndarray:
    dtype = np.uint8 if k <= 8 else np.uint16
    return ((h ^ (h >> _U64(32))) & _U64((1 << k) - 1)).astype(dtype)


def reduce_array(x: np.ndarray, m: int) -> np.ndarray:
    return (x.astype(np.uint64) * _U64(m)) >> _U64(32)


def rotl64_array(h: np.ndarray, r: int) -> np.ndarray:
    r &= 63
    if r == 0:
        return h
    return (h << _U64(r)) | (h >> _U64(64 - r))


def segment_hashes_array(h: np.ndarray, seg_len: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(
        (reduce_array(rotl64_array(h, j * INDEX_ROTATION) & _U64(MASK32), seg_len)
         + _U64(j * seg_len)).astype(np.int64)
        for j in range(3)
    )  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# seeds


def splitmix64(state: int) -> tuple[int, int]:
    """One step of SplitMix64: returns ``(new_state, output)``."""
    state = (state + 0x9E37_79B9_7F4A_7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB) & MASK64
    return state, z ^ (z >> 31)


def seed_stream(master_seed: int):
    """Yield the per-attempt seeds derived from ``master_seed``.

    Attempt ``r`` always gets the ``r``-th draw, so a construction is
    reproducible from the master seed alone.
    """
    state = master_seed & MASK64
    while True:
        state, out = splitmix64(state)
        yield out
