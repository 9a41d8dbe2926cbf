"""The compiled peel/assign loops against a literal set-based reference."""

from collections import deque

import numpy as np
import pytest

from xorfilters import _kernels
from xorfilters.hashing import fingerprint, segment_hashes
from xorfilters.xorcore import assign, capacity, peel


def reference_peel(hashes, seg_len, three_queues=False):
    """Peeling with explicit Python sets and deques; returns the stack or None."""
    c = 3 * seg_len
    sets = [set() for _ in range(c)]
    for h in hashes:
        for i in segment_hashes(h, seg_len):
            sets[i].add(h)
    queues = [deque() for _ in range(3 if three_queues else 1)]

    def enqueue(i):
        queues[i // seg_len if three_queues else 0].append(i)

    for i in range(c):
        if len(sets[i]) == 1:
            enqueue(i)
    stack = []
    while any(queues):
        i = next(q for q in queues if q).popleft()
        if len(sets[i]) != 1:
            continue
        (h,) = sets[i]
        stack.append((h, i))
        for s in segment_hashes(h, seg_len):
            sets[s].discard(h)
            if len(sets[s]) == 1:
                enqueue(s)
    return stack if len(stack) == len(hashes) else None


def reference_assign(stack, seg_len, k):
    b = [0] * (3 * seg_len)
    for h, i in reversed(stack):
        b[i] = 0
        i0, i1, i2 = segment_hashes(h, seg_len)
        b[i] = fingerprint(h, k) ^ b[i0] ^ b[i1] ^ b[i2]
    return b


def test_slot_indexes_match_python(rng):
    hs = rng.integers(0, 2**64, 2000, dtype=np.uint64, endpoint=False)
    for seg_len in (1, 7, 52, 4_100_011, 2**32 - 1):
        got = _kernels.slot_indexes(hs, seg_len)
        assert got.tolist() == [list(segment_hashes(h, seg_len)) for h in hs.tolist()]


@pytest.mark.parametrize("three_queues", [False, True])
@pytest.mark.parametrize("n", [0, 1, 2, 10, 100, 1000, 3000])
def test_peel_matches_reference(rng, n, three_queues):
    seg_len, _ = capacity(n)
    for _ in range(8):
        hs = np.unique(rng.integers(0, 2**64, n, dtype=np.uint64, endpoint=False))
        expected = reference_peel(hs.tolist(), seg_len, three_queues)
        got = peel(hs, seg_len, three_queues=three_queues)
        if expected is None:
            assert got is None
        else:
            assert list(zip(got.hashes.tolist(), got.slots.tolist())) == expected


def test_peel_reports_failure_on_a_cycle():
    # Two distinct hashes mapping to identical slot triples never peel.
    seg_len = 1
    assert peel(np.array([1, 2], dtype=np.uint64), seg_len) is None
    assert reference_peel([1, 2], seg_len) is None


@pytest.mark.parametrize("k", [8, 16])
def test_assign_matches_reference(rng, k):
    n = 1500
    seg_len, _ = capacity(n)
    hs = np.unique(rng.integers(0, 2**64, n, dtype=np.uint64, endpoint=False))
    stack = peel(hs, seg_len)
    assert stack is not None
    ref = reference_assign(list(zip(stack.hashes.tolist(), stack.slots.tolist())), seg_len, k)
    assert assign(stack, seg_len, k).tolist() == ref
