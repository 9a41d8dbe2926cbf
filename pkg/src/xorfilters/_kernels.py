"""Compiled inner loops for peeling and assignment.

These mirror ``hashing.segment_hashes`` / ``hashing.fingerprint`` exactly;
``tests/test_kernels.py`` cross-checks them against the pure Python versions.
"""

import numpy as np
from numba import njit

_M32 = np.uint64(0xFFFF_FFFF)
_S21 = np.uint64(21)
_S22 = np.uint64(22)
_S32 = np.uint64(32)
_S42 = np.uint64(42)
_S43 = np.uint64(43)


@njit(inline="always")
def _slot(h, j, seg_len):
    if j == 0:
        x = h
    elif j == 1:
        x = (h << _S21) | (h >> _S43)
    else:
        x = (h << _S42) | (h >> _S22)
    x &= _M32
    return np.int64((x * np.uint64(seg_len)) >> _S32) + j * seg_len


@njit(cache=True)
def slot_indexes(hashes, seg_len):
    out = np.empty((hashes.shape[0], 3), np.int64)
    for e in range(hashes.shape[0]):
        for j in range(3):
            out[e, j] = _slot(hashes[e], j, seg_len)
    return out


@njit(cache=True)
def peel(hashes, seg_len, three_queues):
    """Peel the 3-partite hypergraph of ``hashes``.

    Returns ``(stack_hashes, stack_slots, size)``; the mapping succeeded iff
    ``size == len(hashes)``.
    """
    n = hashes.shape[0]
    c = 3 * seg_len
    count = np.zeros(c, np.int32)
    mask = np.zeros(c, np.uint64)
    for e in range(n):
        h = hashes[e]
        for j in range(3):
            i = _slot(h, j, seg_len)
            count[i] += 1
            mask[i] ^= h

    stack_h = np.empty(n, np.uint64)
    stack_i = np.empty(n, np.int64)
    size = 0

    # queues[q] holds slots of segment q (or every slot when q == 0 and a
    # single queue is used); a slot enters a queue at most once.
    nq = 3 if three_queues else 1
    qlen = seg_len if three_queues else c
    queues = np.empty((nq, qlen), np.int64)
    heads = np.zeros(nq, np.int64)
    tails = np.zeros(nq, np.int64)
    for i in range(c):
        if count[i] == 1:
            q = i // seg_len if three_queues else 0
            queues[q, tails[q]] = i
            tails[q] += 1

    while True:
        q = -1
        for cand in range(nq):
            if heads[cand] < tails[cand]:
                q = cand
                break
        if q < 0:
            break
        i = queues[q, heads[q]]
        heads[q] += 1
        if count[i] != 1:
            continue
        h = mask[i]
        stack_h[size] = h
        stack_i[size] = i
        size += 1
        for j in range(3):
            s = _slot(h, j, seg_len)
            count[s] -= 1
            mask[s] ^= h
            if count[s] == 1:
                qs = j if three_queues else 0
                queues[qs, tails[qs]] = s
                tails[qs] += 1
    return stack_h, stack_i, size


@njit(cache=True)
def assign(stack_h, stack_i, seg_len, k, slots, writes):
    """Fill ``slots`` in reverse peel order.

    ``writes`` is either empty or a per-slot write counter.
    """
    fmask = np.uint64((1 << k) - 1)
    track = writes.shape[0] > 0
    for t in range(stack_h.shape[0] - 1, -1, -1):
        h = stack_h[t]
        i = stack_i[t]
        fp = (h ^ (h >> _S32)) & fmask
        slots[i] = 0
        v = fp
        for j in range(3):
            v ^= np.uint64(slots[_slot(h, j, seg_len)])
        slots[i] = v
        if track:
            writes[i] += 1
