import math

import numpy as np
import pytest

from xorfilters.bloom import (
    BloomFilter,
    _positions_array,
    _probe_positions,
    bloom_construct,
    bloom_contains,
    optimal_hash_count,
)
from xorfilters.hashing import mix64, mix64_array


@pytest.mark.parametrize("bpk, k", [(8, 6), (12, 8), (16, 11), (0.5, 1), (1, 1)])
def test_optimal_hash_count(bpk, k):
    assert optimal_hash_count(bpk) == k


def test_optimal_hash_count_rejects_nonpositive():
    with pytest.raises(ValueError):
        optimal_hash_count(0)


def test_empty_filter():
    f = bloom_construct([], 8, 0)
    assert not f.bits.any()
    assert not bloom_contains(f, 123)
    assert not f.contains_many(np.arange(1000, dtype=np.uint64)).any()


def test_positions_match_scalar(rng):
    hs = rng.integers(0, 2**64, 500, dtype=np.uint64, endpoint=False)
    m = 1_234_567
    cols = [p.tolist() for p in _positions_array(hs, 11, m)]
    for e, h in enumerate(hs.tolist()):
        assert list(_probe_positions(h, 11, m)) == [c[e] for c in cols]
        assert all(0 <= p < m for p in _probe_positions(h, 11, m))


def test_probe_positions_double_hashing():
    h = mix64(99, 5)
    h1, h2 = h & 0xFFFFFFFF, h >> 32
    m = 1000
    assert list(_probe_positions(h, 4, m)) == [((h1 + i * h2) % 2**32) * m >> 32 for i in range(4)]


@pytest.mark.parametrize("bpk", [8, 12, 16])
def test_sizes(bpk):
    f = bloom_construct(range(1000), bpk, 0)
    assert f.m == bpk * 1000
    assert f.size_in_bits() == bpk * 1000
    assert f.num_hashes == optimal_hash_count(bpk)
    assert f.kind == f"bloom{bpk}"


@pytest.mark.parametrize("bpk", [8, 12, 16])
def test_no_false_negatives(rng, bpk):
    keys = rng.integers(0, 2**64, 20_000, dtype=np.uint64, endpoint=False)
    f = bloom_construct(keys, bpk, 3)
    assert f.contains_many(keys).all()
    assert all(bloom_contains(f, k) for k in keys[:300].tolist())


def test_scalar_and_batch_agree(rng):
    f = bloom_construct(rng.integers(0, 2**64, 5000, dtype=np.uint64, endpoint=False), 8, 1)
    probes = rng.integers(0, 2**64, 20_000, dtype=np.uint64, endpoint=False)
    assert f.contains_many(probes).tolist() == [f.contains(p) for p in probes.tolist()]


def test_monotone_under_insertion(rng):
    keys = rng.integers(0, 2**64, 4000, dtype=np.uint64, endpoint=False)
    probes = rng.integers(0, 2**64, 50_000, dtype=np.uint64, endpoint=False)
    small = bloom_construct(keys[:2000], 16, 7)
    # same m so the bit arrays are comparable: set the remaining keys' bits by hand
    bits = np.unpackbits(small.bits, bitorder="little").astype(bool)
    for p in _positions_array(mix64_array(keys[2000:], 7), small.num_hashes, small.m):
        bits[p] = True
    grown = BloomFilter(seed=7, m=small.m, num_hashes=small.num_hashes,
                        bits=np.packbits(bits, bitorder="little"), n=4000, bits_per_key_target=16)
    before = small.contains_many(probes)
    after = grown.contains_many(probes)
    assert not (before & ~after).any()
    assert grown.contains_many(keys).all()


def test_rejects_unsupported_bits_per_key():
    with pytest.raises(ValueError):
        bloom_construct([1], 10, 0)


def test_fpp_near_theory(rng):
    n = 100_000
    keys = rng.integers(0, 2**64, n, dtype=np.uint64, endpoint=False)
    probes = rng.integers(0, 2**64, 1_000_000, dtype=np.uint64, endpoint=False)
    for bpk in (8, 12):
        f = bloom_construct(keys, bpk, 2)
        k = f.num_hashes
        theory = (1 - math.exp(-k / bpk)) ** k
        assert f.count_positives(probes) / len(probes) == pytest.approx(theory, rel=0.1)
