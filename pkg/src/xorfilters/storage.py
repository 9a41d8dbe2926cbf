"""Binary file format shared by all filter kinds.

Layout (all integers little-endian)::

    offset  size  field
    0       4     magic, b"XFLT"
    4       2     format version (1)
    6       1     kind code (see FilterKind)
    7       1     fingerprint bits (xor kinds) or hash count (Bloom)
    8       8     seed used by the hash function
    16      8     number of distinct keys
    24      8     segment length (xor kinds) or bit count m (Bloom)
    32      ...   payload

Payloads:

* xor: ``3 * seg_len`` slots, one byte (k=8) or two bytes (k=16) each.
* xor+: ``2 * seg_len`` dense slots; the last-segment occupancy bitmap as
  ``ceil(seg_len / 64)`` 64-bit words (bit i of word w is slot 64 w + i);
  the rank index as two 64-bit words per 512-bit block, for
  ``seg_len // 512 + 1`` blocks; then one slot per set occupancy bit.
* Bloom: ``ceil(m / 8)`` bytes, bit p is bit ``p % 8`` of byte ``p // 8``.
"""

from __future__ import annotations

import struct

import numpy as np

from .bloom import BloomFilter
from .errors import BadMagic, FormatError, TrailingData, TruncatedPayload, UnknownKind, UnsupportedVersion
from .kinds import Filter, FilterKind
from .xorcore import XorFilter
from .xorplus import BLOCK_BITS, RankedBitmap, XorPlusFilter

MAGIC = b"XFLT"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHBBQQQ")


def _slot_dtype(k: int) -> np.dtype:
    return np.dtype("u1") if k == 8 else np.dtype("<u2")


def _kind_of(f: Filter) -> FilterKind:
    return FilterKind(f.kind)


def serialize(f: Filter) -> bytes:
    kind = _kind_of(f)
    if isinstance(f, BloomFilter):
        header = HEADER.pack(MAGIC, FORMAT_VERSION, kind.code, f.num_hashes, f.seed, f.n, f.m)
        return header + f.bits.astype(np.uint8).tobytes()

    header = HEADER.pack(MAGIC, FORMAT_VERSION, kind.code, f.k, f.seed, f.n, f.seg_len)
    dt = _slot_dtype(f.k)
    if isinstance(f, XorFilter):
        return header + f.slots.astype(dt).tobytes()
    return b"".join((
        header,
        f.dense.astype(dt).tobytes(),
        f.occupancy.words.astype("<u8").tobytes(),
        f.occupancy.counts.astype("<u8").tobytes(),
        f.packed.astype(dt).tobytes(),
    ))


class _Reader:
    def __init__(self, data: bytes, offset: int):
        self.data = data
        self.offset = offset

    def take(self, dtype, count: int, field: str) -> np.ndarray:
        dtype = np.dtype(dtype)
        nbytes = dtype.itemsize * count
        if self.offset + nbytes > len(self.data):
            raise TruncatedPayload(
                f"need {nbytes} bytes, {len(self.data) - self.offset} left", field, self.offset
            )
        out = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset)
        self.offset += nbytes
        return out.astype(dtype.newbyteorder("="))

    def finish(self) -> None:
        if self.offset != len(self.data):
            raise TrailingData(f"{len(self.data) - self.offset} unexpected bytes", "payload", self.offset)


def read_header(data: bytes) -> dict:
    """Decode and validate the fixed header."""
    if len(data) < HEADER.size:
        raise TruncatedPayload(f"header needs {HEADER.size} bytes, got {len(data)}", "header", len(data))
    magic, version, code, k, seed, n, size = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, got {magic!r}", "magic", 0)
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format version {version} is not supported", "formatVersion", 4)
    try:
        kind = FilterKind.from_code(code)
    except ValueError:
        raise UnknownKind(f"unknown kind code {code}", "kind", 6) from None
    if kind.family != "bloom" and k != kind.width:
        raise FormatError(f"kind {kind.value} requires k={kind.width}, got {k}", "k", 7)
    return {"kind": kind, "k": k, "seed": seed, "n": n, "size": size}


def deserialize(data: bytes) -> Filter:
    data = bytes(data)
    h = read_header(data)
    kind, k, seed, n, size = h["kind"], h["k"], h["seed"], h["n"], h["size"]
    r = _Reader(data, HEADER.size)

    if kind.family == "bloom":
        if k < 1:
            raise FormatError("hash count must be at least 1", "k", 7)
        bits = r.take("u1", -(-size // 8), "bits")
        r.finish()
        return BloomFilter(seed=seed, m=size, num_hashes=k, bits=bits, n=n, bits_per_key_target=kind.width)

    dt = _slot_dtype(k)
    if kind.family == "xor":
        slots = r.take(dt, 3 * size, "slots")
        r.finish()
        return XorFilter(seed=seed, k=k, seg_len=size, slots=slots, n=n)

    dense = r.take(dt, 2 * size, "dense")
    words_at = r.offset
    words = r.take("<u8", -(-size // 64), "occupancy")
    counts = r.take("<u8", 2 * (size // BLOCK_BITS + 1), "rank")
    try:
        occupancy = RankedBitmap.from_words(words, size)
    except ValueError as exc:
        raise FormatError(str(exc), "occupancy", words_at) from None
    if not np.array_equal(occupancy.counts, counts):
        raise FormatError("rank index does not match occupancy bitmap", "rank", words_at + 8 * len(words))
    packed = r.take(dt, occupancy.count(), "packed")
    r.finish()
    return XorPlusFilter(seed=seed, k=k, seg_len=size, dense=dense, occupancy=occupancy, packed=packed, n=n)


def save(f: Filter, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(f))


def load(path) -> Filter:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
