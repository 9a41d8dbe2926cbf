"""Xor, xor+ and Bloom filters for approximate membership over 64-bit keys."""

from .bloom import BloomFilter, bloom_construct, optimal_hash_count
from .errors import (
    BadMagic,
    ConstructionFailed,
    FormatError,
    TruncatedPayload,
    UnknownKind,
    UnsupportedVersion,
)
from .kinds import FilterKind, build_filter
from .storage import deserialize, load, save, serialize
from .xorcore import XorFilter, capacity, construct
from .xorplus import RankedBitmap, XorPlusFilter, build_rank, construct_plus, space_estimate_plus

__all__ = [
    "BadMagic",
    "BloomFilter",
    "ConstructionFailed",
    "FilterKind",
    "FormatError",
    "RankedBitmap",
    "TruncatedPayload",
    "UnknownKind",
    "UnsupportedVersion",
    "XorFilter",
    "XorPlusFilter",
    "bloom_construct",
    "build_filter",
    "build_rank",
    "capacity",
    "construct",
    "construct_plus",
    "deserialize",
    "load",
    "optimal_hash_count",
    "save",
    "serialize",
    "space_estimate_plus",
]
