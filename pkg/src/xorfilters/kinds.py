from __future__ import annotations

import enum

from .bloom import BloomFilter, bloom_construct
from .xorcore import XorFilter, construct
from .xorplus import XorPlusFilter, construct_plus

Filter = XorFilter | XorPlusFilter | BloomFilter


class FilterKind(str, enum.Enum):
    XOR8 = "xor8"
    XOR16 = "xor16"
    XORPLUS8 = "xorplus8"
    XORPLUS16 = "xorplus16"
    BLOOM8 = "bloom8"
    BLOOM12 = "bloom12"
    BLOOM16 = "bloom16"

    @property
    def code(self) -> int:
        """Byte stored in the file header."""
        return _CODES[self]

    @classmethod
    def from_code(cls, code: int) -> FilterKind:
        for kind, c in _CODES.items():
            if c == code:
                return kind
        raise ValueError(f"unknown filter kind code {code}")

    @property
    def width(self) -> int:
        """Fingerprint bits for xor kinds, bits per key for Bloom kinds."""
        return int("".join(ch for ch in self.value if ch.isdigit()))

    @property
    def family(self) -> str:
        return self.value.rstrip("0123456789")


_CODES = {
    FilterKind.XOR8: 1,
    FilterKind.XOR16: 2,
    FilterKind.XORPLUS8: 3,
    FilterKind.XORPLUS16: 4,
    FilterKind.BLOOM8: 5,
    FilterKind.BLOOM12: 6,
    FilterKind.BLOOM16: 7,
}


def build_filter(kind: FilterKind | str, keys, seed: int = 0) -> Filter:
    kind = FilterKind(kind)
    if kind.family == "xor":
        return construct(keys, kind.width, seed)
    if kind.family == "xorplus":
        return construct_plus(keys, kind.width, seed)
    return bloom_construct(keys, kind.width, seed)
