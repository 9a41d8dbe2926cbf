"""Measurement harness: key sets, mixed query sets, FPP, space and timing."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .kinds import Filter, FilterKind, build_filter

CSV_HEADER = ("kind", "n", "fraction", "bits_per_key", "fpp", "construct_ns_per_key", "query_ns_per_key")

# Sub-streams of the master seed, so query keys never correlate with inserted keys.
_STREAM_ABSENT = 1
_STREAM_QUERY = 2


def _random_u64(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.integers(0, 1 << 64, size=size, dtype=np.uint64, endpoint=False)


def generate_keys(n: int, seed: int) -> np.ndarray:
    """``n`` distinct pseudo-random 64-bit keys, reproducible from ``seed``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    keys = _random_u64(rng, n)
    while True:
        _, first = np.unique(keys, return_index=True)
        if len(first) == len(keys):
            return keys
        keys = keys[np.sort(first)]
        keys = np.concatenate((keys, _random_u64(rng, n - len(keys))))


def absent_keys(inserted: np.ndarray, m: int, seed: int) -> np.ndarray:
    """``m`` keys guaranteed not to be in ``inserted``, drawn from their own stream."""
    rng = np.random.default_rng([seed, _STREAM_ABSENT])
    inserted = np.asarray(inserted, dtype=np.uint64)
    out = np.empty(0, dtype=np.uint64)
    while len(out) < m:
        cand = _random_u64(rng, m - len(out))
        out = np.concatenate((out, cand[~np.isin(cand, inserted)]))
    return out


def build_query_set(inserted, fraction: float, m: int, seed: int) -> np.ndarray:
    """``m`` query keys of which ``round(fraction * m)`` are inserted keys.

    Present keys are sampled with replacement; the rest are guaranteed
    absent.  The result is shuffled.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    if m < 1:
        raise ValueError("query count must be at least 1")
    inserted = np.asarray(inserted, dtype=np.uint64)
    present = round(fraction * m)
    if present and not len(inserted):
        raise ValueError("cannot draw present keys from an empty key set")
    rng = np.random.default_rng([seed, _STREAM_QUERY])
    picked = inserted[rng.integers(0, len(inserted), present)] if present else np.empty(0, np.uint64)
    queries = np.concatenate((picked, absent_keys(inserted, m - present, seed)))
    return queries[rng.permutation(m)]


def measure_fpp(f: Filter, absent) -> float:
    absent = np.asarray(absent, dtype=np.uint64)
    if not len(absent):
        raise ValueError("no keys to measure")
    return f.count_positives(absent) / len(absent)


@dataclass
class BenchConfig:
    kind: FilterKind
    n: int = 1_000_000
    query_count: int = 10_000_000
    fractions: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    seed: int = 0
    repetitions: int = 3
    # "batch" times one vectorized pass per query set; "scalar" calls
    # contains() once per key from a Python loop.
    query_mode: str = "batch"

    def __post_init__(self):
        self.kind = FilterKind(self.kind)
        if self.n < 1 or self.query_count < 1 or self.repetitions < 1:
            raise ValueError("n, query_count and repetitions must all be at least 1")
        if any(not 0.0 <= f <= 1.0 for f in self.fractions):
            raise ValueError("fractions must lie in [0, 1]")
        if self.query_mode not in ("batch", "scalar"):
            raise ValueError(f"unknown query mode {self.query_mode!r}")


@dataclass
class BenchRow:
    kind: str
    n: int
    fraction: float
    bits_per_key: float
    fpp: float
    construct_ns_per_key: float
    query_ns_per_key: float
    positives: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def extend(self, other: BenchReport) -> None:
        self.rows.extend(other.rows)

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            d = asdict(row)
            writer.writerow([d[col] for col in CSV_HEADER])
        return None if fh is not None else out.getvalue()

    def format_table(self) -> str:
        head = f"{'kind':<10} {'n':>10} {'find':>5} {'bits/key':>9} {'FPP %':>9} {'build ns/key':>13} {'query ns/key':>13}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(
                f"{r.kind:<10} {r.n:>10} {r.fraction:>5.2f} {r.bits_per_key:>9.3f} {100 * r.fpp:>9.4f}"
                f" {r.construct_ns_per_key:>13.1f} {r.query_ns_per_key:>13.1f}"
            )
        return "\n".join(lines)


def _count_matches(f: Filter, queries: np.ndarray, mode: str) -> int:
    if mode == "batch":
        return f.count_positives(queries)
    contains = f.contains
    matches = 0
    for key in queries.tolist():
        matches += contains(key)
    return matches


def run_benchmark(config: BenchConfig) -> BenchReport:
    """Build and query one filter kind ``repetitions`` times; report medians.

    Timings are wall-clock over the whole construction or query loop divided
    by the key or query count.
    """
    keys = generate_keys(config.n, config.seed)
    query_sets = [build_query_set(keys, frac, config.query_count, config.seed) for frac in config.fractions]

    construct_ns: list[float] = []
    query_ns: list[list[float]] = [[] for _ in config.fractions]
    positives: list[list[int]] = [[] for _ in config.fractions]
    # compiled kernels load on first use; keep that out of the timings
    build_filter(config.kind, keys[:64], config.seed)
    flt = None
    for _ in range(config.repetitions):
        t0 = time.perf_counter_ns()
        flt = build_filter(config.kind, keys, config.seed)
        construct_ns.append((time.perf_counter_ns() - t0) / config.n)
        for q, queries in enumerate(query_sets):
            t0 = time.perf_counter_ns()
            matches = _count_matches(flt, queries, config.query_mode)
            query_ns[q].append((time.perf_counter_ns() - t0) / len(queries))
            positives[q].append(matches)

    report = BenchReport()
    for q, frac in enumerate(config.fractions):
        present = round(frac * config.query_count)
        absent = config.query_count - present
        pos = int(statistics.median(positives[q]))
        fpp = (pos - present) / absent if absent else 0.0
        report.rows.append(BenchRow(
            kind=config.kind.value,
            n=config.n,
            fraction=frac,
            bits_per_key=flt.size_in_bits() / config.n,
            fpp=fpp,
            construct_ns_per_key=statistics.median(construct_ns),
            query_ns_per_key=statistics.median(query_ns[q]),
            positives=pos,
        ))
    return report


THEORY_KINDS = ("bloom", "xor", "xorplus", "lower_bound")


def theoretical_space(kind: str, epsilon: float) -> float:
    """Bits per key needed for false-positive probability ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    bits = -math.log2(epsilon)
    if kind == "bloom":
        return 1.44 * bits
    if kind == "xor":
        return 1.23 * bits
    if kind == "xorplus":
        return 1.0824 * bits + 0.5125
    if kind == "lower_bound":
        return bits
    raise ValueError(f"unknown kind {kind!r}; expected one of {THEORY_KINDS}")
