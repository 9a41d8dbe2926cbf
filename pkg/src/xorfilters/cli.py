"""Command-line interface: build, query, inspect, bench, theory.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, storage
from .errors import ConstructionFailed, FormatError
from .hashing import MASK64
from .kinds import FilterKind, build_filter
from .xorplus import XorPlusFilter

EXIT_USAGE = 1
EXIT_DATA = 2


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_keys(path: str, raw: bool = False) -> np.ndarray:
    """Read 64-bit keys: one decimal or 0x-hex integer per line, or raw LE records."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    if raw:
        if len(data) % 8:
            raise DataError(f"{path}: raw key file length {len(data)} is not a multiple of 8")
        return np.frombuffer(data, dtype="<u8").astype(np.uint64)
    keys = []
    for lineno, line in enumerate(data.decode("ascii", errors="replace").splitlines(), 1):
        tok = line.strip()
        if not tok:
            continue
        try:
            key = int(tok[2:], 16) if tok[:2].lower() == "0x" else int(tok, 10)
        except ValueError:
            raise DataError(f"{path}:{lineno}: not an integer: {tok!r}") from None
        if not 0 <= key <= MASK64:
            raise DataError(f"{path}:{lineno}: {tok} does not fit in 64 unsigned bits")
        keys.append(key)
    return np.array(keys, dtype=np.uint64)


def _load(path: str):
    try:
        return storage.load(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def cmd_build(args) -> int:
    keys = read_keys(args.keys, args.raw)
    f = build_filter(args.kind, keys, args.seed)
    try:
        storage.save(f, args.out)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc.strerror}") from None
    print(f"{f.kind}: {f.n} keys, {f.size_in_bits() / max(f.n, 1):.3f} bits/key -> {args.out}", file=sys.stderr)
    return 0


def cmd_query(args) -> int:
    f = _load(args.filter)
    keys = read_keys(args.keys, args.raw)
    hits = f.contains_many(keys)
    out = sys.stdout
    for key, hit in zip(keys.tolist(), hits.tolist()):
        out.write(f"{key}\t{'maybe' if hit else 'no'}\n")
    return 0


def cmd_inspect(args) -> int:
    try:
        with open(args.filter, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {args.filter}: {exc.strerror}") from None
    header = storage.read_header(data)
    f = storage.deserialize(data)
    kind = header["kind"]
    print(f"kind          {kind.value}")
    print(f"version       {storage.FORMAT_VERSION}")
    print(f"{'hashes' if kind.family == 'bloom' else 'k':<14}{header['k']}")
    print(f"seed          0x{header['seed']:016x}")
    print(f"n             {header['n']}")
    print(f"{'m' if kind.family == 'bloom' else 'segment'}{'':<{13 if kind.family == 'bloom' else 7}}{header['size']}")
    if isinstance(f, XorPlusFilter):
        print(f"last occupied {len(f.packed)} of {f.seg_len} ({100 * (1 - f.empty_fraction()):.1f}%)")
    print(f"bytes         {len(data)}")
    print(f"payload bits  {f.size_in_bits()}")
    bpk = f.size_in_bits() / f.n if f.n else float("inf")
    print(f"bits/key      {bpk:.4f}")
    return 0


def _fractions(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from None
    if not values or any(not 0 <= v <= 1 for v in values):
        raise argparse.ArgumentTypeError("fractions must be in [0, 1]")
    return values


def _kinds(text: str) -> list[FilterKind]:
    try:
        return [FilterKind(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        choices = ", ".join(k.value for k in FilterKind)
        raise argparse.ArgumentTypeError(f"unknown kind in {text!r} (choose from {choices})") from None


def cmd_bench(args) -> int:
    kinds = [k for group in args.kind for k in group] if args.kind else list(FilterKind)
    report = bench.BenchReport()
    for kind in kinds:
        config = bench.BenchConfig(
            kind=kind, n=args.n, query_count=args.queries, fractions=args.fractions,
            seed=args.seed, repetitions=args.reps, query_mode=args.mode,
        )
        report.extend(bench.run_benchmark(config))
    print(report.format_table())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            report.to_csv(fh)
    return 0


def cmd_theory(args) -> int:
    print(f"{'epsilon':>10} " + " ".join(f"{k:>12}" for k in bench.THEORY_KINDS))
    for eps in args.epsilon:
        row = " ".join(f"{bench.theoretical_space(k, eps):>12.3f}" for k in bench.THEORY_KINDS)
        print(f"{eps:>10.3g} {row}")
    return 0


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xorfilters", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in FilterKind]

    p = sub.add_parser("build", help="build a filter from a key file")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--keys", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--raw", action="store_true", help="keys are little-endian 8-byte records")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="query every key of a key file")
    p.add_argument("--filter", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--raw", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("inspect", help="print header fields and space usage")
    p.add_argument("--filter", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("bench", help="measure FPP, space and timings")
    p.add_argument("--kind", type=_kinds, action="append",
                   help=f"comma-separated kinds, repeatable (default: all of {', '.join(kinds)})")
    p.add_argument("--n", type=_positive_int, default=1_000_000)
    p.add_argument("--queries", type=_positive_int, default=10_000_000)
    p.add_argument("--fractions", type=_fractions, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--reps", type=_positive_int, default=3)
    p.add_argument("--mode", choices=["batch", "scalar"], default="batch")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("theory", help="theoretical bits/key against false-positive probability")
    p.add_argument("--epsilon", type=float, nargs="+",
                   default=[2 ** -4, 2 ** -8, 0.01, 0.001, 2 ** -16, 1e-6])
    p.set_defaults(func=cmd_theory)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DataError, FormatError, ConstructionFailed) as exc:
        print(f"xorfilters: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
