"""Command-line frontend.

Exit statuses: 0 success, 1 verification mismatch, 2 I/O or format error.
Bits per node are always ``8 * container bytes / |V|``, header included.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import codec, generators, naive
from .backends import NAMES as BACKENDS
from .bdd import InvalidBddError, count_solutions, evaluate_all, first_mismatch
from .textio import BddFormatError, read_bdd_text, write_bdd_text

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2

EXHAUSTIVE_VARS = 12


class CliError(Exception):
    pass


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write_atomic(path, data: bytes) -> None:
    # write next to the target then rename, so failures leave nothing behind
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except OSError as exc:
        os.unlink(tmp)
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def load_text(path):
    try:
        return read_bdd_text(_read(path))
    except (BddFormatError, InvalidBddError) as exc:
        raise CliError(f"{path}: {exc}") from None


def decode_any(data: bytes):
    """Decode either container kind, dispatching on the magic bytes."""
    if data[:4] == codec.MAGIC:
        return codec.decode(data)
    if data[:4] == naive.MAGIC:
        return naive.naive_decode(data)
    raise codec.DecodeError("unrecognized container (bad magic)")


def load_container(path):
    try:
        return decode_any(_read(path))
    except codec.DecodeError as exc:
        raise CliError(f"{path}: {exc}") from None


def bits_per_node(nbytes: int, nodes: int) -> float:
    return 8.0 * nbytes / nodes


def _config(args) -> codec.CodecConfig:
    try:
        return codec.CodecConfig(args.th, args.tf, not args.no_delta, args.backend)
    except ValueError as exc:
        raise CliError(str(exc)) from None


# ----------------------------------------------------------------- commands


def cmd_compress(args) -> int:
    bdd = load_text(args.input)
    if args.naive:
        data = naive.naive_encode(bdd, args.backend)
    else:
        data = codec.encode(bdd, _config(args))
    _write_atomic(args.output, data)
    print(f"{args.input}: |V|={len(bdd)} bytes={len(data)} bits/node={bits_per_node(len(data), len(bdd)):.3f}")
    return EXIT_OK


def cmd_decompress(args) -> int:
    bdd = load_container(args.input)
    _write_atomic(args.output, write_bdd_text(bdd))
    return EXIT_OK


def verify_pair(original, decoded) -> str | None:
    """None if the two agree, otherwise a one-line description."""
    diff = first_mismatch(original, decoded)
    if diff is not None:
        return diff
    if original.num_vars <= EXHAUSTIVE_VARS:
        a, b = evaluate_all(original), evaluate_all(decoded)
        bad = (a != b).nonzero()[0]
        if bad.shape[0]:
            word = format(int(bad[0]), f"0{original.num_vars}b")
            return f"functions differ on {bad.shape[0]} assignments, first x={word}"
    return None


def cmd_verify(args) -> int:
    original = load_text(args.original)
    decoded = load_container(args.container)
    diff = verify_pair(original, decoded)
    if diff is not None:
        print(f"MISMATCH: {diff}")
        return EXIT_MISMATCH
    extra = " (exhaustive check passed)" if original.num_vars <= EXHAUSTIVE_VARS else ""
    print(f"OK: isomorphic, |V|={len(original)}{extra}")
    return EXIT_OK


def cmd_stats(args) -> int:
    data = _read(args.input)
    if data[:4] in (codec.MAGIC, naive.MAGIC):
        bdd = load_container(args.input)
    else:
        bdd = load_text(args.input)
    cfg = _config(args)
    streams = codec.build_streams(bdd, cfg)
    packed = codec.serialize(streams)
    plain = naive.naive_encode(bdd, cfg.backend)
    rows = [
        ("vars", bdd.num_vars),
        ("nodes", len(bdd)),
        ("edges", bdd.num_edges),
        ("solutions", count_solutions(bdd)),
        ("long tree edges", streams.long_tree_count),
        ("deferred slots", streams.deferred_count()),
        ("forward edges", streams.forward_count),
        ("tail entries", int(streams.tail_stream.shape[0])),
        ("codec bytes", len(packed)),
        ("codec bits/node", f"{bits_per_node(len(packed), len(bdd)):.3f}"),
        ("naive bytes", len(plain)),
        ("naive bits/node", f"{bits_per_node(len(plain), len(bdd)):.3f}"),
        ("naive/codec", f"{len(plain) / len(packed):.3f}"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.kind == "queens":
            bdd = generators.queens(args.n, args.cols)
        elif args.kind == "rook":
            bdd = generators.rook(args.n, args.cols)
        else:
            bdd = generators.random_bdd(args.n, seed=args.seed, num_vars=args.vars)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    data = write_bdd_text(bdd)
    if args.output in (None, "-"):
        sys.stdout.buffer.write(data)
    else:
        _write_atomic(args.output, data)
    return EXIT_OK


BENCH_FIELDS = ["file", "nodes", "codec_bytes", "codec_bits_per_node", "naive_bytes", "naive_bits_per_node", "ratio"]


def bench_file(path: str, cfg: codec.CodecConfig):
    """One bench row, or an error string."""
    try:
        bdd = read_bdd_text(Path(path).read_bytes())
    except (OSError, BddFormatError, InvalidBddError) as exc:
        return f"skipping {path}: {exc}"
    c = len(codec.encode(bdd, cfg))
    m = len(naive.naive_encode(bdd, cfg.backend))
    return {
        "file": os.path.basename(path),
        "nodes": len(bdd),
        "codec_bytes": c,
        "codec_bits_per_node": f"{bits_per_node(c, len(bdd)):.3f}",
        "naive_bytes": m,
        "naive_bits_per_node": f"{bits_per_node(m, len(bdd)):.3f}",
        "ratio": f"{m / c:.3f}",
    }


def cmd_bench(args) -> int:
    folder = Path(args.directory)
    if not folder.is_dir():
        raise CliError(f"{folder} is not a directory")
    files = sorted(str(p) for p in folder.iterdir() if p.is_file() and not p.name.startswith("."))
    if not files:
        raise CliError(f"{folder} contains no files")
    cfg = _config(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(bench_file, files, [cfg] * len(files)))
    else:
        results = [bench_file(f, cfg) for f in files]
    rows = []
    for r in results:
        if isinstance(r, str):
            print(f"warning: {r}", file=sys.stderr)
        else:
            rows.append(r)
    if not rows:
        raise CliError("no file could be processed")
    if args.csv:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, BENCH_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in BENCH_FIELDS}
        print("  ".join(k.ljust(widths[k]) for k in BENCH_FIELDS))
        for r in rows:
            print("  ".join(str(r[k]).ljust(widths[k]) for k in BENCH_FIELDS))
    return EXIT_OK


# ------------------------------------------------------------------ parsing


def _add_codec_flags(p):
    defaults = codec.CodecConfig()
    p.add_argument("--th", type=int, default=defaults.indegree_threshold, help="in-degree threshold for in-place ids")
    p.add_argument("--tf", type=int, default=defaults.forward_min_count, help="minimum qualifying edges to emit forward section")
    p.add_argument("--no-delta", action="store_true", help="store the tail stream raw")
    p.add_argument("--backend", choices=sorted(BACKENDS), default=defaults.backend)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdz", description="Compact lossless encoding of reduced ordered BDDs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="text BDD -> container")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--naive", action="store_true", help="write the baseline container instead")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="container -> canonical text BDD")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", help="check a container against the original text BDD")
    p.add_argument("original")
    p.add_argument("container")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="stream and size breakdown")
    p.add_argument("-i", "--input", required=True)
    _add_codec_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="generate an instance as text")
    p.add_argument("kind", choices=["queens", "rook", "random"])
    p.add_argument("n", type=int, help="board rows, or node budget for random")
    p.add_argument("--cols", type=int, default=None, help="board columns (default: square)")
    p.add_argument("--vars", type=int, default=None, help="variable count for random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="size table over a directory of text BDDs")
    p.add_argument("directory")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    _add_codec_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
