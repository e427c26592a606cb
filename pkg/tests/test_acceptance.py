"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session (and immediately with ``-s``).
"""

import math
import random
import time

import numpy as np

from bdz import codec
from bdz.bdd import evaluate_all, isomorphic
from bdz.cli import decode_any, main, verify_pair
from bdz.codec import CodecConfig, DecodeError, build_streams, decode, encode
from bdz.generators import queens, random_bdd
from bdz.naive import naive_encode
from bdz.ordering import dag_layer_order
from bdz.spanning import (build_spanning_tree, exhaustive_min_long_edges, forbidden_children,
                          long_tree_edges, min_long_edge_count, nontree_edges)
from bdz.textio import write_bdd_text
from corpus import golden20, random_corpus, tiny_corpus

RESULTS: list = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)


def gate(number: int, ok: bool, detail: str) -> None:
    report(number, ok, detail)
    assert ok, detail


def bits(a) -> str:
    return "".join(str(int(x)) for x in a)


# 1 ---------------------------------------------------------------------


def test_golden_fixture():
    start = time.perf_counter()
    b = golden20()
    s = build_streams(b, CodecConfig(indegree_threshold=5, forward_min_count=2, delta_enabled=True, backend="store"))
    data = codec.serialize(s)
    back = decode(data)
    elapsed = time.perf_counter() - start
    checks = {
        "tree": bits(s.tree_bits) == "11111111011101101010000000010100" + "11000000",
        "long": s.long_tree_count == 0,
        "sh": s.sh_stream.tolist() == [0, 0, 19, 19, 19, 19, 0, 19, 0, 19, 0, 0, 0, 0, 0, 19, 0],
        "fwd": bits(s.forward_bitvector) == "0000010010" and s.forward_lengths.tolist() == [2, 2],
        "tail": s.tail_stream.tolist() == [9, 3, 2, 1, 1, 1, 1, 2],
        "roundtrip": isomorphic(back, b),
        "time": elapsed < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    gate(1, not bad, f"20-node fixture streams exact, {elapsed * 1000:.1f} ms" + (f"; failed: {bad}" if bad else ""))


# 2 ---------------------------------------------------------------------


def test_tree_edge_count():
    corpus = random_corpus()
    bad = 0
    for b in corpus:
        tree = build_spanning_tree(b)
        s_bits = codec.encode_tree(tree)
        if tree.num_edges != b.num_edges // 2 + 1 or b.num_edges % 2 or s_bits.shape[0] != 2 * len(b):
            bad += 1
    sizes = [len(b) for b in corpus]
    gate(2, bad == 0, f"{len(corpus)} BDDs (|V| {min(sizes)}..{max(sizes)}): tree edges = |E|/2+1, tree bits = 2|V|; {bad} violations")


# 3 ---------------------------------------------------------------------

ROUNDTRIP_CONFIGS = [CodecConfig(th, 4, delta, backend) for th in (2, 5) for delta in (True, False) for backend in ("store", "deflate")]


def test_roundtrip_all_configs():
    corpus = random_corpus()
    start = time.perf_counter()
    failures = []
    exhaustive = 0
    for i, b in enumerate(corpus):
        table = evaluate_all(b) if b.num_vars <= 12 else None
        for cfg in ROUNDTRIP_CONFIGS:
            out = decode(encode(b, cfg))
            if not isomorphic(out, b):
                failures.append((i, cfg))
                continue
            if table is not None:
                exhaustive += 1
                if not np.array_equal(evaluate_all(out), table):
                    failures.append((i, cfg))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 600
    gate(3, ok, f"{len(corpus)} BDDs x {len(ROUNDTRIP_CONFIGS)} configs isomorphic, {exhaustive} exhaustive checks, "
                f"{len(failures)} failures, {elapsed:.1f} s (limit 600 s)")


# 4 ---------------------------------------------------------------------


def test_long_edge_minimality():
    corpus = random_corpus()
    bad_lb = sum(len(long_tree_edges(b, build_spanning_tree(b))) != min_long_edge_count(b) for b in corpus)
    tiny = tiny_corpus()
    bad_ex = 0
    for b in tiny:
        built = len(long_tree_edges(b, build_spanning_tree(b)))
        if built != exhaustive_min_long_edges(b) or built != min_long_edge_count(b):
            bad_ex += 1
    with_long = sum(min_long_edge_count(b) > 0 for b in tiny)
    gate(4, bad_lb == 0 and bad_ex == 0,
         f"{len(corpus)} random: {bad_lb} above minimum; {len(tiny)} exhaustive ({with_long} with forced long edges): {bad_ex} mismatches")


# 5 ---------------------------------------------------------------------


def test_nontree_edges_avoid_forbidden_children():
    corpus = random_corpus()
    violations = 0
    checked = 0
    for b in corpus:
        tree = build_spanning_tree(b)
        order = dag_layer_order(b)
        src, dst, _ = nontree_edges(b, tree)
        for u in np.unique(src):
            banned = forbidden_children(b, tree, int(u), order)
            targets = dst[src == u]
            checked += targets.shape[0]
            violations += sum(int(v) in banned for v in targets)
    gate(5, violations == 0, f"{checked} nontree edges over {len(corpus)} BDDs, {violations} into forbidden children")


# 6 ---------------------------------------------------------------------


def test_compression_quality():
    q8 = queens(8)
    c = len(encode(q8))
    m = len(naive_encode(q8))
    bpn = 8 * c / len(q8)
    ratio = m / c
    big = queens(7, 11)
    cb, mb = len(encode(big)), len(naive_encode(big))
    ok = bpn <= 8.0 and ratio >= 2.0 and len(big) >= 100_000 and cb < mb
    gate(6, ok, f"queens(8) |V|={len(q8)}: {bpn:.3f} bits/node (<= 8.0), naive/codec {ratio:.2f} (>= 2.0); "
                f"queens 7x11 |V|={len(big)}: codec {cb} B < naive {mb} B")


# 7 ---------------------------------------------------------------------


def _best_of(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def test_linear_scaling():
    decode(encode(random_bdd(2000, seed=0)))  # compile kernels before timing
    rows = []
    for target, repeat in ((10_000, 5), (100_000, 3), (1_000_000, 2)):
        b = random_bdd(target, seed=target)
        data = encode(b)
        t_enc = _best_of(lambda: encode(b), repeat)
        t_dec = _best_of(lambda: decode(data), repeat)
        rows.append((len(b), t_enc, t_dec))
    lines = [f"{'|V|':>9} {'encode s':>9} {'decode s':>9} {'enc x/dbl':>9} {'dec x/dbl':>9}"]
    worst = 0.0
    for k, (n, te, td) in enumerate(rows):
        if k:
            n0, te0, td0 = rows[k - 1]
            doublings = math.log2(n / n0)
            fe = (te / te0) ** (1 / doublings)
            fd = (td / td0) ** (1 / doublings)
            worst = max(worst, fe, fd)
            lines.append(f"{n:>9} {te:>9.4f} {td:>9.4f} {fe:>9.2f} {fd:>9.2f}")
        else:
            lines.append(f"{n:>9} {te:>9.4f} {td:>9.4f} {'-':>9} {'-':>9}")
    table = "\n".join(lines)
    print(table)
    gate(7, worst <= 2.5, f"worst growth per doubling {worst:.2f}x (limit 2.5x)\n{table}")


# 8 ---------------------------------------------------------------------


def test_bench_on_user_file(tmp_path, capsys):
    # stands in for an externally supplied instance: any valid text file
    user = tmp_path / "user"
    user.mkdir()
    (user / "instance.bdd").write_bytes(write_bdd_text(random_bdd(20_000, seed=99)))
    code = main(["bench", str(user), "--csv"])
    rows = capsys.readouterr().out.strip().splitlines()
    ok = code == 0 and len(rows) == 2 and rows[1].startswith("instance.bdd,")
    value = rows[1].split(",")[3] if ok else "?"
    gate(8, ok, f"bench processed a user-supplied file, {value} bits/node (no numeric target)")


# 9 ---------------------------------------------------------------------


def _mutations(data: bytes, rng: random.Random, count: int):
    out = [data[:-1]]
    while len(out) < count:
        if rng.random() < 0.3:
            k = rng.randrange(len(data))
            out.append(data[:k] + data[k + 1:])
        else:
            buf = bytearray(data)
            k = rng.randrange(len(buf) * 8)
            buf[k // 8] ^= 1 << (k % 8)
            out.append(bytes(buf))
    return out


def test_fuzz_robustness():
    rng = random.Random(1234)
    sources = [golden20(), queens(5)] + [random_bdd(s, seed=s) for s in (12, 60, 300)]
    configs = [CodecConfig(5, 2, True, "store"), CodecConfig(3, 4, False, "deflate"), CodecConfig(backend="lzma")]
    cases = [(b, encode(b, cfg)) for b in sources for cfg in configs]
    cases += [(b, naive_encode(b, "store")) for b in sources[:3]]
    per_case = -(-10_000 // len(cases))
    tally = {"rejected": 0, "verify-mismatch": 0, "identical": 0, "crash": 0}
    total = 0
    crashes = []
    for b, data in cases:
        for m in _mutations(data, rng, per_case):
            if total == 10_000:
                break
            total += 1
            try:
                out = decode_any(m)
            except DecodeError:
                tally["rejected"] += 1
                continue
            except Exception as exc:  # anything else is a crash
                tally["crash"] += 1
                crashes.append(repr(exc))
                continue
            if verify_pair(b, out) is None:
                tally["identical"] += 1
            else:
                tally["verify-mismatch"] += 1
    ok = tally["crash"] == 0 and total == 10_000
    gate(9, ok, f"{total} mutations: " + ", ".join(f"{k} {v}" for k, v in tally.items())
         + (f"; first crash {crashes[0]}" if crashes else ""))
