"""Time the numba kernels against the numpy fallbacks, and whole encode/decode.

    python benchmarks/bench_kernels.py [--nodes 200000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from bdz import _accel, kernels
from bdz.codec import CodecConfig, decode, encode, encode_tree
from bdz.generators import random_bdd
from bdz.ordering import dag_layer_order
from bdz.spanning import build_spanning_tree


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(bdd):
    tb = dag_layer_order(bdd).rank
    tree = build_spanning_tree(bdd)
    ids = np.arange(len(bdd), dtype=np.uint64) * 37
    packed = kernels.varint_encode_array(ids)
    bits = encode_tree(tree)
    return {
        "dfs_preorder": lambda: kernels.dfs_preorder(bdd.low, bdd.high, bdd.root),
        "choose_parents": lambda: kernels.choose_parents(bdd.low, bdd.high, bdd.layer, tb),
        "tree_bfs": lambda: kernels.tree_bfs(tree.tree_low, tree.tree_high, tree.root),
        "decode_tree_bits": lambda: kernels.decode_tree_bits(bits, len(bdd)),
        "varint_encode": lambda: kernels.varint_encode_array(ids),
        "varint_decode": lambda: kernels.varint_decode_array(packed, 0, ids.shape[0]),
        "reachable": lambda: kernels.reachable(bdd.low, bdd.high, bdd.root),
        "encode (store)": lambda: encode_store(bdd),
        "decode (store)": lambda: decode(encode_store(bdd)),
    }


def encode_store(bdd):
    return encode(bdd, CodecConfig(backend="store"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bdd = random_bdd(args.nodes, seed=args.seed)
    print(f"random BDD: |V|={len(bdd)}, n={bdd.num_vars}; best of {args.repeat}")
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is timed")

    timings = {}
    for flag in (True, False):
        if flag and not _accel.HAVE_NUMBA:
            continue
        _accel.use_numba(flag)
        table = cases(bdd)
        for fn in table.values():  # compile / warm caches
            fn()
        for name, fn in table.items():
            timings.setdefault(name, {})[flag] = best_time(fn, args.repeat)

    print(f"{'kernel':<18} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, t in timings.items():
        fast = t.get(True)
        slow = t[False]
        if fast is None:
            print(f"{name:<18} {'-':>10} {slow * 1e3:>10.2f} {'-':>8}")
        else:
            print(f"{name:<18} {fast * 1e3:>10.2f} {slow * 1e3:>10.2f} {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
