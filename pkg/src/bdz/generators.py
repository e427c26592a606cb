"""Instance generators: n-queens, rook placements and random reduced BDDs."""

from __future__ import annotations

import numpy as np

from .bdd import Bdd
from .manager import FALSE, TRUE, Manager, _deep_recursion

MAX_QUEENS = 9
MAX_ROOK_SIDE = 10
MAX_RANDOM_NODES = 1_000_000


def _cell(r: int, c: int, cols: int) -> int:
    return r * cols + c + 1


def queens(n: int, cols: int | None = None) -> Bdd:
    """Non-attacking placements of ``n`` queens on an ``n x cols`` board.

    Variables are the board cells in row-major order; every row holds one
    queen.
    """
    cols = n if cols is None else cols
    if not 1 <= n <= MAX_QUEENS or not n <= cols <= 3 * MAX_QUEENS:
        raise ValueError(f"queens board must satisfy 1 <= rows <= {MAX_QUEENS} and rows <= cols <= {3 * MAX_QUEENS}")
    mgr = Manager(n * cols)
    with _deep_recursion(n * cols):
        acc = TRUE
        # bottom rows first keeps the partial products small
        for r in range(n - 1, -1, -1):
            row = FALSE
            for c in range(cols):
                x = _cell(r, c, cols)
                safe = TRUE
                for rr in range(r + 1, n):
                    d = rr - r
                    for cc in (c, c - d, c + d):
                        if 0 <= cc < cols:
                            safe = mgr.apply("and", safe, mgr.nvar(_cell(rr, cc, cols)))
                others = TRUE
                for cc in range(cols):
                    if cc != c:
                        others = mgr.apply("and", others, mgr.nvar(_cell(r, cc, cols)))
                placed = mgr.apply("and", mgr.apply("and", mgr.var(x), others), safe)
                row = mgr.apply("or", row, placed)
            acc = mgr.apply("and", row, acc)
        return mgr.export(acc)


def rook(rows: int, cols: int | None = None) -> Bdd:
    """One rook per row, at most one per column."""
    cols = rows if cols is None else cols
    if not 1 <= rows <= cols <= MAX_ROOK_SIDE:
        raise ValueError(f"rook board must satisfy 1 <= rows <= cols <= {MAX_ROOK_SIDE}")
    mgr = Manager(rows * cols)
    with _deep_recursion(rows * cols):
        acc = TRUE
        for r in range(rows - 1, -1, -1):
            row = FALSE
            for c in range(cols):
                term = mgr.var(_cell(r, c, cols))
                for cc in range(cols):
                    if cc != c:
                        term = mgr.apply("and", term, mgr.nvar(_cell(r, cc, cols)))
                for rr in range(r + 1, rows):
                    term = mgr.apply("and", term, mgr.nvar(_cell(rr, c, cols)))
                row = mgr.apply("or", row, term)
            acc = mgr.apply("and", row, acc)
        return mgr.export(acc)


# ------------------------------------------------------------------- random


def _layer_sizes(rng, num_nodes: int, num_vars: int) -> np.ndarray:
    """Sizes for layers 1..n+1 that admit a reduced, connected layering."""
    s = np.ones(num_vars + 1, dtype=np.int64)
    s[-1] = 2
    internal = num_nodes - 2
    if num_vars > 1:
        weights = rng.random(num_vars - 1) + 0.5
        extra = np.floor(weights / weights.sum() * max(internal - num_vars, 0)).astype(np.int64)
        s[1:num_vars] += extra
    for _ in range(num_vars + 5):
        before = s.copy()
        s[0] = 1
        s[num_vars - 1] = min(s[num_vars - 1], 2)
        for i in range(1, num_vars):  # every node needs a parent one layer up
            s[i] = min(s[i], 2 * s[i - 1])
        deeper = np.cumsum(s[::-1])[::-1]
        for i in range(num_vars - 1):
            d = deeper[i + 1]
            s[i] = min(s[i], d * (d - 1) // 2)
        if np.array_equal(s, before):
            break
    return s


def random_bdd(num_nodes: int, seed: int = 0, num_vars: int | None = None,
               long_edge_prob: float = 0.1, terminal_prob: float = 0.15) -> Bdd:
    """A random reduced BDD with roughly ``num_nodes`` nodes.

    Built top-down one layer at a time: each layer gives every node of the
    next layer a parent, then fills the remaining slots at random, resampling
    until ``(low, high)`` pairs are distinct.  The result is reduced by
    construction; node count is at most ``num_nodes``.
    """
    if not 3 <= num_nodes <= MAX_RANDOM_NODES:
        raise ValueError(f"num_nodes must lie in 3..{MAX_RANDOM_NODES}")
    rng = np.random.default_rng(seed)
    if num_vars is None:
        lo = max(2, int(np.log2(num_nodes)))
        num_vars = int(rng.integers(lo, max(lo + 1, int(4 * np.sqrt(num_nodes)) + 2)))
    num_vars = max(1, min(num_vars, num_nodes - 2))
    sizes = _layer_sizes(rng, num_nodes, num_vars)
    starts = np.concatenate([[0], np.cumsum(sizes)])
    size = int(starts[-1])
    layer = np.repeat(np.arange(1, num_vars + 2), sizes)
    low = np.full(size, -1, dtype=np.int64)
    high = np.full(size, -1, dtype=np.int64)
    value = np.full(size, -1, dtype=np.int64)
    value[size - 2] = 0
    value[size - 1] = 1
    t0, t1 = size - 2, size - 1

    for i in range(num_vars):  # layer i + 1
        a, b = starts[i], starts[i + 1]
        count = b - a
        nxt_a, nxt_b = starts[i + 1], starts[i + 2]
        if nxt_a == t0:  # only the two terminal pairs exist
            pairs = np.array([[t0, t1], [t1, t0]])
            low[a:b], high[a:b] = pairs[rng.permutation(2)[:count]].T
            continue
        slots = np.full(2 * count, -1, dtype=np.int64)
        # every node of the next layer gets a parent here
        place = rng.permutation(2 * count)[: nxt_b - nxt_a]
        slots[place] = np.arange(nxt_a, nxt_b)
        slots = slots.reshape(count, 2)
        drawable = slots < 0
        free = drawable
        for attempt in range(400):
            if not free.any():
                break
            k = int(free.sum())
            pick = rng.integers(nxt_a, nxt_b, size=k)
            roll = rng.random(k)
            if attempt >= 20:
                # crowded layer: draw from everything below instead
                pick = rng.integers(nxt_a, size, size=k)
            elif nxt_b < size:
                far = roll < long_edge_prob
                pick[far] = rng.integers(nxt_b, size, size=int(far.sum()))
                term = (roll >= long_edge_prob) & (roll < long_edge_prob + terminal_prob)
                pick[term] = rng.choice([t0, t1], size=int(term.sum()))
            slots[free] = pick
            bad = slots[:, 0] == slots[:, 1]
            codes = slots[:, 0] * size + slots[:, 1]
            _, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
            # every member of a clash redraws; rows with two mandatory
            # children are unique anyway and never clash with each other
            bad |= counts[inverse.ravel()] > 1
            free = drawable & bad[:, None]
        else:  # pragma: no cover
            raise RuntimeError("could not draw distinct child pairs")
        low[a:b] = slots[:, 0]
        high[a:b] = slots[:, 1]
    return Bdd(num_vars, layer, low, high, value, 0)


def random_function_bdd(num_vars: int, seed: int = 0, density: float | None = None) -> Bdd:
    """BDD of a random Boolean function (exhaustive table, small ``num_vars``)."""
    from .manager import from_truth_table

    rng = np.random.default_rng(seed)
    if density is None:
        density = float(rng.uniform(0.05, 0.95))
    table = (rng.random(1 << num_vars) < density).astype(np.uint8)
    return from_truth_table(num_vars, table)
