"""The BDD data model, structural validation and brute-force oracles.

A :class:`Bdd` is a set of parallel ``int64`` arrays indexed by node:
``layer`` (1..n+1), ``low``/``high`` child indices (``-1`` on terminals) and
``value`` (``-1`` for internal nodes, ``0``/``1`` for terminals).  Node
indices carry no meaning of their own; orderings live in :mod:`bdz.ordering`.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels


class InvalidBddError(ValueError):
    """Raised when a diagram fails :func:`validate`."""

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid BDD: {head}{more}")


class Violation(NamedTuple):
    kind: str
    nodes: tuple
    detail: str = ""

    def __str__(self):
        where = f" at nodes {list(self.nodes)}" if self.nodes else ""
        extra = f": {self.detail}" if self.detail else ""
        return f"{self.kind}{where}{extra}"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class Bdd:
    """A (candidate) ordered binary decision diagram.

    Construction only checks array shapes; call :func:`validate` or
    :func:`check` for the structural invariants.  Instances are immutable.
    """

    __slots__ = ("num_vars", "layer", "low", "high", "value", "root")

    def __init__(self, num_vars: int, layer, low, high, value, root: int):
        layer, low, high, value = (_frozen(a) for a in (layer, low, high, value))
        if not (layer.ndim == low.ndim == high.ndim == value.ndim == 1):
            raise ValueError("node arrays must be one-dimensional")
        if not (layer.shape == low.shape == high.shape == value.shape):
            raise ValueError("node arrays must have equal length")
        if layer.shape[0] == 0:
            raise ValueError("a BDD has at least one node")
        object.__setattr__(self, "num_vars", int(num_vars))
        object.__setattr__(self, "layer", layer)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "root", int(root))

    def __setattr__(self, name, val):
        raise AttributeError("Bdd is immutable")

    def __len__(self):
        return int(self.layer.shape[0])

    def __repr__(self):
        return f"Bdd(num_vars={self.num_vars}, nodes={len(self)}, root={self.root})"

    @property
    def size(self) -> int:
        return len(self)

    @property
    def is_terminal(self) -> np.ndarray:
        return self.value >= 0

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.low >= 0) + np.count_nonzero(self.high >= 0))

    def terminal(self, kind: int) -> int:
        """Index of the ``kind``-terminal, or -1 when absent."""
        hits = np.flatnonzero(self.value == kind)
        return int(hits[0]) if hits.shape[0] else -1

    def in_degree(self) -> np.ndarray:
        n = len(self)
        kids = np.concatenate([self.low, self.high])
        kids = kids[(kids >= 0) & (kids < n)]
        return np.bincount(kids, minlength=n).astype(np.int64)

    def edges(self):
        """``(src, dst, slot)`` arrays over all edges; slot 0 = low, 1 = high."""
        n = len(self)
        src = np.concatenate([np.arange(n), np.arange(n)])
        dst = np.concatenate([self.low, self.high])
        slot = np.repeat(np.array([0, 1]), n)
        keep = dst >= 0
        return src[keep], dst[keep], slot[keep]

    @classmethod
    def from_nodes(cls, num_vars: int, nodes: Mapping, root) -> "Bdd":
        """Build from ``{id: (layer, low_id, high_id)}`` / ``{id: (layer, 'T0'|'T1')}``.

        Ids may be any hashables; indices follow the mapping's order.
        """
        ids = list(nodes)
        index = {k: i for i, k in enumerate(ids)}
        n = len(ids)
        layer = np.empty(n, dtype=np.int64)
        low = np.full(n, -1, dtype=np.int64)
        high = np.full(n, -1, dtype=np.int64)
        value = np.full(n, -1, dtype=np.int64)
        for k, spec in nodes.items():
            i = index[k]
            layer[i] = spec[0]
            if len(spec) == 2:
                value[i] = {"T0": 0, "T1": 1, 0: 0, 1: 1}[spec[1]]
            else:
                low[i] = index[spec[1]]
                high[i] = index[spec[2]]
        return cls(num_vars, layer, low, high, value, index[root])


# ---------------------------------------------------------------- validation


def validate(bdd: Bdd) -> list[Violation]:
    """All violated invariants of a reduced ordered BDD; empty means valid."""
    out: list[Violation] = []
    n = bdd.num_vars
    size = len(bdd)
    layer, low, high, value = bdd.layer, bdd.low, bdd.high, bdd.value
    idx = np.arange(size)

    def nodes(mask):
        return tuple(int(i) for i in idx[mask][:20])

    if n < 1:
        out.append(Violation("num-vars", (), f"num_vars={n} must be positive"))
    if not 0 <= bdd.root < size:
        out.append(Violation("root", (), f"root index {bdd.root} out of range"))
        return out
    if size == 2:
        out.append(Violation("two-node", (0, 1), "|V| = 2 is not a valid BDD"))

    bad_layer = (layer < 1) | (layer > n + 1)
    if bad_layer.any():
        out.append(Violation("layer-range", nodes(bad_layer), f"layers must lie in 1..{n + 1}"))
    bad_value = (value < -1) | (value > 1)
    if bad_value.any():
        out.append(Violation("terminal-kind", nodes(bad_value), "terminal value must be 0 or 1"))
    term = value >= 0
    misplaced = term != (layer == n + 1)
    if misplaced.any():
        out.append(Violation("terminal-layer", nodes(misplaced), f"terminals must be exactly the nodes of layer {n + 1}"))
    dangling = term & ((low != -1) | (high != -1))
    if dangling.any():
        out.append(Violation("terminal-edges", nodes(dangling), "terminals have no outgoing edges"))

    if size == 1:
        if not term[0]:
            out.append(Violation("single-node", (0,), "a one-node BDD must be a terminal"))
        return out

    for kind in (0, 1):
        count = int(np.count_nonzero(value == kind))
        if count != 1:
            out.append(Violation("terminal-count", nodes(value == kind), f"expected one {kind}-terminal, found {count}"))

    internal = ~term
    bad_child = internal & ((low < 0) | (low >= size) | (high < 0) | (high >= size))
    if bad_child.any():
        out.append(Violation("child-range", nodes(bad_child), "internal nodes need two in-range children"))
    ok = internal & ~bad_child
    lo = np.where(ok, low, 0)
    hi = np.where(ok, high, 0)
    unordered = ok & ((layer[lo] <= layer) | (layer[hi] <= layer))
    if unordered.any():
        out.append(Violation("layering", nodes(unordered), "every edge must go to a strictly deeper layer"))
    redundant = ok & (low == high)
    if redundant.any():
        out.append(Violation("redundant", nodes(redundant), "low(u) = high(u)"))

    if ok.any():
        sel = idx[ok]
        # one int64 key per child pair; row-wise np.unique is far slower
        pair = low[sel] * size + high[sel]
        order = np.lexsort((pair, layer[sel]))
        same = (np.diff(pair[order]) == 0) & (np.diff(layer[sel][order]) == 0)
        if same.any():
            dup = np.zeros(sel.shape[0], dtype=bool)
            dup[order[1:][same]] = True
            dup[order[:-1][same]] = True
            out.append(Violation("duplicate-triple", tuple(int(i) for i in np.sort(sel[dup])[:20]), "two nodes share (layer, low, high)"))

    kids = np.concatenate([low[ok], high[ok]])
    indeg = np.bincount(kids, minlength=size)
    if indeg[bdd.root] != 0:
        out.append(Violation("root-indegree", (bdd.root,), "the root has an incoming edge"))
    orphans = (indeg == 0) & (idx != bdd.root)
    if orphans.any():
        out.append(Violation("extra-root", nodes(orphans), "nodes other than the root with in-degree 0"))
    safe_low = np.where(ok, low, -1)
    safe_high = np.where(ok, high, -1)
    seen = kernels.reachable(safe_low, safe_high, bdd.root)
    if not seen.all():
        out.append(Violation("unreachable", nodes(~seen), "not reachable from the root"))
    return out


def check(bdd: Bdd) -> Bdd:
    """Return ``bdd`` unchanged or raise :class:`InvalidBddError`."""
    report = validate(bdd)
    if report:
        raise InvalidBddError(report)
    return bdd


# ---------------------------------------------------------------- semantics


def evaluate(bdd: Bdd, assignment: Sequence[int]) -> int:
    """Follow ``assignment`` (x1 first) from the root; 1 iff a solution."""
    if len(assignment) != bdd.num_vars:
        raise ValueError(f"assignment has {len(assignment)} values, expected {bdd.num_vars}")
    u = bdd.root
    while bdd.value[u] < 0:
        u = int(bdd.high[u] if assignment[bdd.layer[u] - 1] else bdd.low[u])
    return int(bdd.value[u])


def evaluate_all(bdd: Bdd, max_vars: int = 22) -> np.ndarray:
    """Truth table over all ``2**n`` assignments, x1 as the most significant bit."""
    n = bdd.num_vars
    if n > max_vars:
        raise ValueError(f"{n} variables is too many for an exhaustive table")
    rows = np.arange(1 << n, dtype=np.int64)
    cur = np.full(rows.shape[0], bdd.root, dtype=np.int64)
    for i in range(1, n + 1):
        bit = (rows >> (n - i)) & 1
        at = bdd.layer[cur] == i
        nxt = np.where(bit == 1, bdd.high[cur], bdd.low[cur])
        cur = np.where(at, nxt, cur)
    return bdd.value[cur].astype(np.uint8)


def count_solutions(bdd: Bdd) -> int:
    """Number of satisfying assignments, counting skipped layers as free."""
    layer = bdd.layer.tolist()
    low = bdd.low.tolist()
    high = bdd.high.tolist()
    value = bdd.value.tolist()
    # counts over variables layer(u)..n; deepest layers first
    count = [0] * len(layer)
    for u in sorted(range(len(layer)), key=layer.__getitem__, reverse=True):
        if value[u] >= 0:
            count[u] = value[u]
        else:
            lo, hi = low[u], high[u]
            count[u] = (count[lo] << (layer[lo] - layer[u] - 1)) + (count[hi] << (layer[hi] - layer[u] - 1))
    return count[bdd.root] << (layer[bdd.root] - 1)


def assignments(n: int) -> Iterable[tuple]:
    """All assignments in truth-table order (x1 most significant)."""
    for row in range(1 << n):
        yield tuple((row >> (n - i)) & 1 for i in range(1, n + 1))


def truth_table(n: int, f: Callable[[tuple], int]) -> np.ndarray:
    return np.fromiter((1 if f(a) else 0 for a in assignments(n)), dtype=np.uint8, count=1 << n)


# -------------------------------------------------------------- isomorphism


def canonical_arrays(bdd: Bdd):
    """Relabel nodes by low-first DFS preorder; equal output iff isomorphic.

    Returns ``(layer, value, low, high)`` in preorder, children as preorder
    ranks.  Unreachable nodes are dropped.
    """
    rank = kernels.dfs_preorder(bdd.low, bdd.high, bdd.root)
    keep = np.flatnonzero(rank >= 0)
    order = keep[np.argsort(rank[keep])]
    remap = np.append(rank, -1)  # index -1 maps to -1
    return (
        bdd.layer[order],
        bdd.value[order],
        remap[bdd.low[order]],
        remap[bdd.high[order]],
    )


def first_mismatch(a: Bdd, b: Bdd) -> str | None:
    """Human-readable description of the first structural difference."""
    if a.num_vars != b.num_vars:
        return f"variable count differs: {a.num_vars} vs {b.num_vars}"
    ca, cb = canonical_arrays(a), canonical_arrays(b)
    na, nb = ca[0].shape[0], cb[0].shape[0]
    m = min(na, nb)
    diff = np.zeros(m, dtype=bool)
    for x, y in zip(ca, cb):
        diff |= x[:m] != y[:m]
    if not diff.any():
        return None if na == nb else f"node count differs: {na} vs {nb}"
    k = int(np.flatnonzero(diff)[0])
    fmt = "(layer={}, value={}, low={}, high={})"
    msg = f"node #{k + 1} in DFS order: {fmt.format(*(int(x[k]) for x in ca))} vs {fmt.format(*(int(y[k]) for y in cb))}"
    return msg if na == nb else f"{msg}; node count {na} vs {nb}"


def isomorphic(a: Bdd, b: Bdd) -> bool:
    return first_mismatch(a, b) is None
