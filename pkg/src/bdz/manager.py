"""A small hash-consing BDD engine: reduce, apply and truth-table import.

Only used to build and canonicalise test and benchmark instances; the codec
itself never needs it.
"""

from __future__ import annotations

import sys

import numpy as np

from .bdd import Bdd, InvalidBddError, Violation, truth_table, validate

FALSE = 0
TRUE = 1

_OPS = {
    "and": lambda x, y: x & y,
    "or": lambda x, y: x | y,
    "xor": lambda x, y: x ^ y,
}

MAX_TABLE_VARS = 20


class Manager:
    """Node store with a unique table keyed by ``(layer, low, high)``.

    Node 0 is the 0-terminal, node 1 the 1-terminal.
    """

    def __init__(self, num_vars: int):
        if num_vars < 1:
            raise ValueError("num_vars must be positive")
        self.num_vars = num_vars
        self.layer = [num_vars + 1, num_vars + 1]
        self.low = [-1, -1]
        self.high = [-1, -1]
        self._unique: dict[tuple, int] = {}
        self._cache: dict[tuple, int] = {}

    def __len__(self):
        return len(self.layer)

    def mk(self, layer: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (layer, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self.layer)
            self.layer.append(layer)
            self.low.append(lo)
            self.high.append(hi)
            self._unique[key] = node
        return node

    def var(self, i: int) -> int:
        return self.mk(i, FALSE, TRUE)

    def nvar(self, i: int) -> int:
        return self.mk(i, TRUE, FALSE)

    def apply(self, op: str, a: int, b: int) -> int:
        try:
            fn = _OPS[op]
        except KeyError:
            raise ValueError(f"unknown operator {op!r}") from None
        return self._apply(op, fn, a, b)

    def _apply(self, op, fn, a, b):
        if a <= TRUE and b <= TRUE:
            return fn(a, b)
        if op == "and":
            if a == FALSE or b == FALSE:
                return FALSE
            if a == TRUE or a == b:
                return b
            if b == TRUE:
                return a
        elif op == "or":
            if a == TRUE or b == TRUE:
                return TRUE
            if a == FALSE or a == b:
                return b
            if b == FALSE:
                return a
        elif op == "xor":
            if a == b:
                return FALSE
            if a == FALSE:
                return b
            if b == FALSE:
                return a
        if a > b:
            a, b = b, a
        key = (op, a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        la, lb = self.layer[a], self.layer[b]
        top = min(la, lb)
        a0, a1 = (self.low[a], self.high[a]) if la == top else (a, a)
        b0, b1 = (self.low[b], self.high[b]) if lb == top else (b, b)
        res = self.mk(top, self._apply(op, fn, a0, b0), self._apply(op, fn, a1, b1))
        self._cache[key] = res
        return res

    def conjoin(self, nodes) -> int:
        """AND of many nodes, combined pairwise to keep intermediates small."""
        nodes = list(nodes)
        if not nodes:
            return TRUE
        while len(nodes) > 1:
            nodes = [self.apply("and", nodes[i], nodes[i + 1]) if i + 1 < len(nodes) else nodes[i] for i in range(0, len(nodes), 2)]
        return nodes[0]

    def disjoin(self, nodes) -> int:
        acc = FALSE
        for u in nodes:
            acc = self.apply("or", acc, u)
        return acc

    def import_bdd(self, bdd: Bdd) -> int:
        """Insert a layered diagram bottom-up, reducing as it goes."""
        if bdd.num_vars != self.num_vars:
            raise ValueError(f"num_vars mismatch: {bdd.num_vars} vs {self.num_vars}")
        layer = bdd.layer.tolist()
        low = bdd.low.tolist()
        high = bdd.high.tolist()
        value = bdd.value.tolist()
        image = [-1] * len(layer)
        for u in sorted(range(len(layer)), key=layer.__getitem__, reverse=True):
            if value[u] >= 0:
                image[u] = value[u]
            else:
                image[u] = self.mk(layer[u], image[low[u]], image[high[u]])
        return image[bdd.root]

    def export(self, root: int) -> Bdd:
        """The sub-diagram below ``root`` as a standalone :class:`Bdd`."""
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            if u > TRUE:
                for v in (self.low[u], self.high[u]):
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
        nodes = sorted(seen, key=lambda u: (self.layer[u], u))
        index = {u: i for i, u in enumerate(nodes)}
        layer = [self.layer[u] for u in nodes]
        low = [index[self.low[u]] if u > TRUE else -1 for u in nodes]
        high = [index[self.high[u]] if u > TRUE else -1 for u in nodes]
        value = [u if u <= TRUE else -1 for u in nodes]
        return Bdd(self.num_vars, layer, low, high, value, index[root])


def _def1_violations(diagram: Bdd) -> list[Violation]:
    # reduce() tolerates redundancy, duplicates and extra terminals, nothing else
    allowed = {"redundant", "duplicate-triple", "terminal-count", "unreachable", "extra-root", "two-node"}
    return [v for v in validate(diagram) if v.kind not in allowed]


def reduce(diagram: Bdd) -> Bdd:
    """Canonical reduced form of an ordered, layered (possibly unreduced) diagram."""
    problems = _def1_violations(diagram)
    if problems:
        raise InvalidBddError(problems)
    mgr = Manager(diagram.num_vars)
    return mgr.export(mgr.import_bdd(diagram))


def apply(op: str, a: Bdd, b: Bdd) -> Bdd:
    """``op`` in {and, or, xor} applied pointwise to two BDDs."""
    if a.num_vars != b.num_vars:
        raise ValueError(f"num_vars mismatch: {a.num_vars} vs {b.num_vars}")
    mgr = Manager(a.num_vars)
    ra, rb = mgr.import_bdd(a), mgr.import_bdd(b)
    with _deep_recursion(a.num_vars):
        return mgr.export(mgr.apply(op, ra, rb))


def constant(num_vars: int, bit: int) -> Bdd:
    return Manager(num_vars).export(TRUE if bit else FALSE)


def from_truth_table(n: int, table) -> Bdd:
    """Reduced BDD of a truth table indexed with x1 as the most significant bit.

    ``table`` is a length ``2**n`` sequence of bits or a callable on
    assignment tuples.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_TABLE_VARS:
        raise ValueError(f"exhaustive tables are limited to {MAX_TABLE_VARS} variables")
    if callable(table):
        table = truth_table(n, table)
    ids = np.asarray(table, dtype=np.int64).ravel()
    if ids.shape[0] != 1 << n:
        raise ValueError(f"table has {ids.shape[0]} entries, expected {1 << n}")
    if not np.isin(ids, (0, 1)).all():
        raise ValueError("table entries must be 0 or 1")
    mgr = Manager(n)
    for i in range(n, 0, -1):
        pairs = ids.reshape(-1, 2)
        uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
        made = np.array([mgr.mk(i, int(lo), int(hi)) for lo, hi in uniq], dtype=np.int64)
        ids = made[inverse.ravel()]
    return mgr.export(int(ids[0]))


class _deep_recursion:
    """Raise the recursion limit for apply on diagrams with many layers."""

    def __init__(self, depth: int):
        self.need = 4 * depth + 200

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        if self.need > self.old:
            sys.setrecursionlimit(self.need)

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)
