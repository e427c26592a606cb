"""The shortest-edge spanning tree and the oracles that check it."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import kernels
from .bdd import Bdd
from .ordering import bfs_order, dag_layer_order


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """One chosen in-edge per non-root node.

    ``parent[v]`` is the tree parent of ``v`` (``-1`` for the root) and
    ``slot[v]`` says whether the edge is the parent's low (0) or high (1) edge.
    """

    root: int
    parent: np.ndarray
    slot: np.ndarray

    def __len__(self):
        return int(self.parent.shape[0])

    @cached_property
    def tree_low(self) -> np.ndarray:
        return self._children(0)

    @cached_property
    def tree_high(self) -> np.ndarray:
        return self._children(1)

    def _children(self, s):
        out = np.full(len(self), -1, dtype=np.int64)
        hit = np.flatnonzero(self.slot == s)
        out[self.parent[hit]] = hit
        return out

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.parent >= 0))

    def same_as(self, other: "SpanningTree") -> bool:
        return (
            self.root == other.root
            and np.array_equal(self.parent, other.parent)
            and np.array_equal(self.slot, other.slot)
        )


class LongEdgeInfo(NamedTuple):
    endpoint: int
    length: int
    bfs_rank: int


def build_spanning_tree(bdd: Bdd, tiebreak=None) -> SpanningTree:
    """Give every node its deepest parent; ties go to the smaller DAG layer id.

    ``tiebreak`` overrides the per-node tie-break ranks (DAG layer order by
    default).
    """
    if tiebreak is None:
        tiebreak = dag_layer_order(bdd).rank
    parent, slot = kernels.choose_parents(bdd.low, bdd.high, bdd.layer, tiebreak)
    parent.setflags(write=False)
    slot.setflags(write=False)
    return SpanningTree(bdd.root, parent, slot)


def edge_lengths(bdd: Bdd, tree: SpanningTree) -> np.ndarray:
    """Layer distance of each node's tree in-edge (0 for the root)."""
    par = np.where(tree.parent >= 0, tree.parent, np.arange(len(tree)))
    return bdd.layer - bdd.layer[par]


def long_tree_edges(bdd: Bdd, tree: SpanningTree) -> list[LongEdgeInfo]:
    """Tree edges spanning two or more layers, by BFS rank of the endpoint."""
    lengths = edge_lengths(bdd, tree)
    rank = bfs_order(tree).rank
    hits = np.flatnonzero(lengths >= 2)
    hits = hits[np.argsort(rank[hits])]
    return [LongEdgeInfo(int(v), int(lengths[v]), int(rank[v])) for v in hits]


def min_long_edge_count(bdd: Bdd) -> int:
    """Nodes whose every in-edge is long; no spanning tree can do better."""
    src, dst, _ = bdd.edges()
    deepest = np.zeros(len(bdd), dtype=np.int64)
    np.maximum.at(deepest, dst, bdd.layer[src])
    forced = (bdd.layer - deepest >= 2) & (np.arange(len(bdd)) != bdd.root)
    return int(np.count_nonzero(forced))


def exhaustive_min_long_edges(bdd: Bdd, limit: int = 2_000_000) -> int:
    """Brute-force minimum over all one-in-edge-per-node choices.

    Only meant as an oracle for small diagrams; raises if the search space
    exceeds ``limit`` combinations.
    """
    src, dst, _ = bdd.edges()
    choices = []
    for v in range(len(bdd)):
        if v == bdd.root:
            continue
        parents = src[dst == v]
        choices.append([int(bdd.layer[v] - bdd.layer[p]) for p in parents])
    space = 1
    for c in choices:
        space *= len(c)
    if space > limit:
        raise ValueError(f"search space of {space} trees exceeds limit {limit}")
    best = None
    for combo in itertools.product(*choices):
        long_count = sum(1 for length in combo if length >= 2)
        if best is None or long_count < best:
            best = long_count
    return best or 0


def forbidden_children(bdd: Bdd, tree: SpanningTree, u: int, order=None) -> set[int]:
    """Tree children of ``u``'s same-layer nodes ranked after ``u``.

    A nontree edge out of ``u`` can never end in this set.
    """
    if order is None:
        order = dag_layer_order(bdd)
    rank = order.rank
    right = (bdd.layer[tree.parent.clip(0)] == bdd.layer[u]) & (tree.parent >= 0)
    right &= rank[tree.parent.clip(0)] > rank[u]
    return {int(v) for v in np.flatnonzero(right)}


def nontree_edges(bdd: Bdd, tree: SpanningTree):
    """``(src, dst, slot)`` arrays of the edges not in the tree."""
    src, dst, slot = bdd.edges()
    in_tree = (tree.parent[dst] == src) & (tree.slot[dst] == slot)
    keep = ~in_tree
    return src[keep], dst[keep], slot[keep]
