"""Node orderings: BFS over a spanning tree, DAG layer order, codec layer order."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bdd import Bdd


@dataclass(frozen=True, eq=False)
class NodeOrdering:
    """Bijection between node indices and ranks ``1..|V|``.

    ``rank[node]`` is 1-based; ``order[k]`` is the node of rank ``k + 1``.
    """

    kind: str
    rank: np.ndarray
    order: np.ndarray

    @classmethod
    def from_order(cls, kind: str, order) -> "NodeOrdering":
        order = np.asarray(order, dtype=np.int64)
        rank = np.empty_like(order)
        rank[order] = np.arange(1, order.shape[0] + 1)
        return cls(kind, rank, order)

    def __len__(self):
        return int(self.order.shape[0])

    def is_bijection(self) -> bool:
        n = len(self)
        return bool(
            self.rank.shape[0] == n
            and np.array_equal(np.sort(self.rank), np.arange(1, n + 1))
            and np.array_equal(self.rank[self.order], np.arange(1, n + 1))
        )


def bfs_order(tree) -> NodeOrdering:
    """Visit order of a BFS over ``tree``, low child before high child."""
    order = kernels.tree_bfs(tree.tree_low, tree.tree_high, tree.root)
    return NodeOrdering.from_order("bfs", order)


def dag_layer_order(bdd: Bdd) -> NodeOrdering:
    """Layer-major order, ties by first visit of a low-first DFS over the DAG.

    Needs every edge, so only the encoder can compute it.
    """
    dfs = kernels.dfs_preorder(bdd.low, bdd.high, bdd.root)
    order = np.lexsort((dfs, bdd.layer))
    return NodeOrdering.from_order("dag_layer", order)


def codec_layer_order(tree, layers, values=None) -> NodeOrdering:
    """Layer-major order that the decoder can rebuild from the tree alone.

    Within a layer nodes follow the tree's BFS rank, except that terminals
    are ranked by kind (0-terminal first) when ``values`` is given.
    """
    layers = np.asarray(layers, dtype=np.int64)
    bfs = bfs_order(tree).rank
    if values is not None:
        values = np.asarray(values, dtype=np.int64)
        bfs = np.where(values >= 0, values, bfs)
    order = np.lexsort((bfs, layers))
    return NodeOrdering.from_order("codec_layer", order)
