"""Lossless compression of reduced ordered BDDs via a shortest-edge spanning tree."""

from ._accel import numba_enabled, use_numba
from .bdd import Bdd, InvalidBddError, check, count_solutions, evaluate, isomorphic, validate
from .codec import CodecConfig, DecodeError, decode, encode
from .naive import naive_decode, naive_encode
from .spanning import build_spanning_tree, min_long_edge_count
from .textio import BddFormatError, read_bdd_text, write_bdd_text

__all__ = [
    "Bdd",
    "BddFormatError",
    "CodecConfig",
    "DecodeError",
    "InvalidBddError",
    "build_spanning_tree",
    "check",
    "count_solutions",
    "decode",
    "encode",
    "evaluate",
    "isomorphic",
    "min_long_edge_count",
    "naive_decode",
    "naive_encode",
    "numba_enabled",
    "read_bdd_text",
    "use_numba",
    "validate",
    "write_bdd_text",
]
