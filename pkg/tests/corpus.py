"""Deterministic instance corpora shared by the test modules."""

from functools import lru_cache
from pathlib import Path

import numpy as np

from bdz.bdd import Bdd
from bdz.generators import random_bdd, random_function_bdd
from bdz.textio import read_bdd_text

DATA = Path(__file__).parent / "data"


def golden20() -> Bdd:
    return read_bdd_text((DATA / "golden20.bdd").read_bytes())


def small_example() -> Bdd:
    """f = (x4 == x2) if x1 else (x3 xor x4), with one unavoidable long edge."""
    return Bdd.from_nodes(4, {
        "r": (1, "b", "a"),
        "a": (2, "d", "c"),
        "b": (3, "c", "d"),
        "c": (4, "F", "T"),
        "d": (4, "T", "F"),
        "F": (5, "T0"),
        "T": (5, "T1"),
    }, "r")


@lru_cache(maxsize=None)
def random_corpus(count: int = 1000, max_nodes: int = 5000, seed: int = 2024) -> tuple:
    """Random reduced BDDs with 3 <= |V| <= max_nodes.

    Three quarters are structural random diagrams with log-uniform sizes; the
    rest are BDDs of random functions over 2..12 variables, which exercise
    the exhaustive semantic checks.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = len(out)
        if k % 4 == 3:
            b = random_function_bdd(int(rng.integers(2, 13)), seed=int(rng.integers(1 << 31)))
        else:
            size = int(np.exp(rng.uniform(np.log(3), np.log(max_nodes + 1))))
            b = random_bdd(max(3, min(size, max_nodes)), seed=int(rng.integers(1 << 31)))
        if 3 <= len(b) <= max_nodes:
            out.append(b)
    return tuple(out)


@lru_cache(maxsize=None)
def tiny_corpus(count: int = 200, max_nonroot: int = 12, seed: int = 7) -> tuple:
    """Small BDDs whose spanning trees can be enumerated."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        if rng.random() < 0.5:
            b = random_bdd(int(rng.integers(3, max_nonroot + 2)), seed=int(rng.integers(1 << 31)))
        else:
            b = random_function_bdd(int(rng.integers(2, 6)), seed=int(rng.integers(1 << 31)))
        if 3 <= len(b) <= max_nonroot + 1:
            out.append(b)
    return tuple(out)
