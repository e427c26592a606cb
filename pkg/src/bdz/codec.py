"""Spanning-tree BDD compressor and its exact inverse.

Encoding pipeline:

1. build the shortest-edge spanning tree and write it with 2 bits per node
   in BFS order;
2. record which terminal the BFS reaches first;
3. mark long tree edges (bitvector over BFS ranks) and store their lengths;
4. walk the nontree edges in codec layer order: targets with a large
   in-degree are written in place, the rest are deferred as ``0``;
5. deferred long edges into the last node of their target layer are stored
   as a bitvector plus lengths, everything else as (delta-coded) layer ids;
6. compress the concatenated sections with a general-purpose backend.

Container layout::

    "BDZ1" | backend:u8 | flags:u8 | n | |V| | root layer | #long | #forward
    backend( tree | [long bits | long lengths] | sh | [fwd bits | fwd lengths] | tail )

All integers are varints, bitvectors are MSB-first and byte-aligned, and
every section length follows from the header counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends, kernels, varint
from .bdd import Bdd, InvalidBddError, check, validate
from .ordering import NodeOrdering, bfs_order, codec_layer_order
from .spanning import SpanningTree, build_spanning_tree, edge_lengths

MAGIC = b"BDZ1"

FLAG_TERMINAL_ORDER = 1
FLAG_DELTA = 2
FLAG_SINGLE_KIND = 4
_KNOWN_FLAGS = FLAG_TERMINAL_ORDER | FLAG_DELTA | FLAG_SINGLE_KIND

# decoder guards against corrupted headers
MAX_VARS = 1 << 31


class DecodeError(ValueError):
    """The container is malformed, truncated or inconsistent."""


@dataclass(frozen=True)
class CodecConfig:
    indegree_threshold: int = 5
    forward_min_count: int = 4
    delta_enabled: bool = True
    backend: str = "lzma"

    def __post_init__(self):
        if self.indegree_threshold < 1:
            raise ValueError("indegree_threshold must be >= 1")
        if self.forward_min_count < 0:
            raise ValueError("forward_min_count must be >= 0")
        backends.backend_id(self.backend)


@dataclass(frozen=True, eq=False)
class EncodedStreams:
    """The logical sections of a container, before byte serialisation."""

    num_vars: int
    num_nodes: int
    root_layer: int
    terminal_order: int
    single_kind: int
    delta_enabled: bool
    backend: str
    tree_bits: np.ndarray
    long_tree_bitvector: np.ndarray
    long_tree_lengths: np.ndarray
    sh_stream: np.ndarray
    forward_bitvector: np.ndarray
    forward_lengths: np.ndarray
    tail_stream: np.ndarray

    @property
    def long_tree_count(self) -> int:
        return int(self.long_tree_lengths.shape[0])

    @property
    def forward_count(self) -> int:
        return int(self.forward_lengths.shape[0])

    def deferred_count(self) -> int:
        return int(np.count_nonzero(self.sh_stream == 0))


# ------------------------------------------------------------- tree section


def encode_tree(tree: SpanningTree, order: NodeOrdering | None = None) -> np.ndarray:
    """Two bits per node in BFS order: (low edge in tree, high edge in tree)."""
    if order is None:
        order = bfs_order(tree)
    nodes = order.order
    bits = np.empty(2 * nodes.shape[0], dtype=np.uint8)
    bits[0::2] = tree.tree_low[nodes] >= 0
    bits[1::2] = tree.tree_high[nodes] >= 0
    return bits


def decode_tree(bits, count: int) -> SpanningTree:
    """Inverse of :func:`encode_tree`; node ``i`` of the result has BFS rank ``i + 1``."""
    if count < 1:
        raise DecodeError("a tree has at least one node")
    parent, slot, err = kernels.decode_tree_bits(np.asarray(bits, dtype=np.uint8), count)
    if err == kernels.ERR_EXHAUSTED:
        raise DecodeError(f"tree section needs {2 * count} bits, got {len(bits)}")
    if err:
        raise DecodeError(f"tree bits do not describe a tree with {count} nodes")
    return SpanningTree(0, parent, slot)


def restore_layers(skeleton: SpanningTree, root_layer: int, long_bits=None, long_lengths=None, num_vars=None) -> np.ndarray:
    """Layer of every skeleton node: parent layer + 1, or + stored length when marked."""
    count = len(skeleton)
    step = np.ones(count, dtype=np.int64)
    if long_bits is not None and len(long_bits):
        marks = np.flatnonzero(np.asarray(long_bits)[:count])
        lengths = np.asarray(long_lengths, dtype=np.int64)
        if marks.shape[0] != lengths.shape[0]:
            raise DecodeError(f"{marks.shape[0]} long-edge marks but {lengths.shape[0]} lengths")
        if marks.shape[0] and marks[0] == 0:
            raise DecodeError("the root cannot end a long tree edge")
        if np.any(lengths < 2):
            raise DecodeError("long tree edges have length >= 2")
        step[marks] = lengths
    layers = kernels.accumulate_down(skeleton.parent, step, root_layer)
    if num_vars is not None and layers.max() > num_vars + 1:
        raise DecodeError(f"restored layer {int(layers.max())} exceeds {num_vars + 1}")
    return layers


# ---------------------------------------------------------- nontree section


def _incomplete_children(bdd: Bdd, tree: SpanningTree, order: NodeOrdering):
    """Nontree edges as ``(src, slot, dst)`` rows, by source rank then slot."""
    nodes = order.order[bdd.value[order.order] < 0]
    src = np.repeat(nodes, 2)
    slot = np.tile(np.array([0, 1], dtype=np.int64), nodes.shape[0])
    dst = np.where(slot == 0, bdd.low[src], bdd.high[src])
    in_tree = (tree.parent[dst] == src) & (tree.slot[dst] == slot)
    keep = ~in_tree
    return np.stack([src[keep], slot[keep], dst[keep]], axis=1)


def split_incomplete_children(bdd: Bdd, tree: SpanningTree, order: NodeOrdering, threshold: int):
    """The in-place stream for high in-degree targets plus the deferred edges.

    Returns ``(sh_values, deferred)``: ``sh_values[i]`` is the target's codec
    id when its in-degree exceeds ``threshold`` and 0 otherwise; ``deferred``
    holds the ``(src, slot, dst)`` rows written as 0.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    edges = _incomplete_children(bdd, tree, order)
    indeg = bdd.in_degree()
    dst = edges[:, 2]
    heavy = indeg[dst] > threshold
    sh = np.where(heavy, order.rank[dst], 0).astype(np.int64)
    return sh, edges[~heavy]


def _last_in_layer(layers, order: NodeOrdering, query) -> np.ndarray:
    """Highest-ranked node on each queried layer (-1 where the layer is empty)."""
    lay = layers[order.order]  # non-decreasing
    query = np.asarray(query, dtype=np.int64)
    pos = np.searchsorted(lay, query, side="right") - 1
    ok = (pos >= 0) & (lay[pos.clip(0)] == query)
    return np.where(ok, order.order[pos.clip(0)], -1)


def select_forward_edges(bdd: Bdd, order: NodeOrdering, deferred, min_count: int):
    """Deferred long edges whose target is the last node of its layer.

    The decoder recovers such a target from the source and the length alone.
    Returns ``(bitvector, lengths, remaining)``; when fewer than
    ``min_count`` edges qualify none are selected.
    """
    deferred = np.asarray(deferred, dtype=np.int64).reshape(-1, 3)
    src, dst = deferred[:, 0], deferred[:, 2]
    length = bdd.layer[dst] - bdd.layer[src]
    last = _last_in_layer(bdd.layer, order, bdd.layer[dst])
    chosen = (length >= 2) & (last == dst)
    if np.count_nonzero(chosen) < min_count:
        chosen[:] = False
    return chosen.astype(np.uint8), length[chosen], deferred[~chosen]


def delta_encode(ids) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    return np.diff(ids, prepend=np.int64(0)) if ids.shape[0] else ids.copy()


def delta_decode(deltas) -> np.ndarray:
    return np.cumsum(np.asarray(deltas, dtype=np.int64))


# ------------------------------------------------------------------ encoder


def build_streams(bdd: Bdd, config: CodecConfig = CodecConfig()) -> EncodedStreams:
    """Run the encoding steps and return the sections before serialisation."""
    check(bdd)
    n, size = bdd.num_vars, len(bdd)
    empty = np.empty(0, dtype=np.int64)
    if size == 1:
        bits = np.zeros(2, dtype=np.uint8)
        return EncodedStreams(n, 1, n + 1, 0, int(bdd.value[0]), config.delta_enabled, config.backend,
                              bits, empty.astype(np.uint8), empty, empty, empty.astype(np.uint8), empty, empty)

    tree = build_spanning_tree(bdd)
    bfs = bfs_order(tree)
    tree_bits = encode_tree(tree, bfs)

    first_terminal = bfs.order[bdd.value[bfs.order] >= 0][0]
    terminal_order = int(bdd.value[first_terminal])

    lengths = edge_lengths(bdd, tree)[bfs.order]
    marked = lengths >= 2
    if marked.any():
        long_bits = marked.astype(np.uint8)
        long_lengths = lengths[marked]
    else:
        long_bits, long_lengths = empty.astype(np.uint8), empty

    order = codec_layer_order(tree, bdd.layer, bdd.value)
    sh, deferred = split_incomplete_children(bdd, tree, order, config.indegree_threshold)
    fwd_bits, fwd_lengths, remaining = select_forward_edges(bdd, order, deferred, config.forward_min_count)
    if not fwd_lengths.shape[0]:
        fwd_bits = empty.astype(np.uint8)
    tail = order.rank[remaining[:, 2]].astype(np.int64)
    if config.delta_enabled:
        tail = delta_encode(tail)

    return EncodedStreams(
        num_vars=n,
        num_nodes=size,
        root_layer=int(bdd.layer[bdd.root]),
        terminal_order=terminal_order,
        single_kind=0,
        delta_enabled=config.delta_enabled,
        backend=config.backend,
        tree_bits=tree_bits,
        long_tree_bitvector=long_bits,
        long_tree_lengths=long_lengths,
        sh_stream=sh,
        forward_bitvector=fwd_bits,
        forward_lengths=fwd_lengths,
        tail_stream=tail,
    )


def _pack(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def serialize(streams: EncodedStreams) -> bytes:
    flags = 0
    if streams.terminal_order:
        flags |= FLAG_TERMINAL_ORDER
    if streams.delta_enabled:
        flags |= FLAG_DELTA
    if streams.num_nodes == 1 and streams.single_kind:
        flags |= FLAG_SINGLE_KIND
    bid = backends.backend_id(streams.backend)
    header = bytearray(MAGIC)
    header += bytes([bid, flags])
    for value in (streams.num_vars, streams.num_nodes, streams.root_layer, streams.long_tree_count, streams.forward_count):
        header += varint.write_varint(value)
    if streams.num_nodes == 1:
        return bytes(header)

    parts = [_pack(streams.tree_bits)]
    if streams.long_tree_count:
        parts.append(_pack(streams.long_tree_bitvector))
        parts.append(varint.encode_array(streams.long_tree_lengths - 2))
    parts.append(varint.encode_array(streams.sh_stream))
    if streams.forward_count:
        parts.append(_pack(streams.forward_bitvector))
        parts.append(varint.encode_array(streams.forward_lengths - 2))
    if streams.delta_enabled:
        parts.append(varint.encode_array(varint.zigzag_array(streams.tail_stream)))
    else:
        parts.append(varint.encode_array(streams.tail_stream))
    return bytes(header) + backends.compress(b"".join(parts), bid)


def encode(bdd: Bdd, config: CodecConfig = CodecConfig()) -> bytes:
    """Compress a reduced ordered BDD into a ``BDZ1`` container."""
    return serialize(build_streams(bdd, config))


# ------------------------------------------------------------------ decoder


class _Reader:
    def __init__(self, data: bytes):
        self.buf = np.frombuffer(data, dtype=np.uint8)
        self.pos = 0

    def remaining(self) -> int:
        return self.buf.shape[0] - self.pos

    def varints(self, count: int, what: str) -> np.ndarray:
        try:
            values, self.pos = varint.decode_array(self.buf, self.pos, count)
        except varint.VarintError as exc:
            raise DecodeError(f"{what}: {exc}") from None
        return values

    def bits(self, count: int, what: str) -> np.ndarray:
        nbytes = (count + 7) // 8
        if nbytes > self.remaining():
            raise DecodeError(f"{what}: needs {nbytes} bytes, {self.remaining()} left")
        raw = self.buf[self.pos : self.pos + nbytes]
        self.pos += nbytes
        bits = np.unpackbits(raw)
        if bits[count:].any():
            raise DecodeError(f"{what}: nonzero padding bits")
        return bits[:count]


def _read_header(data: bytes):
    if len(data) < 6 or data[:4] != MAGIC:
        raise DecodeError("unrecognized container (bad magic)")
    bid, flags = data[4], data[5]
    if bid not in backends.IDS:
        raise DecodeError(f"unknown backend id {bid}")
    if flags & ~_KNOWN_FLAGS:
        raise DecodeError(f"unknown flag bits {flags:#04x}")
    values = []
    pos = 6
    try:
        for _ in range(5):
            v, pos = varint.read_varint(data, pos)
            values.append(v)
    except varint.VarintError as exc:
        raise DecodeError(f"header: {exc}") from None
    return bid, flags, values, pos


def parse_container(data: bytes) -> EncodedStreams:
    """Split a container into its sections, checking every implied length."""
    data = bytes(data)
    bid, flags, (n, size, root_layer, long_count, fwd_count), pos = _read_header(data)
    if not 1 <= n <= MAX_VARS:
        raise DecodeError(f"variable count {n} out of range")
    if size < 1 or size == 2:
        raise DecodeError(f"node count {size} is not a valid BDD size")
    if not 1 <= root_layer <= n + 1:
        raise DecodeError(f"root layer {root_layer} outside 1..{n + 1}")
    if long_count >= size or fwd_count >= size:
        raise DecodeError("section counts exceed the node count")
    delta = bool(flags & FLAG_DELTA)
    backend = backends.IDS[bid]
    empty = np.empty(0, dtype=np.int64)

    if size == 1:
        if pos != len(data):
            raise DecodeError("single-terminal container has trailing bytes")
        if root_layer != n + 1 or long_count or fwd_count or flags & FLAG_TERMINAL_ORDER:
            raise DecodeError("inconsistent single-terminal header")
        return EncodedStreams(n, 1, root_layer, 0, int(bool(flags & FLAG_SINGLE_KIND)), delta, backend,
                              np.zeros(2, dtype=np.uint8), empty.astype(np.uint8), empty, empty,
                              empty.astype(np.uint8), empty, empty)
    if flags & FLAG_SINGLE_KIND:
        raise DecodeError("single-terminal flag on a multi-node container")

    try:
        payload = backends.decompress(data[pos:], bid)
    except backends.BackendError as exc:
        raise DecodeError(str(exc)) from None
    r = _Reader(payload)
    if (2 * size + 7) // 8 > r.remaining():
        raise DecodeError(f"payload too short for a {size}-node tree")
    tree_bits = r.bits(2 * size, "tree section")

    long_bits, long_lengths = empty.astype(np.uint8), empty
    if long_count:
        long_bits = r.bits(size, "long-edge bitvector")
        if int(long_bits.sum()) != long_count:
            raise DecodeError(f"long-edge bitvector marks {int(long_bits.sum())} nodes, header says {long_count}")
        long_lengths = _small(r.varints(long_count, "long-edge lengths"), n) + 2

    sh = _small(r.varints(size - 3, "in-place stream"), size)
    zeros = int(np.count_nonzero(sh == 0))
    fwd_bits, fwd_lengths = empty.astype(np.uint8), empty
    if fwd_count:
        fwd_bits = r.bits(zeros, "forward bitvector")
        if int(fwd_bits.sum()) != fwd_count:
            raise DecodeError(f"forward bitvector marks {int(fwd_bits.sum())} edges, header says {fwd_count}")
        fwd_lengths = _small(r.varints(fwd_count, "forward lengths"), n) + 2
    raw_tail = r.varints(zeros - fwd_count, "tail stream")
    if delta:
        tail = varint.unzigzag_array(raw_tail)
    else:
        tail = _small(raw_tail, size)
    if r.remaining():
        raise DecodeError(f"{r.remaining()} trailing payload bytes")
    return EncodedStreams(n, size, root_layer, int(flags & FLAG_TERMINAL_ORDER), 0, delta, backend,
                          tree_bits, long_bits, long_lengths, sh, fwd_bits, fwd_lengths, tail)


def _small(values: np.ndarray, bound: int) -> np.ndarray:
    if values.shape[0] and values.max() > np.uint64(bound):
        raise DecodeError(f"value {int(values.max())} exceeds bound {bound}")
    return values.astype(np.int64)


def reconstruct(streams: EncodedStreams) -> Bdd:
    """Rebuild the BDD from parsed sections; nodes come out in codec layer order."""
    n, size = streams.num_vars, streams.num_nodes
    if size == 1:
        return Bdd(n, [n + 1], [-1], [-1], [streams.single_kind], 0)

    skeleton = decode_tree(streams.tree_bits, size)
    layers = restore_layers(skeleton, streams.root_layer, streams.long_tree_bitvector,
                            streams.long_tree_lengths, n)
    terminals = np.flatnonzero(layers == n + 1)  # ascending index = BFS order
    if terminals.shape[0] != 2:
        raise DecodeError(f"{terminals.shape[0]} nodes on the terminal layer, expected 2")
    if (skeleton.tree_low[terminals] >= 0).any() or (skeleton.tree_high[terminals] >= 0).any():
        raise DecodeError("a terminal has tree children")
    value = np.full(size, -1, dtype=np.int64)
    value[terminals[0]] = streams.terminal_order
    value[terminals[1]] = 1 - streams.terminal_order

    order = codec_layer_order(skeleton, layers, value)
    low = skeleton.tree_low.copy()
    high = skeleton.tree_high.copy()

    nodes = order.order[value[order.order] < 0]
    src = np.repeat(nodes, 2)
    slot = np.tile(np.array([0, 1], dtype=np.int64), nodes.shape[0])
    open_slot = np.where(slot == 0, low[src], high[src]) < 0
    src, slot = src[open_slot], slot[open_slot]
    if src.shape[0] != streams.sh_stream.shape[0]:
        raise DecodeError(f"{src.shape[0]} nontree edges but {streams.sh_stream.shape[0]} in-place entries")

    target = np.full(src.shape[0], -1, dtype=np.int64)
    sh = streams.sh_stream
    heavy = sh > 0
    target[heavy] = order.order[sh[heavy] - 1]

    deferred = np.flatnonzero(~heavy)
    fwd = np.asarray(streams.forward_bitvector, dtype=bool)
    if fwd.shape[0]:
        if fwd.shape[0] != deferred.shape[0]:
            raise DecodeError("forward bitvector length does not match the deferred edges")
        fpos = deferred[fwd]
        tlayer = layers[src[fpos]] + streams.forward_lengths
        if tlayer.max() > n + 1:
            raise DecodeError("forward edge runs past the terminal layer")
        hit = _last_in_layer(layers, order, tlayer)
        if (hit < 0).any():
            raise DecodeError("forward edge points into an empty layer")
        target[fpos] = hit
        deferred = deferred[~fwd]

    ids = delta_decode(streams.tail_stream) if streams.delta_enabled else np.asarray(streams.tail_stream, dtype=np.int64)
    if ids.shape[0] != deferred.shape[0]:
        raise DecodeError(f"{deferred.shape[0]} deferred edges but {ids.shape[0]} tail entries")
    if ids.shape[0] and (ids.min() < 1 or ids.max() > size):
        raise DecodeError("tail stream references a node id outside 1..|V|")
    target[deferred] = order.order[ids - 1]

    low[src[slot == 0]] = target[slot == 0]
    high[src[slot == 1]] = target[slot == 1]

    # relabel so that node index + 1 equals the codec layer id
    remap = np.append(order.rank - 1, -1)
    perm = order.order
    bdd = Bdd(n, layers[perm], remap[low[perm]], remap[high[perm]], value[perm], int(order.rank[0] - 1))
    report = validate(bdd)
    if report:
        raise DecodeError(f"decoded diagram is invalid: {InvalidBddError(report)}")
    rebuilt = build_spanning_tree(bdd)
    expected = SpanningTree(int(order.rank[0] - 1), remap[skeleton.parent[perm]], skeleton.slot[perm])
    if not rebuilt.same_as(expected):
        raise DecodeError("decoded spanning tree is not the canonical one")
    return bdd


def decode(data: bytes) -> Bdd:
    """Decompress a ``BDZ1`` container."""
    return reconstruct(parse_container(data))
