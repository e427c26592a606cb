"""Baseline encoder: layer sizes followed by explicit child lists.

Container::

    "BDN1" | backend:u8 | n | backend( n+1 layer sizes | first terminal kind:u8 | children )

Children are codec layer ids (1-based), low then high, for every internal
node in codec layer order.  Layers are implied by the sizes.
"""

from __future__ import annotations

import numpy as np

from . import backends, varint
from .bdd import Bdd, InvalidBddError, check, validate
from .codec import MAX_VARS, DecodeError, _Reader
from .ordering import codec_layer_order
from .spanning import build_spanning_tree

MAGIC = b"BDN1"


def naive_encode(bdd: Bdd, backend="lzma") -> bytes:
    check(bdd)
    bid = backends.backend_id(backend)
    n = bdd.num_vars
    if len(bdd) == 1:
        order = np.array([0])
    else:
        order = codec_layer_order(build_spanning_tree(bdd), bdd.layer, bdd.value).order
    rank = np.empty(len(bdd), dtype=np.int64)
    rank[order] = np.arange(1, len(bdd) + 1)
    sizes = np.bincount(bdd.layer, minlength=n + 2)[1:]
    internal = order[bdd.value[order] < 0]
    children = np.stack([rank[bdd.low[internal]], rank[bdd.high[internal]]], axis=1).ravel()
    first_kind = int(bdd.value[order[bdd.value[order] >= 0][0]])
    payload = varint.encode_array(sizes) + bytes([first_kind]) + varint.encode_array(children)
    return MAGIC + bytes([bid]) + varint.write_varint(n) + backends.compress(payload, bid)


def naive_decode(data: bytes) -> Bdd:
    data = bytes(data)
    if len(data) < 6 or data[:4] != MAGIC:
        raise DecodeError("unrecognized container (bad magic)")
    bid = data[4]
    if bid not in backends.IDS:
        raise DecodeError(f"unknown backend id {bid}")
    try:
        n, pos = varint.read_varint(data, 5)
    except varint.VarintError as exc:
        raise DecodeError(f"header: {exc}") from None
    if not 1 <= n <= MAX_VARS:
        raise DecodeError(f"variable count {n} out of range")
    try:
        payload = backends.decompress(data[pos:], bid)
    except backends.BackendError as exc:
        raise DecodeError(str(exc)) from None
    r = _Reader(payload)
    if n + 1 > r.remaining():
        raise DecodeError("payload too short for the layer sizes")
    sizes = r.varints(n + 1, "layer sizes")
    if sizes.max() > np.uint64(r.buf.shape[0]) * 2 + 2:
        raise DecodeError("layer size larger than the payload can describe")
    sizes = sizes.astype(np.int64)
    size = int(sizes.sum())
    bottom = int(sizes[-1])
    if size == 2 or bottom != (1 if size == 1 else 2):
        raise DecodeError(f"layer sizes describe {size} nodes with {bottom} terminals")
    if r.remaining() < 1:
        raise DecodeError("missing terminal kind byte")
    first_kind = int(r.buf[r.pos])
    r.pos += 1
    if first_kind > 1:
        raise DecodeError(f"terminal kind byte is {first_kind}")
    internal = size - bottom
    kids = r.varints(2 * internal, "child lists")
    if r.remaining():
        raise DecodeError(f"{r.remaining()} trailing payload bytes")
    if kids.shape[0] and (kids.min() < 1 or kids.max() > np.uint64(size)):
        raise DecodeError("child id out of range")
    kids = kids.astype(np.int64).reshape(-1, 2) - 1
    layer = np.repeat(np.arange(1, n + 2), sizes)
    low = np.full(size, -1, dtype=np.int64)
    high = np.full(size, -1, dtype=np.int64)
    low[:internal] = kids[:, 0]
    high[:internal] = kids[:, 1]
    value = np.full(size, -1, dtype=np.int64)
    value[internal] = first_kind
    if bottom == 2:
        value[internal + 1] = 1 - first_kind
    bdd = Bdd(n, layer, low, high, value, 0)
    report = validate(bdd)
    if report:
        raise DecodeError(f"decoded diagram is invalid: {InvalidBddError(report)}")
    return bdd
