"""Hot inner loops of the codec.

Every public function here dispatches to a numba-compiled loop when numba is
enabled (see :mod:`bdz._accel`) and to a numpy implementation otherwise. The
two paths must agree exactly; ``tests/test_kernels.py`` checks that.

Node arrays are ``int64``; a child index of ``-1`` means "no child".
"""

import numpy as np

from ._accel import jit, numba_enabled

# error codes shared by the tree and varint decoders
OK = 0
ERR_EXHAUSTED = 1
ERR_COUNT = 2
ERR_OVERLONG = 3
ERR_NONCANONICAL = 4


# ---------------------------------------------------------------- DAG preorder


def _dfs_preorder_loop(low, high, root):
    n = low.shape[0]
    rank = np.full(n, -1, dtype=np.int64)
    stack = np.empty(2 * n + 1, dtype=np.int64)
    top = 0
    stack[0] = root
    top = 1
    nxt = 0
    while top > 0:
        top -= 1
        u = stack[top]
        if rank[u] >= 0:
            continue
        rank[u] = nxt
        nxt += 1
        if high[u] >= 0 and rank[high[u]] < 0:
            stack[top] = high[u]
            top += 1
        if low[u] >= 0 and rank[low[u]] < 0:
            stack[top] = low[u]
            top += 1
    return rank


_dfs_preorder_nb = jit(_dfs_preorder_loop)


def _dfs_preorder_py(low, high, root):
    # plain lists: element access on ndarrays is several times slower
    lo = low.tolist()
    hi = high.tolist()
    rank = [-1] * len(lo)
    stack = [root]
    nxt = 0
    while stack:
        u = stack.pop()
        if rank[u] >= 0:
            continue
        rank[u] = nxt
        nxt += 1
        h = hi[u]
        if h >= 0 and rank[h] < 0:
            stack.append(h)
        l = lo[u]
        if l >= 0 and rank[l] < 0:
            stack.append(l)
    return np.asarray(rank, dtype=np.int64)


def dfs_preorder(low, high, root):
    """First-visit rank (0-based) of a low-before-high DFS from ``root``.

    Unreachable nodes get ``-1``.
    """
    low = np.ascontiguousarray(low, dtype=np.int64)
    high = np.ascontiguousarray(high, dtype=np.int64)
    if low.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    if numba_enabled():
        return _dfs_preorder_nb(low, high, np.int64(root))
    return _dfs_preorder_py(low, high, int(root))


# -------------------------------------------------------------- tree parents


def _choose_parents_loop(low, high, layer, tiebreak):
    n = low.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    slot = np.full(n, -1, dtype=np.int64)
    for u in range(n):
        for s in range(2):
            v = low[u] if s == 0 else high[u]
            if v < 0:
                continue
            p = parent[v]
            if p < 0 or layer[u] > layer[p] or (layer[u] == layer[p] and tiebreak[u] < tiebreak[p]):
                parent[v] = u
                slot[v] = s
    return parent, slot


_choose_parents_nb = jit(_choose_parents_loop)


def _choose_parents_np(low, high, layer, tiebreak):
    n = low.shape[0]
    src = np.concatenate([np.arange(n), np.arange(n)])
    dst = np.concatenate([low, high])
    slots = np.repeat(np.array([0, 1], dtype=np.int64), n)
    keep = dst >= 0
    src, dst, slots = src[keep], dst[keep], slots[keep]
    # within each target: deepest parent first, then smallest tie-break rank
    order = np.lexsort((tiebreak[src], -layer[src], dst))
    dst_sorted = dst[order]
    first = np.ones(dst_sorted.shape[0], dtype=bool)
    first[1:] = dst_sorted[1:] != dst_sorted[:-1]
    pick = order[first]
    parent = np.full(n, -1, dtype=np.int64)
    slot = np.full(n, -1, dtype=np.int64)
    parent[dst[pick]] = src[pick]
    slot[dst[pick]] = slots[pick]
    return parent, slot


def choose_parents(low, high, layer, tiebreak):
    """Pick one in-edge per node: deepest parent, ties to smallest ``tiebreak``.

    Returns ``(parent, slot)`` arrays; nodes without in-edges get ``-1``.
    A parent with both edges into the same node is resolved to the low slot.
    """
    args = [np.ascontiguousarray(a, dtype=np.int64) for a in (low, high, layer, tiebreak)]
    if numba_enabled():
        return _choose_parents_nb(*args)
    return _choose_parents_np(*args)


# ------------------------------------------------------------------ tree BFS


def _tree_bfs_loop(tlow, thigh, root):
    n = tlow.shape[0]
    order = np.empty(n, dtype=np.int64)
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        u = order[head]
        head += 1
        if tlow[u] >= 0:
            order[tail] = tlow[u]
            tail += 1
        if thigh[u] >= 0:
            order[tail] = thigh[u]
            tail += 1
    return order[:tail]


_tree_bfs_nb = jit(_tree_bfs_loop)


def _tree_bfs_np(tlow, thigh, root):
    levels = []
    frontier = np.array([root], dtype=np.int64)
    while frontier.shape[0]:
        levels.append(frontier)
        kids = np.stack([tlow[frontier], thigh[frontier]], axis=1).ravel()
        frontier = kids[kids >= 0]
    return np.concatenate(levels)


def tree_bfs(tlow, thigh, root):
    """BFS visiting order of a binary tree given by child arrays (-1 = none)."""
    tlow = np.ascontiguousarray(tlow, dtype=np.int64)
    thigh = np.ascontiguousarray(thigh, dtype=np.int64)
    if numba_enabled():
        return _tree_bfs_nb(tlow, thigh, np.int64(root))
    return _tree_bfs_np(tlow, thigh, int(root))


# --------------------------------------------------------------- tree decode


def _decode_tree_loop(bits, count):
    # nodes are numbered by BFS rank; children get the next free rank
    parent = np.full(count, -1, dtype=np.int64)
    slot = np.full(count, -1, dtype=np.int64)
    if bits.shape[0] < 2 * count:
        return parent, slot, ERR_EXHAUSTED
    nxt = 1
    for u in range(count):
        if u >= nxt:
            return parent, slot, ERR_COUNT
        for s in range(2):
            if bits[2 * u + s]:
                if nxt >= count:
                    return parent, slot, ERR_COUNT
                parent[nxt] = u
                slot[nxt] = s
                nxt += 1
    if nxt != count:
        return parent, slot, ERR_COUNT
    return parent, slot, OK


_decode_tree_nb = jit(_decode_tree_loop)


def _decode_tree_np(bits, count):
    parent = np.full(count, -1, dtype=np.int64)
    slot = np.full(count, -1, dtype=np.int64)
    if bits.shape[0] < 2 * count:
        return parent, slot, ERR_EXHAUSTED
    pairs = bits[: 2 * count].reshape(count, 2).astype(bool)
    # rank k is emitted by the k-th set bit; its parent is the bit's row
    rows, cols = np.nonzero(pairs)
    if rows.shape[0] != count - 1:
        return parent, slot, ERR_COUNT
    # a node must already exist before its own bits are read
    if rows.shape[0] and np.any(rows >= np.arange(1, count)):
        return parent, slot, ERR_COUNT
    parent[1:] = rows
    slot[1:] = cols
    return parent, slot, OK


def decode_tree_bits(bits, count):
    """Rebuild a BFS-numbered tree from its 2-bit-per-node code.

    Returns ``(parent, slot, err)`` with ``err`` one of the module error codes.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if numba_enabled():
        return _decode_tree_nb(bits, np.int64(count))
    return _decode_tree_np(bits, int(count))


# -------------------------------------------------------------- tree depths


def _accumulate_loop(parent, step, base):
    # parents precede children (BFS numbering)
    n = parent.shape[0]
    out = np.empty(n, dtype=np.int64)
    for r in range(n):
        if parent[r] < 0:
            out[r] = base
        else:
            out[r] = out[parent[r]] + step[r]
    return out


_accumulate_nb = jit(_accumulate_loop)


def _accumulate_np(parent, step, base):
    acc = np.where(parent < 0, base, step).astype(np.int64)
    ptr = parent.copy()
    # pointer jumping: O(n log depth)
    while True:
        live = ptr >= 0
        if not live.any():
            break
        idx = np.nonzero(live)[0]
        acc[idx] += acc[ptr[idx]]
        ptr[idx] = ptr[ptr[idx]]
    return acc


def accumulate_down(parent, step, base):
    """Sum ``step`` along root paths; the root gets ``base``.

    ``parent[r] < r`` must hold for every non-root ``r``.
    """
    parent = np.ascontiguousarray(parent, dtype=np.int64)
    step = np.ascontiguousarray(step, dtype=np.int64)
    if numba_enabled():
        return _accumulate_nb(parent, step, np.int64(base))
    return _accumulate_np(parent, step, int(base))


# ------------------------------------------------------------------- varints


def _varint_encode_loop(values):
    n = values.shape[0]
    total = 0
    for i in range(n):
        v = values[i]
        total += 1
        while v >= np.uint64(128):
            v >>= np.uint64(7)
            total += 1
    out = np.empty(total, dtype=np.uint8)
    pos = 0
    for i in range(n):
        v = values[i]
        while v >= np.uint64(128):
            out[pos] = np.uint8((v & np.uint64(127)) | np.uint64(128))
            v >>= np.uint64(7)
            pos += 1
        out[pos] = np.uint8(v)
        pos += 1
    return out


_varint_encode_nb = jit(_varint_encode_loop)

_THRESHOLDS = np.array([1 << (7 * k) for k in range(1, 10)], dtype=np.uint64)


def _varint_encode_np(values):
    if values.shape[0] == 0:
        return np.empty(0, dtype=np.uint8)
    nbytes = 1 + np.searchsorted(_THRESHOLDS, values, side="right")
    ends = np.cumsum(nbytes)
    starts = ends - nbytes
    owner = np.repeat(np.arange(values.shape[0]), nbytes)
    pos = np.arange(ends[-1]) - starts[owner]
    chunk = (values[owner] >> (np.uint64(7) * pos.astype(np.uint64))) & np.uint64(127)
    cont = pos < (nbytes[owner] - 1)
    return (chunk | (cont.astype(np.uint64) << np.uint64(7))).astype(np.uint8)


def varint_encode_array(values):
    """LEB128-style unsigned varints of an array, concatenated."""
    values = np.ascontiguousarray(values, dtype=np.uint64)
    if numba_enabled():
        return _varint_encode_nb(values)
    return _varint_encode_np(values)


def _varint_decode_loop(buf, offset, count):
    out = np.empty(count, dtype=np.uint64)
    pos = offset
    n = buf.shape[0]
    for i in range(count):
        v = np.uint64(0)
        shift = 0
        k = 0
        while True:
            if pos >= n:
                return out, pos, ERR_EXHAUSTED
            b = buf[pos]
            pos += 1
            if k == 9 and b > 1:
                return out, pos, ERR_OVERLONG
            v |= np.uint64(b & 127) << np.uint64(shift)
            k += 1
            if b < 128:
                if b == 0 and k > 1:
                    return out, pos, ERR_NONCANONICAL
                break
            shift += 7
        out[i] = v
    return out, pos, OK


_varint_decode_nb = jit(_varint_decode_loop)


def _unterminated(tail, start, offset):
    # a trailing run of continuation bytes: too long, or simply cut off
    if tail.shape[0] - start >= 10:
        return offset + start + 10, ERR_OVERLONG
    return offset + tail.shape[0], ERR_EXHAUSTED


def _varint_decode_np(buf, offset, count):
    out = np.zeros(count, dtype=np.uint64)
    if count == 0:
        return out, offset, OK
    tail = buf[offset:]
    ends = np.flatnonzero(tail < 128)
    if ends.shape[0] == 0:
        return out, *_unterminated(tail, 0, offset)
    # groups longer than 10 bytes are rejected before reading past them
    starts = np.empty_like(ends)
    starts[0] = 0
    starts[1:] = ends[:-1] + 1
    lens = ends - starts + 1
    m = min(count, ends.shape[0])
    # report the first bad group, as the sequential decoder would
    last = tail[ends[:m]]
    over = (lens[:m] > 10) | ((lens[:m] == 10) & (last > 1))
    noncanon = (lens[:m] > 1) & (last == 0) & ~over
    bad = np.flatnonzero(over | noncanon)
    if bad.shape[0]:
        k = bad[0]
        if over[k]:
            return out, offset + int(starts[k]) + 10, ERR_OVERLONG
        return out, offset + int(ends[k]) + 1, ERR_NONCANONICAL
    if ends.shape[0] < count:
        return out, *_unterminated(tail, int(ends[-1]) + 1, offset)
    ends, starts, lens = ends[:count], starts[:count], lens[:count]
    stop = int(ends[-1]) + 1
    body = tail[:stop].astype(np.uint64)
    owner = np.repeat(np.arange(count), lens)
    pos = np.arange(stop) - starts[owner]
    parts = (body & np.uint64(127)) << (np.uint64(7) * pos.astype(np.uint64))
    out = np.add.reduceat(parts, starts) if count else out
    return out.astype(np.uint64), offset + stop, OK


def varint_decode_array(buf, offset, count):
    """Decode ``count`` varints from ``buf[offset:]``.

    Returns ``(values, new_offset, err)``.
    """
    buf = np.ascontiguousarray(buf, dtype=np.uint8)
    if numba_enabled():
        return _varint_decode_nb(buf, np.int64(offset), np.int64(count))
    return _varint_decode_np(buf, int(offset), int(count))


# ---------------------------------------------------------------- reachability


def _reachable_loop(low, high, root):
    n = low.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n + 1, dtype=np.int64)
    stack[0] = root
    seen[root] = True
    top = 1
    while top > 0:
        top -= 1
        u = stack[top]
        for v in (low[u], high[u]):
            if v >= 0 and v < n and not seen[v]:
                seen[v] = True
                stack[top] = v
                top += 1
    return seen


_reachable_nb = jit(_reachable_loop)


def _reachable_np(low, high, root):
    n = low.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    frontier = np.array([root], dtype=np.int64)
    while frontier.shape[0]:
        kids = np.concatenate([low[frontier], high[frontier]])
        kids = kids[(kids >= 0) & (kids < n)]
        kids = np.unique(kids[~seen[kids]])
        seen[kids] = True
        frontier = kids
    return seen


def reachable(low, high, root):
    """Boolean mask of nodes reachable from ``root``."""
    low = np.ascontiguousarray(low, dtype=np.int64)
    high = np.ascontiguousarray(high, dtype=np.int64)
    if numba_enabled():
        return _reachable_nb(low, high, np.int64(root))
    return _reachable_np(low, high, int(root))
