"""Plain-text interchange format.

::

    bdd <node-count> <var-count> <root-id>
    <id> <layer> <low-id> <high-id>
    <id> <layer> T0
    <id> <layer> T1

Ids are decimal integers; blank lines and ``#`` comments are ignored on
input.  The writer lists nodes in codec layer order with ids ``1..|V|``, so
its output is canonical.  Loosely modelled on BuDDy dumps, not compatible
with them.
"""

from __future__ import annotations

from .bdd import Bdd, check
from .ordering import codec_layer_order
from .spanning import build_spanning_tree


class BddFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def _int(tok: str, lineno: int, what: str) -> int:
    if not tok.isdigit():
        raise BddFormatError(lineno, f"{what} must be a non-negative integer, got {tok!r}")
    return int(tok)


def read_bdd_text(data) -> Bdd:
    """Parse and validate a text BDD; raises BddFormatError or InvalidBddError."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BddFormatError(0, f"not UTF-8 text: {exc}") from None
    header = None
    rows = {}
    lines = {}
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 4 or tok[0] != "bdd":
                raise BddFormatError(lineno, "expected 'bdd <node-count> <var-count> <root-id>'")
            header = (
                _int(tok[1], lineno, "node count"),
                _int(tok[2], lineno, "variable count"),
                _int(tok[3], lineno, "root id"),
                lineno,
            )
            continue
        if len(tok) == 3 and tok[2] in ("T0", "T1"):
            node = (_int(tok[1], lineno, "layer"), tok[2])
        elif len(tok) == 4:
            node = (_int(tok[1], lineno, "layer"), _int(tok[2], lineno, "low id"), _int(tok[3], lineno, "high id"))
        else:
            raise BddFormatError(lineno, "expected '<id> <layer> <low> <high>' or '<id> <layer> T0|T1'")
        nid = _int(tok[0], lineno, "node id")
        if nid in rows:
            raise BddFormatError(lineno, f"node id {nid} defined twice (first on line {lines[nid]})")
        rows[nid] = node
        lines[nid] = lineno
    if header is None:
        raise BddFormatError(0, "empty input")
    count, num_vars, root, hline = header
    if count != len(rows):
        raise BddFormatError(hline, f"header announces {count} nodes, found {len(rows)}")
    if root not in rows:
        raise BddFormatError(hline, f"root id {root} is not defined")
    for nid, node in rows.items():
        for child in node[1:]:
            if child not in ("T0", "T1") and child not in rows:
                raise BddFormatError(lines[nid], f"node {nid} references undefined node {child}")
    return check(Bdd.from_nodes(num_vars, rows, root))


def write_bdd_text(bdd: Bdd) -> bytes:
    """Canonical text form: nodes in codec layer order, ids 1..|V|."""
    check(bdd)
    if len(bdd) == 1:
        order = [0]
    else:
        tree = build_spanning_tree(bdd)
        order = codec_layer_order(tree, bdd.layer, bdd.value).order.tolist()
    ids = {u: i + 1 for i, u in enumerate(order)}
    out = [f"bdd {len(bdd)} {bdd.num_vars} {ids[bdd.root]}"]
    layer, low, high, value = (a.tolist() for a in (bdd.layer, bdd.low, bdd.high, bdd.value))
    for u in order:
        if value[u] >= 0:
            out.append(f"{ids[u]} {layer[u]} T{value[u]}")
        else:
            out.append(f"{ids[u]} {layer[u]} {ids[low[u]]} {ids[high[u]]}")
    return ("\n".join(out) + "\n").encode("ascii")
