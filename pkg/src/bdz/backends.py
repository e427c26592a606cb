"""General-purpose compressors applied to the serialised sections."""

from __future__ import annotations

import lzma
import zlib

STORE = 0
DEFLATE = 1
LZMA = 2

NAMES = {"store": STORE, "deflate": DEFLATE, "lzma": LZMA}
IDS = {v: k for k, v in NAMES.items()}

_LZMA_FILTERS = [{"id": lzma.FILTER_LZMA1, "preset": 6 | lzma.PRESET_EXTREME}]


class BackendError(ValueError):
    pass


def backend_id(name) -> int:
    if isinstance(name, int) and name in IDS:
        return name
    try:
        return NAMES[name]
    except (KeyError, TypeError):
        raise BackendError(f"unknown backend {name!r}; choose from {sorted(NAMES)}") from None


def compress(data: bytes, backend) -> bytes:
    bid = backend_id(backend)
    if bid == STORE:
        return bytes(data)
    if bid == DEFLATE:
        return zlib.compress(data, 9)
    return lzma.compress(data, format=lzma.FORMAT_ALONE, filters=_LZMA_FILTERS)


def decompress(data: bytes, backend) -> bytes:
    bid = backend_id(backend)
    if bid == STORE:
        return bytes(data)
    try:
        if bid == DEFLATE:
            d = zlib.decompressobj()
            out = d.decompress(data)
            if not d.eof or d.unused_data:
                raise BackendError("deflate stream is truncated or followed by junk")
            return out
        d = lzma.LZMADecompressor(format=lzma.FORMAT_ALONE)
        out = d.decompress(data)
        if not d.eof or d.unused_data:
            raise BackendError("lzma stream is truncated or followed by junk")
        return out
    except (zlib.error, lzma.LZMAError, EOFError, MemoryError) as exc:
        raise BackendError(f"{IDS[bid]} decompression failed: {exc}") from exc
