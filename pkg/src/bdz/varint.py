"""Unsigned LEB128 varints and zigzag mapping for signed values."""

from __future__ import annotations

import numpy as np

from . import kernels

MAX_U64 = (1 << 64) - 1


class VarintError(ValueError):
    pass


def write_varint(value: int) -> bytes:
    if not 0 <= value <= MAX_U64:
        raise VarintError(f"{value} is outside the unsigned 64-bit range")
    out = bytearray()
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def read_varint(buf: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode one varint at ``offset``; returns ``(value, next_offset)``."""
    value = 0
    for k in range(10):
        if offset + k >= len(buf):
            raise VarintError(f"truncated varint at offset {offset}")
        b = buf[offset + k]
        if k == 9 and b > 1:
            raise VarintError(f"varint at offset {offset} overflows 64 bits")
        value |= (b & 0x7F) << (7 * k)
        if b < 0x80:
            if b == 0 and k > 0:
                raise VarintError(f"overlong varint at offset {offset}")
            return value, offset + k + 1
    raise VarintError(f"varint at offset {offset} is longer than 10 bytes")


def zigzag(n: int) -> int:
    if not -(1 << 63) <= n < (1 << 63):
        raise VarintError(f"{n} is outside the signed 64-bit range")
    return (n << 1) if n >= 0 else ((-n) << 1) - 1


def unzigzag(z: int) -> int:
    return (z >> 1) ^ -(z & 1)


def write_zigzag(n: int) -> bytes:
    return write_varint(zigzag(n))


def read_zigzag(buf: bytes, offset: int = 0) -> tuple[int, int]:
    z, offset = read_varint(buf, offset)
    return unzigzag(z), offset


def zigzag_array(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    return ((v << 1) ^ (v >> 63)).view(np.uint64)


def unzigzag_array(values) -> np.ndarray:
    z = np.asarray(values, dtype=np.uint64)
    return ((z >> np.uint64(1)).view(np.int64)) ^ -((z & np.uint64(1)).view(np.int64))


def encode_array(values) -> bytes:
    """Concatenated varints of non-negative integers."""
    arr = np.asarray(values)
    if arr.size and arr.dtype.kind == "i" and arr.min() < 0:
        raise VarintError("negative value in unsigned varint stream")
    return kernels.varint_encode_array(arr.astype(np.uint64)).tobytes()


_MESSAGES = {
    kernels.ERR_EXHAUSTED: "truncated varint stream",
    kernels.ERR_OVERLONG: "varint overflows 64 bits",
    kernels.ERR_NONCANONICAL: "overlong varint encoding",
}


def decode_array(buf, offset: int, count: int) -> tuple[np.ndarray, int]:
    """Read ``count`` varints starting at ``offset``; returns ``(uint64 array, next_offset)``."""
    if count < 0:
        raise VarintError("negative count")
    data = np.frombuffer(buf, dtype=np.uint8) if isinstance(buf, (bytes, bytearray, memoryview)) else buf
    if count > data.shape[0] - offset:
        raise VarintError(f"{count} varints cannot fit in {data.shape[0] - offset} bytes")
    values, pos, err = kernels.varint_decode_array(data, offset, count)
    if err:
        raise VarintError(f"{_MESSAGES[err]} (reading {count} values from offset {offset})")
    return values, int(pos)
