import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdz import varint
from bdz.bdd import Bdd, InvalidBddError, isomorphic
from bdz.codec import DecodeError, decode, encode
from bdz.naive import MAGIC, naive_decode, naive_encode
from bdz.textio import BddFormatError, read_bdd_text, write_bdd_text
from corpus import DATA, golden20, random_corpus

THREE = b"bdd 3 1 1\n1 1 2 3\n2 2 T0\n3 2 T1\n"


def store_payload(data: bytes) -> bytes:
    # skip magic, backend byte and the variable-count varint
    _, pos = varint.read_varint(data, 5)
    return data[pos:]


# -------------------------------------------------------------------- naive


def test_naive_three_node_layout():
    b = read_bdd_text(THREE)
    data = naive_encode(b, "store")
    assert data[:5] == MAGIC + b"\x00"
    assert store_payload(data) == bytes([1, 2, 0, 2, 3])
    assert isomorphic(naive_decode(data), b)


def test_naive_golden20_child_count():
    data = naive_encode(golden20(), "store")
    payload = store_payload(data)
    sizes, pos = varint.decode_array(payload, 0, 7)
    assert sizes.tolist() == [1, 2, 4, 6, 3, 2, 2]
    kids, end = varint.decode_array(payload, pos + 1, 36)
    assert end == len(payload)
    assert kids.min() >= 1 and kids.max() <= 20


@pytest.mark.parametrize("backend", ["store", "deflate", "lzma"])
def test_naive_roundtrip(backend):
    for b in random_corpus()[:300]:
        assert isomorphic(naive_decode(naive_encode(b, backend)), b)


def test_naive_agrees_with_codec():
    for b in random_corpus()[300:400]:
        a = naive_decode(naive_encode(b, "deflate"))
        c = decode(encode(b))
        assert isomorphic(a, c)
        # both decoders emit nodes in the same canonical numbering
        np.testing.assert_array_equal(a.low, c.low)


def test_naive_bad_child_id():
    data = bytearray(naive_encode(read_bdd_text(THREE), "store"))
    data[-2] = 0
    with pytest.raises(DecodeError, match="out of range"):
        naive_decode(bytes(data))


def test_naive_non_layered_edge():
    # root's low child pointed back at the root
    data = bytearray(naive_encode(read_bdd_text(THREE), "store"))
    data[-2] = 1
    with pytest.raises(DecodeError):
        naive_decode(bytes(data))


def test_naive_malformed():
    with pytest.raises(DecodeError, match="unrecognized"):
        naive_decode(b"BDZ1\x00\x00")
    good = naive_encode(golden20(), "store")
    for cut in range(len(good)):
        with pytest.raises(DecodeError):
            naive_decode(good[:cut])


def test_naive_single_terminal():
    b = Bdd(2, [3], [-1], [-1], [1], 0)
    back = naive_decode(naive_encode(b))
    assert len(back) == 1 and back.value[0] == 1


# --------------------------------------------------------------------- text


def test_read_three_node():
    b = read_bdd_text(THREE)
    assert len(b) == 3 and b.num_vars == 1


def test_write_is_canonical():
    b = golden20()
    out = write_bdd_text(b)
    assert out == write_bdd_text(b)
    body = [l for l in (DATA / "golden20.bdd").read_text().splitlines() if l and not l.startswith("#")]
    assert out.decode().splitlines() == body
    assert write_bdd_text(read_bdd_text(out)) == out


def test_write_single_terminal():
    assert write_bdd_text(Bdd(2, [3], [-1], [-1], [0], 0)) == b"bdd 1 2 1\n1 3 T0\n"


@pytest.mark.parametrize("b", random_corpus()[:300:3], ids=lambda b: str(len(b)))
def test_text_roundtrip(b):
    text = write_bdd_text(b)
    back = read_bdd_text(text)
    assert isomorphic(back, b)
    assert write_bdd_text(back) == text


@pytest.mark.parametrize("text,line", [
    (b"bdd 3 1 1\n1 1 2 9\n2 2 T0\n3 2 T1\n", 2),
    (b"bdd 3 1 1\n1 1 2 3\n2 2 T0\n2 2 T1\n", 4),
    (b"bdd 4 1 1\n1 1 2 3\n2 2 T0\n3 2 T1\n", 1),
    (b"bdd 3 1 1\n1 1 2 3\n2 2 T0\n3 x T1\n", 4),
    (b"graph 3\n", 1),
])
def test_parse_errors_name_line(text, line):
    with pytest.raises(BddFormatError) as err:
        read_bdd_text(text)
    assert err.value.lineno == line
    assert f"line {line}" in str(err.value)


def test_comments_and_blank_lines():
    text = b"# hi\n\nbdd 3 1 1  # header\n1 1 2 3\n\n2 2 T0\n3 2 T1\n"
    assert isomorphic(read_bdd_text(text), read_bdd_text(THREE))


def test_invalid_structure_rejected():
    with pytest.raises(InvalidBddError):
        read_bdd_text(b"bdd 4 2 1\n1 1 2 2\n2 2 3 4\n3 3 T0\n4 3 T1\n")


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=200))
def test_parser_never_crashes(raw):
    try:
        read_bdd_text(raw)
    except (BddFormatError, InvalidBddError):
        pass
