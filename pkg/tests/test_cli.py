import shutil

import pytest

from bdz.bdd import Bdd
from bdz.cli import main
from bdz.textio import read_bdd_text, write_bdd_text
from corpus import DATA

GOLDEN20 = DATA / "golden20.bdd"


@pytest.fixture
def q8(tmp_path):
    path = tmp_path / "q8.bdd"
    assert main(["gen", "queens", "8", "-o", str(path)]) == 0
    return path


def test_compress_summary(tmp_path, capsys):
    out = tmp_path / "f.bdz"
    assert main(["compress", "-i", str(GOLDEN20), "-o", str(out), "--th", "5"]) == 0
    line = capsys.readouterr().out
    assert "|V|=20" in line
    size = out.stat().st_size
    assert f"bytes={size}" in line
    assert f"bits/node={8 * size / 20:.3f}" in line


def test_store_roundtrip_identity(tmp_path):
    out, back = tmp_path / "f.bdz", tmp_path / "f.txt"
    assert main(["compress", "-i", str(GOLDEN20), "-o", str(out), "--backend", "store"]) == 0
    assert main(["decompress", "-i", str(out), "-o", str(back)]) == 0
    assert back.read_bytes() == write_bdd_text(read_bdd_text(GOLDEN20.read_bytes()))


def test_no_delta_changes_container(tmp_path):
    a, b = tmp_path / "a.bdz", tmp_path / "b.bdz"
    main(["compress", "-i", str(GOLDEN20), "-o", str(a), "--backend", "store"])
    main(["compress", "-i", str(GOLDEN20), "-o", str(b), "--backend", "store", "--no-delta"])
    assert a.read_bytes() != b.read_bytes()
    assert main(["verify", str(GOLDEN20), str(b)]) == 0


def test_queens_pipeline(tmp_path, q8, capsys):
    c1, txt, c2 = tmp_path / "q.bdz", tmp_path / "q.txt", tmp_path / "q2.bdz"
    assert main(["compress", "-i", str(q8), "-o", str(c1)]) == 0
    assert main(["decompress", "-i", str(c1), "-o", str(txt)]) == 0
    assert main(["verify", str(q8), str(c1)]) == 0
    assert main(["compress", "-i", str(txt), "-o", str(c2)]) == 0
    assert c1.read_bytes() == c2.read_bytes()


def test_verify_mismatch(tmp_path, capsys):
    other = tmp_path / "o.bdd"
    other.write_bytes(write_bdd_text(Bdd.from_nodes(6, {
        "r": (1, "a", "T"), "a": (2, "F", "T"), "F": (7, "T0"), "T": (7, "T1")}, "r")))
    c = tmp_path / "o.bdz"
    main(["compress", "-i", str(other), "-o", str(c)])
    capsys.readouterr()
    assert main(["verify", str(GOLDEN20), str(c)]) == 1
    assert "node #" in capsys.readouterr().out


def test_verify_small_is_exhaustive(tmp_path, capsys):
    c = tmp_path / "f.bdz"
    main(["compress", "-i", str(GOLDEN20), "-o", str(c)])
    assert main(["verify", str(GOLDEN20), str(c)]) == 0
    assert "exhaustive" in capsys.readouterr().out


def test_bad_magic(tmp_path, capsys):
    bad, out = tmp_path / "x.bdz", tmp_path / "x.txt"
    bad.write_bytes(b"nope, not a container")
    assert main(["decompress", "-i", str(bad), "-o", str(out)]) == 2
    assert "unrecognized container" in capsys.readouterr().err
    assert not out.exists()


def test_corrupt_leaves_no_file(tmp_path):
    c, out = tmp_path / "f.bdz", tmp_path / "f.txt"
    main(["compress", "-i", str(GOLDEN20), "-o", str(c)])
    c.write_bytes(c.read_bytes()[:-2])
    assert main(["decompress", "-i", str(c), "-o", str(out)]) == 2
    assert list(tmp_path.iterdir()) == [c]


def test_naive_dispatch(tmp_path):
    c, out = tmp_path / "f.bdn", tmp_path / "f.txt"
    assert main(["compress", "-i", str(GOLDEN20), "-o", str(c), "--naive"]) == 0
    assert c.read_bytes()[:4] == b"BDN1"
    assert main(["decompress", "-i", str(c), "-o", str(out)]) == 0
    assert main(["verify", str(GOLDEN20), str(c)]) == 0


def test_missing_and_invalid_input(tmp_path, capsys):
    assert main(["compress", "-i", str(tmp_path / "none.bdd"), "-o", str(tmp_path / "x")]) == 2
    bad = tmp_path / "bad.bdd"
    bad.write_text("bdd 3 1 1\n1 1 2 9\n2 2 T0\n3 2 T1\n")
    assert main(["compress", "-i", str(bad), "-o", str(tmp_path / "x")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.bdd", tmp_path / "b.bdd"
    assert main(["gen", "random", "300", "--seed", "5", "-o", str(a)]) == 0
    assert main(["gen", "random", "300", "--seed", "5", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "queens", "12", "-o", str(a)]) == 2


def test_stats(capsys):
    assert main(["stats", "-i", str(GOLDEN20), "--th", "5", "--tf", "2", "--backend", "store"]) == 0
    out = capsys.readouterr().out
    fields = dict(line.rsplit(None, 1) for line in out.strip().splitlines())
    assert fields["forward edges"] == "2"
    assert fields["nodes"] == "20"
    assert fields["long tree edges"] == "0"


def test_bench(tmp_path, q8, capsys):
    d = tmp_path / "corpus"
    d.mkdir()
    shutil.copy(q8, d / "q8.bdd")
    shutil.copy(GOLDEN20, d / "golden20.bdd")
    (d / "junk.bdd").write_text("garbage\n")
    assert main(["bench", str(d), "--csv"]) == 0
    cap = capsys.readouterr()
    assert "junk.bdd" in cap.err
    rows = cap.out.strip().splitlines()
    assert rows[0].startswith("file,nodes")
    q = [r for r in rows if r.startswith("q8.bdd")][0].split(",")
    assert float(q[-1]) > 2.0
    assert main(["bench", str(d), "--csv", "--jobs", "2"]) == 0
    assert capsys.readouterr().out == cap.out


def test_bench_empty_dir(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 2
    (tmp_path / "bad.bdd").write_text("x")
    assert main(["bench", str(tmp_path)]) == 2
