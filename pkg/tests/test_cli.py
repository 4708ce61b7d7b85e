import csv
import io
import subprocess
import sys

import pytest

from phast import Mphf
from phast.cli import (CSV_FIELDS, EXIT_CONFIG, EXIT_CORRUPT, EXIT_DUPLICATES, EXIT_INPUT,
                       main)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def three(tmp_path):
    p = tmp_path / "three.txt"
    p.write_text("apple\nbanana\ncherry\n")
    return p


def test_build_small(capsys, tmp_path, three):
    out_path = tmp_path / "f.phf"
    code, out, _ = run(capsys, "build", three, "-o", out_path)
    assert code == 0 and out_path.exists()
    (rec,) = rows(out)
    assert list(rec) == CSV_FIELDS
    assert float(rec["bits_per_key"]) == pytest.approx(8 * out_path.stat().st_size / 3, rel=0.01)
    assert rec["n"] == "3" and rec["error"] == ""


def test_threads_default_from_environment(capsys, tmp_path, three, monkeypatch):
    monkeypatch.setenv("PHAST_THREADS", "3")
    code, out, _ = run(capsys, "build", three, "-o", tmp_path / "f.phf")
    assert code == 0 and rows(out)[0]["threads"] == "3"
    code, out, _ = run(capsys, "bench", "-n", 500, "--queries", 100, "--repeats", 1)
    assert code == 0 and [r["threads"] for r in rows(out)] == ["3"]


def test_build_duplicate(capsys, tmp_path):
    p = tmp_path / "dup.txt"
    p.write_text("a\nb\na\n")
    code, _, err = run(capsys, "build", p, "-o", tmp_path / "x")
    assert code == EXIT_DUPLICATES and "duplicate" in err


def test_build_unreadable(capsys, tmp_path):
    code, _, _ = run(capsys, "build", tmp_path / "missing.txt", "-o", tmp_path / "x")
    assert code == EXIT_INPUT


@pytest.mark.parametrize("flags", [["--s-bits", "20"], ["--slice-len", "1000"],
                                   ["--m-percent", "50"], ["--lambda", "-1"]])
def test_build_invalid_config(capsys, tmp_path, three, flags):
    code, _, _ = run(capsys, "build", three, "-o", tmp_path / "x", *flags)
    assert code == EXIT_CONFIG


def test_query(capsys, tmp_path, three):
    f = tmp_path / "f.phf"
    run(capsys, "build", three, "-o", f, "--variant", "wrap", "--delta", "2")
    code, out, _ = run(capsys, "query", f, three)
    assert code == 0
    assert sorted(map(int, out.split())) == [0, 1, 2]


def test_query_single_key(capsys, tmp_path):
    k = tmp_path / "one.txt"
    k.write_text("only\n")
    run(capsys, "build", k, "-o", tmp_path / "f")
    assert run(capsys, "query", tmp_path / "f", k)[1] == "0\n"


def test_query_errors(capsys, tmp_path, three):
    assert run(capsys, "query", tmp_path / "nope", three)[0] == EXIT_INPUT
    bad = tmp_path / "bad.phf"
    bad.write_bytes(b"garbage" * 10)
    assert run(capsys, "query", bad, three)[0] == EXIT_CORRUPT


def test_non_minimal_and_compact(capsys, tmp_path):
    keys = tmp_path / "k.txt"
    run(capsys, "keygen", "random-strings-10-50", 2000, "-o", keys)
    f = tmp_path / "f"
    code, _, _ = run(capsys, "build", keys, "-o", f, "--non-minimal", "--m-percent", 110,
                     "--remap", "compact", "--variant", "add")
    assert code == 0
    g = Mphf.load(f)
    assert g.target == 2200
    values = list(map(int, run(capsys, "query", f, keys)[1].split()))
    assert len(set(values)) == 2000 and max(values) < 2200


def test_binary_keys(capsys, tmp_path):
    keys = tmp_path / "k.bin"
    run(capsys, "keygen", "u64-integers", 500, "-o", keys, "--format", "binary")
    f = tmp_path / "f"
    assert run(capsys, "build", keys, "-o", f, "--format", "binary")[0] == 0
    out = run(capsys, "query", f, keys, "--format", "binary")[1]
    assert sorted(map(int, out.split())) == list(range(500))


def test_keygen_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "keygen", "random-strings-10-50", 300, "-o", a, "--rng-seed", 4)
    run(capsys, "keygen", "random-strings-10-50", 300, "-o", b, "--rng-seed", 4)
    assert a.read_bytes() == b.read_bytes()


def test_bench_empty_sweep(capsys):
    code, out, _ = run(capsys, "bench", "-n", 10, "--variant", "")
    assert code == 0 and out == ",".join(CSV_FIELDS) + "\n"


def test_bench_rows(capsys):
    code, out, _ = run(capsys, "bench", "-n", 3000, "--variant", "mul,add", "--lambda",
                       "4:5:0.5", "--threads", "1,2", "--queries", 20000, "--repeats", 3)
    assert code == 0
    recs = rows(out)
    assert len(recs) == 2 * 3 * 2
    for r in recs:
        assert r["error"] == ""
        assert float(r["bits_per_key"]) > 1.44
        assert float(r["build_ns_per_key"]) > 0 and float(r["query_ns_per_query"]) > 0
    assert [r["lambda"] for r in recs[:6:2]] == ["4", "4.5", "5"]
    # rows survive a write/read round trip
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(recs)
    assert buf.getvalue() == out


def test_bench_records_errors(capsys, tmp_path):
    sweep = tmp_path / "sweep.csv"
    sweep.write_text("variant,S,lambda,L,delta\nmul,8,4.5,,1\nmul,8,4.5,1000,1\nwrap,30,,,1\n")
    code, out, _ = run(capsys, "bench", "-n", 2000, "--sweep-file", sweep, "--queries", 1000)
    assert code == 0
    recs = rows(out)
    assert [bool(r["error"]) for r in recs] == [False, True, True]


def test_end_to_end_million(tmp_path):
    keys, f = tmp_path / "keys.txt", tmp_path / "f.phf"
    exe = [sys.executable, "-m", "phast.cli"]
    subprocess.run(exe + ["keygen", "random-strings-10-50", "1000000", "-o", str(keys)], check=True)
    res = subprocess.run(exe + ["build", str(keys), "-o", str(f)], check=True,
                         capture_output=True, text=True)
    (rec,) = rows(res.stdout)
    assert rec["n"] == "1000000" and 1.44 < float(rec["bits_per_key"]) < 2.2
    out = subprocess.run(exe + ["query", str(f), str(keys)], check=True,
                         capture_output=True, text=True).stdout
    assert sorted(map(int, out.split())) == list(range(10**6))
