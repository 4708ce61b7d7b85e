import numpy as np
import pytest

from phast.errors import PhastError
from phast.keys import KeySet, keygen, random_strings, read_keys, write_keys


def test_keyset_roundtrip():
    ks = KeySet.from_iterable([b"a", "bc", b"", bytes([0, 10, 255])])
    assert len(ks) == 4
    assert list(ks) == [b"a", b"bc", b"", bytes([0, 10, 255])]
    assert ks[-1] == bytes([0, 10, 255])
    assert list(ks.take([3, 0])) == [bytes([0, 10, 255]), b"a"]


def test_from_u64_little_endian():
    ks = KeySet.from_u64(np.array([1, 2**64 - 1], dtype=np.uint64))
    assert ks[0] == (1).to_bytes(8, "little")
    assert ks[1] == b"\xff" * 8


def test_same_seed_same_stream():
    assert list(keygen("random-strings-10-50", 500, 3)) == list(keygen("random-strings-10-50", 500, 3))
    assert list(keygen("random-strings-10-50", 500, 3)) != list(keygen("random-strings-10-50", 500, 4))


def test_lengths_in_range():
    lengths = np.diff(random_strings(10_000, 5).offsets)
    assert lengths.min() >= 10 and lengths.max() <= 50
    assert lengths.min() == 10 and lengths.max() == 50


def test_strings_unique(strings_1m):
    assert len(set(strings_1m)) == len(strings_1m)


def test_short_strings_regenerated_on_collision():
    # with 3-byte keys over 94 symbols collisions are certain at this size
    from phast.keys import random_strings as rs
    ks = rs(50_000, 1, min_len=3, max_len=3)
    assert len(set(ks)) == 50_000


def test_u64_unique():
    ks = keygen("u64-integers", 100_000, 9)
    assert len(set(ks)) == 100_000


def test_unknown_kind():
    with pytest.raises(ValueError):
        keygen("nope", 3)


@pytest.mark.parametrize("fmt", ["text", "binary"])
def test_file_roundtrip(tmp_path, fmt):
    keys = [b"alpha", b"beta", b"\xce\xb3amma"] + ([b"with\nnewline", b""] if fmt == "binary" else [])
    path = tmp_path / "keys"
    write_keys(keys, path, fmt)
    assert list(read_keys(path, fmt)) == keys


def test_text_rejects_newline(tmp_path):
    with pytest.raises(ValueError):
        write_keys([b"a\nb"], tmp_path / "k", "text")


def test_truncated_binary(tmp_path):
    p = tmp_path / "k"
    p.write_bytes(b"\x05\x00\x00\x00abc")
    with pytest.raises(PhastError):
        read_keys(p, "binary")


def test_crlf_text(tmp_path):
    p = tmp_path / "k"
    p.write_bytes(b"a\r\nb\r\n")
    assert list(read_keys(p)) == [b"a", b"b"]
