import numpy as np
import pytest
import xxhash

from phast.hashing import hash64, hash_keys
from phast.keys import KeySet


@pytest.mark.parametrize("key", [b"", b"a", b"abc", b"x" * 31, b"y" * 32, b"z" * 33,
                                 bytes(range(256))])
@pytest.mark.parametrize("layer", [0, 1, 63])
def test_matches_xxh64(key, layer):
    assert hash64(key, layer) == xxhash.xxh64_intdigest(key, seed=layer)


def test_batch_matches_scalar(strings_10k):
    codes = hash_keys(strings_10k, 3)
    assert codes.dtype == np.uint64
    sample = range(0, len(strings_10k), 97)
    assert [int(codes[i]) for i in sample] == [hash64(strings_10k[i], 3) for i in sample]


def test_deterministic():
    assert hash64(b"key", 0) == hash64(b"key", 0)
    assert hash64(bytearray(b"key"), 0) == hash64(b"key", 0)


def test_layer_independence(strings_1m):
    a = hash_keys(strings_1m, 0)
    b = hash_keys(strings_1m, 1)
    assert np.mean(a != b) >= 0.999


def test_bit_balance(strings_1m):
    codes = hash_keys(strings_1m, 0)
    bits = np.unpackbits(codes.view(np.uint8).reshape(-1, 8), axis=1)
    freq = bits.mean(axis=0)
    assert np.all(np.abs(freq - 0.5) <= 0.01)


def test_empty_keyset():
    assert len(hash_keys(KeySet.from_iterable([]), 0)) == 0
