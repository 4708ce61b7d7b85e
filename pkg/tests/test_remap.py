import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phast.errors import CorruptStreamError
from phast.remap import (COMPACT, ELIAS_FANO, CompactArray, EliasFano, read_remap,
                         remap_build)

ENCS = [ELIAS_FANO, COMPACT]


@pytest.mark.parametrize("enc", ENCS)
def test_small_example(enc):
    r = remap_build([3, 17, 42], 50, enc)
    assert r[1] == 17
    assert r.to_array().tolist() == [3, 17, 42]


@pytest.mark.parametrize("enc", ENCS)
def test_empty(enc):
    r = remap_build([], 10, enc)
    assert len(r) == 0
    with pytest.raises(IndexError):
        r[0]


@pytest.mark.parametrize("enc", ENCS)
def test_random_roundtrip(enc, rng):
    values = np.sort(rng.choice(10**6, size=10**4, replace=False))
    r = remap_build(values, 10**6, enc)
    assert np.array_equal(r.to_array(), values)
    assert all(r[j] == values[j] for j in range(0, 10**4, 7))


def test_elias_fano_size(rng):
    values = np.sort(rng.choice(10**6, size=10**4, replace=False))
    r = EliasFano(values, 10**6)
    assert r.size_bits() <= 1.2 * 10**4 * (2 + math.log2(10**6 / 10**4))


def test_by_name():
    assert isinstance(remap_build([1], 4, "compact"), CompactArray)
    assert isinstance(remap_build([1], 4, "EF"), EliasFano)
    with pytest.raises((KeyError, ValueError)):
        remap_build([1], 4, "zip")


@given(st.lists(st.integers(0, 2**40), max_size=700), st.integers(1, 2**41),
       st.sampled_from(ENCS))
def test_property_roundtrip(values, extra, enc):
    values = sorted(values)
    universe = (values[-1] if values else 0) + extra
    r = remap_build(values, universe, enc)
    assert r.to_array().tolist() == values
    back, pos = read_remap(enc, len(values), universe, r.payload(), 0)
    assert pos == len(r.payload())
    assert back.to_array().tolist() == values


@pytest.mark.parametrize("bad", [[5, 3], [-1], [10]])
def test_rejects_bad_sequences(bad):
    with pytest.raises(ValueError):
        remap_build(bad, 10)


def test_corrupt_samples(rng):
    values = np.sort(rng.choice(10**5, size=2000, replace=False))
    payload = bytearray(EliasFano(values, 10**5).payload())
    payload[-1] ^= 0x40
    with pytest.raises(CorruptStreamError):
        read_remap(ELIAS_FANO, 2000, 10**5, bytes(payload), 0)
    with pytest.raises(CorruptStreamError):
        read_remap(ELIAS_FANO, 2000, 10**5, bytes(payload[:40]), 0)
    with pytest.raises(CorruptStreamError):
        read_remap(9, 2000, 10**5, bytes(payload), 0)
