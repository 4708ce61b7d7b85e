"""Monotone remap array sending overflow values to free first-layer slots.

Two encodings: Elias-Fano (``EF``) and fixed width (``COMPACT``). Both
store a non-decreasing integer sequence below a universe bound and answer
``access(j)`` in constant time.
"""

import struct

import numba as nb
import numpy as np

from . import bitpack
from .bitpack import nb_get, nb_popcount
from .errors import CorruptStreamError

ELIAS_FANO = 1
COMPACT = 2
ENCODINGS = {"ef": ELIAS_FANO, "compact": COMPACT, "c": COMPACT}

SELECT_SAMPLE = 256


def _check_sequence(values, universe):
    if len(values) and (values[0] < 0 or values[-1] >= universe):
        raise ValueError("remap values must lie in [0, universe)")
    if len(values) > 1 and np.any(np.diff(values) < 0):
        raise ValueError("remap values must be non-decreasing")


@nb.njit(cache=True)
def _ef_high(values, low_bits, out):
    for i in range(values.shape[0]):
        pos = (np.uint64(values[i]) >> np.uint64(low_bits)) + np.uint64(i)
        out[pos >> np.uint64(6)] |= np.uint64(1) << (pos & np.uint64(63))


@nb.njit(cache=True)
def _ef_samples(high, count, out):
    seen = 0
    for w in range(high.shape[0]):
        word = high[w]
        while word != 0:
            if seen % SELECT_SAMPLE == 0:
                t = word & (~word + np.uint64(1))
                out[seen // SELECT_SAMPLE] = w * 64 + nb_popcount(t - np.uint64(1))
            word &= word - np.uint64(1)
            seen += 1
            if seen == count:
                return


@nb.njit(inline="always")
def nb_ef_access(high, low, samples, low_bits, j):
    pos = samples[j // SELECT_SAMPLE]
    left = j % SELECT_SAMPLE
    w = pos >> 6
    word = high[w] & (np.uint64(0xFFFFFFFFFFFFFFFF) << np.uint64(pos & 63))
    while True:
        c = nb_popcount(word)
        if left < c:
            break
        left -= c
        w += 1
        word = high[w]
    for _ in range(left):
        word &= word - np.uint64(1)
    t = word & (~word + np.uint64(1))
    one = w * 64 + nb_popcount(t - np.uint64(1))
    return ((one - j) << low_bits) | nb_get(low, j, low_bits)


class RemapArray:
    """Abstract base for the two encodings; see :func:`remap_build`."""

    encoding = 0

    def __init__(self, count, universe):
        self.count = count
        self.universe = universe

    def __len__(self):
        return self.count

    def __getitem__(self, j):
        if not 0 <= j < self.count:
            raise IndexError(j)
        return self.access(j)

    def to_array(self):
        return np.array([self.access(j) for j in range(self.count)], dtype=np.int64)


class EliasFano(RemapArray):
    encoding = ELIAS_FANO

    def __init__(self, values, universe):
        values = np.ascontiguousarray(values, dtype=np.int64)
        _check_sequence(values, universe)
        super().__init__(len(values), universe)
        n = len(values)
        self.low_bits = int(np.floor(np.log2(universe / n))) if n and universe > n else 0
        while self.low_bits > 0 and (universe >> self.low_bits) == 0:
            self.low_bits -= 1
        self.low = bitpack.pack(values & ((1 << self.low_bits) - 1), self.low_bits)
        high_len = n + (max(universe - 1, 0) >> self.low_bits) + 1 if n else 0
        self.high = np.zeros((high_len + 63) // 64 + 1, dtype=np.uint64)
        _ef_high(values, self.low_bits, self.high)
        self.samples = self._make_samples()

    def _make_samples(self):
        samples = np.zeros((self.count + SELECT_SAMPLE - 1) // SELECT_SAMPLE, dtype=np.int64)
        _ef_samples(self.high, self.count, samples)
        return samples

    def access(self, j):
        return int(nb_ef_access(self.high, self.low, self.samples, self.low_bits, j))

    def to_array(self):
        out = np.empty(self.count, dtype=np.int64)
        _ef_decode(self.high, self.low, self.samples, self.low_bits, out)
        return out

    def size_bits(self):
        return 64 * (len(self.low) + len(self.high) + len(self.samples))

    def payload(self):
        return (struct.pack("<B", self.low_bits) + _words(self.low) + _words(self.high)
                + _words(self.samples.astype(np.uint64)))

    @classmethod
    def from_payload(cls, count, universe, buf, pos):
        self = cls.__new__(cls)
        RemapArray.__init__(self, count, universe)
        self.low_bits = _unpack("<B", buf, pos)[0]
        pos += 1
        self.low, pos = _read_words(buf, pos)
        self.high, pos = _read_words(buf, pos)
        samples, pos = _read_words(buf, pos)
        self.samples = samples.astype(np.int64)
        if self.low_bits > 63 or not np.array_equal(self.samples, self._make_samples()):
            raise CorruptStreamError("Elias-Fano select samples do not match the high bits")
        return self, pos


@nb.njit(cache=True)
def _ef_decode(high, low, samples, low_bits, out):
    for j in range(out.shape[0]):
        out[j] = nb_ef_access(high, low, samples, low_bits, j)


class CompactArray(RemapArray):
    encoding = COMPACT

    def __init__(self, values, universe):
        values = np.ascontiguousarray(values, dtype=np.int64)
        _check_sequence(values, universe)
        super().__init__(len(values), universe)
        self.width = max(1, (universe - 1).bit_length())
        self.words = bitpack.pack(values, self.width)

    def access(self, j):
        return int(nb_get(self.words, j, self.width))

    def to_array(self):
        return bitpack.unpack(self.words, self.width, self.count)

    def size_bits(self):
        return 64 * len(self.words)

    def payload(self):
        return struct.pack("<B", self.width) + _words(self.words)

    @classmethod
    def from_payload(cls, count, universe, buf, pos):
        self = cls.__new__(cls)
        RemapArray.__init__(self, count, universe)
        self.width = _unpack("<B", buf, pos)[0]
        self.words, pos = _read_words(buf, pos + 1)
        if not 1 <= self.width <= 63 or len(self.words) < bitpack.words_for(count, self.width):
            raise CorruptStreamError("compact remap array is malformed")
        return self, pos


def remap_build(values, universe, encoding=ELIAS_FANO):
    """Encode the non-decreasing ``values`` (all below ``universe``)."""
    if isinstance(encoding, str):
        encoding = ENCODINGS[encoding.lower()]
    if encoding == ELIAS_FANO:
        return EliasFano(values, universe)
    if encoding == COMPACT:
        return CompactArray(values, universe)
    raise ValueError(f"unknown remap encoding {encoding!r}")


# --------------------------------------------------------------------------
# serialization helpers

def _words(arr):
    arr = np.ascontiguousarray(arr, dtype="<u8")
    return struct.pack("<Q", len(arr)) + arr.tobytes()


def _unpack(fmt, buf, pos):
    try:
        return struct.unpack_from(fmt, buf, pos)
    except struct.error as e:
        raise CorruptStreamError("stream truncated") from e


def _read_words(buf, pos):
    (count,) = _unpack("<Q", buf, pos)
    pos += 8
    end = pos + 8 * count
    if end > len(buf):
        raise CorruptStreamError("stream truncated")
    return np.frombuffer(buf, dtype="<u8", count=count, offset=pos).astype(np.uint64), end


def read_remap(encoding, count, universe, buf, pos):
    if encoding == ELIAS_FANO:
        return EliasFano.from_payload(count, universe, buf, pos)
    if encoding == COMPACT:
        return CompactArray.from_payload(count, universe, buf, pos)
    raise CorruptStreamError(f"unknown remap encoding tag {encoding}")
