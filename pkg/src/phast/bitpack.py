"""Fixed-width integer packing into little-endian 64-bit words."""

import numba as nb
import numpy as np

_U63 = np.uint64(63)
_U6 = np.uint64(6)


def words_for(count, width):
    return (count * width + 63) // 64


@nb.njit(cache=True)
def _pack(values, width, out):
    for i in range(values.shape[0]):
        v = np.uint64(values[i])
        bit = np.uint64(i * width)
        w = bit >> _U6
        o = bit & _U63
        out[w] |= v << o
        if o + np.uint64(width) > np.uint64(64):
            out[w + np.uint64(1)] |= v >> (np.uint64(64) - o)


def pack(values, width):
    out = np.zeros(max(1, words_for(len(values), width)), dtype=np.uint64)
    if width:
        _pack(np.ascontiguousarray(values, dtype=np.uint64), width, out)
    return out


@nb.njit(inline="always")
def nb_get(words, i, width):
    if width == 0:
        return np.int64(0)
    bit = np.uint64(i * width)
    w = bit >> _U6
    o = bit & _U63
    v = words[w] >> o
    if o + np.uint64(width) > np.uint64(64):
        v |= words[w + np.uint64(1)] << (np.uint64(64) - o)
    return np.int64(v & ((np.uint64(1) << np.uint64(width)) - np.uint64(1)))


@nb.njit(cache=True)
def _unpack(words, width, out):
    for i in range(out.shape[0]):
        out[i] = nb_get(words, i, width)


def unpack(words, width, count):
    out = np.empty(count, dtype=np.int64)
    _unpack(words, width, out)
    return out


@nb.njit(inline="always")
def nb_popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))
