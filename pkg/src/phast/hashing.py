"""Keyed 64-bit key hashing (XXH64).

Keys live in a flat byte buffer with an offsets array (see
:class:`phast.keys.KeySet`), so a whole layer is hashed by one compiled
loop. The layer index is used directly as the XXH64 seed.
"""

import numba as nb
import numpy as np

#: Identifier stored in serialized structures.
HASH_ID = 1
HASH_NAME = "xxh64"

_P1 = np.uint64(11400714785074694791)
_P2 = np.uint64(14029467366897019727)
_P3 = np.uint64(1609587929392839161)
_P4 = np.uint64(9650029242287828579)
_P5 = np.uint64(2870177450012600261)


@nb.njit(inline="always")
def _rotl(x, r):
    return (x << np.uint64(r)) | (x >> np.uint64(64 - r))


@nb.njit(inline="always")
def _read64(data, i):
    v = np.uint64(0)
    for j in range(8):
        v |= np.uint64(data[i + j]) << np.uint64(8 * j)
    return v


@nb.njit(inline="always")
def _read32(data, i):
    v = np.uint64(0)
    for j in range(4):
        v |= np.uint64(data[i + j]) << np.uint64(8 * j)
    return v


@nb.njit(inline="always")
def _round(acc, lane):
    acc = acc + lane * _P2
    acc = _rotl(acc, 31)
    return acc * _P1


@nb.njit(inline="always")
def _merge(acc, v):
    acc ^= _round(np.uint64(0), v)
    return acc * _P1 + _P4


@nb.njit(cache=True)
def nb_xxh64(data, start, end, seed):
    seed = np.uint64(seed)
    length = end - start
    i = start
    if length >= 32:
        v1 = seed + _P1 + _P2
        v2 = seed + _P2
        v3 = seed
        v4 = seed - _P1
        limit = end - 32
        while i <= limit:
            v1 = _round(v1, _read64(data, i))
            v2 = _round(v2, _read64(data, i + 8))
            v3 = _round(v3, _read64(data, i + 16))
            v4 = _round(v4, _read64(data, i + 24))
            i += 32
        h = _rotl(v1, 1) + _rotl(v2, 7) + _rotl(v3, 12) + _rotl(v4, 18)
        h = _merge(h, v1)
        h = _merge(h, v2)
        h = _merge(h, v3)
        h = _merge(h, v4)
    else:
        h = seed + _P5
    h += np.uint64(length)
    while i + 8 <= end:
        h ^= _round(np.uint64(0), _read64(data, i))
        h = _rotl(h, 27) * _P1 + _P4
        i += 8
    if i + 4 <= end:
        h ^= _read32(data, i) * _P1
        h = _rotl(h, 23) * _P2 + _P3
        i += 4
    while i < end:
        h ^= np.uint64(data[i]) * _P5
        h = _rotl(h, 11) * _P1
        i += 1
    h ^= h >> np.uint64(33)
    h *= _P2
    h ^= h >> np.uint64(29)
    h *= _P3
    h ^= h >> np.uint64(32)
    return h


@nb.njit(cache=True, nogil=True)
def _hash_all(data, offsets, seed, out):
    for k in range(out.shape[0]):
        out[k] = nb_xxh64(data, offsets[k], offsets[k + 1], seed)


def hash64(key, layer_index=0):
    """Hash one byte string with the function used by layer ``layer_index``."""
    buf = np.frombuffer(bytes(key), dtype=np.uint8)
    return int(nb_xxh64(buf, 0, buf.shape[0], np.uint64(layer_index)))


def hash_keys(keys, layer_index=0):
    """Hash every key of a :class:`~phast.keys.KeySet`; returns ``uint64``."""
    out = np.empty(len(keys), dtype=np.uint64)
    _hash_all(keys.data, keys.offsets, np.uint64(layer_index), out)
    return out
