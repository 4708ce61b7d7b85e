"""Layered (minimal) perfect hash functions built from map-or-bump layers.

Layer ``i`` places the keys bumped by layer ``i - 1``; the last layer bumps
nothing. Values of layer ``i`` are shifted by the total range of the layers
before it, and every value at or above the target range (``n`` when
minimal) is sent through a monotone remap array to a slot left free by the
first layer.
"""

import math
import struct
import zlib
from dataclasses import dataclass

import numba as nb
import numpy as np

from . import remap as remap_mod
from .assign import _seed_dtype, bucket_values
from .bitpack import nb_get, pack, unpack
from .errors import (CorruptStreamError, DuplicateKeysError, HashMismatchError,
                     InvalidConfigError, LayerLimitError, VersionMismatchError)
from .hashing import HASH_ID, hash_keys, nb_xxh64
from .keys import KeySet
from .parallel import parallel_assign, plan_chunks
from .params import (DEFAULT_WINDOW, TERMINAL_THRESHOLD, LayerParams, _variant_code,
                     resolve_params)
from .partition import partition
from .primitives import MUL, fmap_array, nb_fmap, nb_place
from .remap import ELIAS_FANO, nb_ef_access, remap_build

MAGIC = b"PHASTMPH"
FORMAT_VERSION = 1
MAX_LAYERS = 64
TERMINAL_RETRIES = 16

_HEADER = struct.Struct("<8sHHQB")
_LAYER = struct.Struct("<BBBIIQQ")
_REMAP = struct.Struct("<BQQ")
_CRC = struct.Struct("<I")


@dataclass
class Layer:
    params: LayerParams
    seeds: np.ndarray
    n: int = -1  # keys placed or bumped by this layer; unknown after loading

    def packed_seeds(self):
        if self.params.S == 8:
            return np.ascontiguousarray(self.seeds, dtype=np.uint8).tobytes()
        words = pack(self.seeds, self.params.S)
        return words.view(np.uint8)[:_seed_bytes(self.params)].tobytes()


def _seed_bytes(p):
    return (p.B * p.S + 7) // 8


class Mphf:
    """An immutable, queryable layered perfect hash function."""

    def __init__(self, layers, remap, n, hash_id=HASH_ID):
        self.layers = list(layers)
        self.remap = remap
        self.n = n
        self.hash_id = hash_id
        ms = [lay.params.m for lay in self.layers]
        self.layer_offsets = np.concatenate([[0], np.cumsum(ms)]).astype(np.int64)
        self._pack_tables()

    # -- properties -------------------------------------------------------

    @property
    def target(self):
        """Values below this are returned as they are; the query range is [0, target)."""
        return self.remap.universe

    @property
    def minimal(self):
        return self.target == self.n

    @property
    def layer_sizes(self):
        return [lay.n for lay in self.layers]

    def bumped_fraction(self):
        """Fraction of keys bumped by the first layer (needs build-time sizes)."""
        if len(self.layers) < 2:
            return 0.0
        return self.layers[1].n / self.n

    def size_bits(self):
        return 8 * len(self.serialize())

    def bits_per_key(self):
        return self.size_bits() / self.n

    # -- queries ----------------------------------------------------------

    def _pack_tables(self):
        ps = [lay.params for lay in self.layers]
        self._lp = np.array([[p.key, p.B, p.L, p.delta, p.variant, p.R] for p in ps],
                            dtype=np.int64).reshape(-1, 6)
        self._seeds = np.concatenate([np.asarray(lay.seeds, dtype=np.uint16)
                                      for lay in self.layers])
        self._seed_off = np.concatenate([[0], np.cumsum([p.B for p in ps])]).astype(np.int64)
        r = self.remap
        if r.encoding == ELIAS_FANO:
            self._remap_args = (1, r.high, r.low, r.samples, r.low_bits,
                                np.zeros(1, np.uint64), 1)
        else:
            self._remap_args = (2, np.zeros(1, np.uint64), np.zeros(1, np.uint64),
                                np.zeros(1, np.int64), 0, r.words, r.width)

    def query_many(self, keys):
        keys = KeySet.from_iterable(keys)
        out = np.empty(len(keys), dtype=np.int64)
        _query_all(keys.data, keys.offsets, self._lp, self._seeds, self._seed_off,
                   self.layer_offsets, self.target, *self._remap_args, out)
        return out

    def query(self, key):
        if isinstance(key, str):
            key = key.encode()
        buf = np.frombuffer(bytes(key), dtype=np.uint8)
        return int(_query_one(buf, 0, buf.shape[0], self._lp, self._seeds, self._seed_off,
                              self.layer_offsets, self.target, *self._remap_args))

    __call__ = query

    def query_raw(self, key):
        """Value before remapping, i.e. layer offset plus the layer's own value."""
        if isinstance(key, str):
            key = key.encode()
        for i, lay in enumerate(self.layers):
            p = lay.params
            c = int(nb_xxh64(np.frombuffer(bytes(key), dtype=np.uint8), 0, len(key),
                             np.uint64(p.key)))
            s = int(lay.seeds[(c * p.B) >> 64])
            if s:
                from .primitives import fmap, place
                return int(self.layer_offsets[i]) + fmap(c, p.R) + place(p.variant, s, c,
                                                                         p.L, p.delta)
        raise KeyError(key)

    # -- serialization ----------------------------------------------------

    def serialize(self):
        parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, self.hash_id, self.n, len(self.layers))]
        for lay in self.layers:
            p = lay.params
            parts.append(_LAYER.pack(p.S, p.variant, p.delta, p.key, p.L, p.B, p.m))
            parts.append(lay.packed_seeds())
        r = self.remap
        parts.append(_REMAP.pack(r.encoding, r.count, r.universe))
        parts.append(r.payload())
        body = b"".join(parts)
        return body + _CRC.pack(zlib.crc32(body))

    @classmethod
    def deserialize(cls, data):
        data = bytes(data)
        if len(data) < _HEADER.size + _CRC.size:
            raise CorruptStreamError("stream truncated")
        magic, version, hash_id, n, nlayers = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise CorruptStreamError("bad magic")
        if version != FORMAT_VERSION:
            raise VersionMismatchError(f"format version {version}, expected {FORMAT_VERSION}")
        if hash_id != HASH_ID:
            raise HashMismatchError(f"hash id {hash_id}, this build uses {HASH_ID}")
        body, (crc,) = data[:-_CRC.size], _CRC.unpack_from(data, len(data) - _CRC.size)
        if zlib.crc32(body) != crc:
            raise CorruptStreamError("checksum mismatch")
        if not 1 <= nlayers <= MAX_LAYERS or n < 1:
            raise CorruptStreamError("invalid header")
        pos = _HEADER.size
        layers = []
        for _ in range(nlayers):
            S, variant, delta, key, L, B, m = remap_mod._unpack(_LAYER.format, body, pos)
            pos += _LAYER.size
            try:
                p = LayerParams(S=S, L=L, B=B, m=m, variant=variant, delta=delta,
                                W=DEFAULT_WINDOW, key=key).validate()
            except InvalidConfigError as e:
                raise CorruptStreamError(f"invalid layer parameters: {e}") from None
            nbytes = _seed_bytes(p)
            if pos + nbytes > len(body):
                raise CorruptStreamError("stream truncated")
            raw = body[pos:pos + nbytes]
            pos += nbytes
            if S == 8:
                seeds = np.frombuffer(raw, dtype=np.uint8).copy()
            else:
                buf = np.zeros(((nbytes + 7) // 8) * 8, dtype=np.uint8)
                buf[:nbytes] = np.frombuffer(raw, dtype=np.uint8)
                seeds = unpack(buf.view(np.uint64), S, B).astype(_seed_dtype(S))
            layers.append(Layer(p, seeds))
        enc, count, universe = remap_mod._unpack(_REMAP.format, body, pos)
        pos += _REMAP.size
        r, pos = remap_mod.read_remap(enc, count, universe, body, pos)
        total = sum(lay.params.m for lay in layers)
        if pos != len(body) or universe < n or universe > layers[0].params.m \
                or count != total - universe:
            raise CorruptStreamError("inconsistent structure")
        return cls(layers, r, n, hash_id)

    def save(self, path):
        with open(path, "wb") as f:
            f.write(self.serialize())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            return cls.deserialize(f.read())


# --------------------------------------------------------------------------
# compiled query


@nb.njit(inline="always")
def _remap(j, enc, high, low, samples, low_bits, words, width):
    if enc == 1:
        return nb_ef_access(high, low, samples, low_bits, j)
    return nb_get(words, j, width)


@nb.njit(inline="always")
def _raw_value(data, a, b, lp, seeds, seed_off, voff):
    """Layer offset plus in-layer value of the key ``data[a:b]``."""
    nl = lp.shape[0]
    v = np.int64(0)
    for i in range(nl):
        c = nb_xxh64(data, a, b, np.uint64(lp[i, 0]))
        s = np.int64(seeds[seed_off[i] + nb_fmap(c, np.uint64(lp[i, 1]))])
        if s != 0 or i == nl - 1:
            v = voff[i] + nb_fmap(c, np.uint64(lp[i, 5])) + nb_place(
                lp[i, 4], max(s, 1), c, lp[i, 2], lp[i, 3])
            break
    return v


@nb.njit(cache=True, nogil=True)
def _query_one(data, a, b, lp, seeds, seed_off, voff, target, enc, high, low, samples,
               low_bits, words, width):
    v = _raw_value(data, a, b, lp, seeds, seed_off, voff)
    if v < target:
        return v
    return _remap(v - target, enc, high, low, samples, low_bits, words, width)


@nb.njit(cache=True, nogil=True)
def _query_all(data, offsets, lp, seeds, seed_off, voff, target, enc, high, low, samples,
               low_bits, words, width, out):
    # The layer loop is spelled out here rather than calling _raw_value: numba
    # compiles the inlined form roughly 2x slower. Remapping runs as a second
    # pass to keep this loop small.
    nl = lp.shape[0]
    for k in range(out.shape[0]):
        v = np.int64(0)
        for i in range(nl):
            c = nb_xxh64(data, offsets[k], offsets[k + 1], np.uint64(lp[i, 0]))
            s = np.int64(seeds[seed_off[i] + nb_fmap(c, np.uint64(lp[i, 1]))])
            if s != 0 or i == nl - 1:
                v = voff[i] + nb_fmap(c, np.uint64(lp[i, 5])) + nb_place(
                    lp[i, 4], max(s, 1), c, lp[i, 2], lp[i, 3])
                break
        out[k] = v
    for k in range(out.shape[0]):
        if out[k] >= target:
            out[k] = _remap(out[k] - target, enc, high, low, samples, low_bits, words, width)


# --------------------------------------------------------------------------
# construction

@dataclass
class _Built:
    params: LayerParams
    seeds: np.ndarray
    values: np.ndarray  # output values of placed keys (layer-local)
    bumped: np.ndarray  # indices (into the layer's keys) of bumped keys


def build_layer(keys, params, threads=1):
    """Build one map-or-bump layer over ``keys``."""
    codes = hash_keys(keys, params.key)
    buckets = partition(codes, params.B)
    plan = plan_chunks(params.B, threads, params)
    res = parallel_assign(buckets, plan, params)
    values = np.empty(len(keys), dtype=np.int64)
    nv = bucket_values(buckets.codes, buckets.bucket_bounds, 0, params.B, res.seeds,
                       params.variant, params.L, params.delta, params.R, values)
    bumped = np.flatnonzero(res.seeds[fmap_array(codes, params.B)] == 0)
    return _Built(params, res.seeds, values[:nv], bumped)


def _has_duplicates(keys):
    return len(set(keys)) != len(keys)


def _terminal_layer(keys, key_index, threads):
    """Layer that bumps nothing: range 1.2n, grown by 25% after every failed attempt."""
    n = len(keys)
    for attempt in range(TERMINAL_RETRIES):
        m = max(n, math.ceil(1.2 * n * 1.25 ** attempt))
        p = resolve_params(n, MUL, S=8, lam=4.0, m=m, key=key_index + attempt)
        built = build_layer(keys, p, threads)
        if len(built.bumped) == 0:
            return built
        if attempt == 1 and _has_duplicates(keys):
            raise DuplicateKeysError("key set contains duplicate keys")
    if _has_duplicates(keys):
        raise DuplicateKeysError("key set contains duplicate keys")
    raise LayerLimitError(f"terminal layer failed {TERMINAL_RETRIES} times")


def _remap_values(first_values, later, target, total):
    """Remap entries for values ``target .. total - 1``.

    Used overflow values get the free first-layer slots in order; unused ones
    repeat the next free slot so the sequence stays non-decreasing.
    """
    used_low = np.zeros(target, dtype=bool)
    low = first_values[first_values < target]
    used_low[low] = True
    free = np.flatnonzero(~used_low)
    used_hi = np.zeros(total - target, dtype=bool)
    used_hi[first_values[first_values >= target] - target] = True
    for off, vals in later:
        used_hi[off + vals - target] = True
    if len(free) == 0:
        return np.zeros(total - target, dtype=np.int64)
    rank = np.cumsum(used_hi) - used_hi
    return free[np.minimum(rank, len(free) - 1)]


def build(keys, variant=MUL, S=8, lam=None, L=None, delta=1, m=None, minimal=True,
          remap=ELIAS_FANO, threads=1, W=DEFAULT_WINDOW):
    """Build a perfect hash function over distinct byte-string ``keys``.

    ``m`` (default ``n``) is the first layer's range. With ``minimal`` the
    result maps onto ``0 .. n-1``; otherwise onto ``0 .. m-1``.
    """
    keys = KeySet.from_iterable(keys)
    n = len(keys)
    if n == 0:
        raise InvalidConfigError("cannot build over an empty key set")
    variant = _variant_code(variant)
    m1 = n if m is None else int(m)
    if m1 < n:
        raise InvalidConfigError(f"m={m1} smaller than n={n}")
    target = n if minimal else m1

    built = []
    current = keys
    key_index = 0
    force_terminal = False
    while True:
        ni = len(current)
        if len(built) >= MAX_LAYERS:
            raise LayerLimitError(f"more than {MAX_LAYERS} layers needed")
        first = not built
        if force_terminal or ni < TERMINAL_THRESHOLD[variant] or len(built) == MAX_LAYERS - 1:
            # a first terminal layer may use a wider range than m; the remap
            # folds the excess back below the target
            layer = _terminal_layer(current, key_index, threads)
        else:
            mi = m1 if first else ni
            Li = L
            if Li is not None and not first:
                Li = L if L + (2 ** S - 2) * (variant == 1) <= mi else None
            p = resolve_params(ni, variant, S=S, lam=lam, L=Li, m=mi, delta=delta, W=W,
                               key=key_index)
            layer = build_layer(current, p, threads)
        key_index = layer.params.key + 1
        layer_n = ni
        built.append((layer, layer_n))
        if len(layer.bumped) == 0:
            break
        force_terminal = len(layer.bumped) == ni
        current = current.take(layer.bumped)

    layers = [Layer(b.params, b.seeds, ni) for b, ni in built]
    offsets = np.concatenate([[0], np.cumsum([b.params.m for b, _ in built])])
    total = int(offsets[-1])
    later = [(int(offsets[i]), b.values) for i, (b, _) in enumerate(built) if i > 0]
    values = _remap_values(built[0][0].values, later, target, total)
    return Mphf(layers, remap_build(values, target, remap), n)


def verify(mphf, keys):
    """True iff ``mphf`` maps ``keys`` injectively into its target range."""
    v = mphf.query_many(keys)
    if len(v) and (v.min() < 0 or v.max() >= mphf.target):
        return False
    seen = np.zeros(mphf.target, dtype=bool)
    seen[v] = True
    return int(seen.sum()) == len(v)
