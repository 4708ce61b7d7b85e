"""Key containers, key-file formats and synthetic key generation."""

import struct
from pathlib import Path

import numba as nb
import numpy as np

from .errors import PhastError


class KeySet:
    """An immutable sequence of byte-string keys stored contiguously.

    ``data`` holds all key bytes back to back and key ``i`` occupies
    ``data[offsets[i]:offsets[i + 1]]``.
    """

    __slots__ = ("data", "offsets")

    def __init__(self, data, offsets):
        self.data = np.ascontiguousarray(data, dtype=np.uint8)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)

    @classmethod
    def from_iterable(cls, keys):
        if isinstance(keys, KeySet):
            return keys
        keys = [k.encode() if isinstance(k, str) else bytes(k) for k in keys]
        offsets = np.zeros(len(keys) + 1, dtype=np.int64)
        if keys:
            np.cumsum([len(k) for k in keys], out=offsets[1:])
        data = np.frombuffer(b"".join(keys), dtype=np.uint8)
        return cls(data, offsets)

    @classmethod
    def from_u64(cls, values):
        """Keys are the 8-byte little-endian encodings of ``values``."""
        values = np.ascontiguousarray(values, dtype="<u8")
        return cls(values.view(np.uint8), np.arange(len(values) + 1, dtype=np.int64) * 8)

    def __len__(self):
        return self.offsets.shape[0] - 1

    def __getitem__(self, i):
        if i < 0:
            i += len(self)
        return self.data[self.offsets[i]:self.offsets[i + 1]].tobytes()

    def __iter__(self):
        raw = self.data.tobytes()
        off = self.offsets.tolist()
        for a, b in zip(off, off[1:]):
            yield raw[a:b]

    def take(self, indices):
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        lengths = self.offsets[indices + 1] - self.offsets[indices]
        offsets = np.zeros(len(indices) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        data = np.empty(offsets[-1], dtype=np.uint8)
        _gather(self.data, self.offsets, indices, offsets, data)
        return KeySet(data, offsets)


@nb.njit(cache=True)
def _gather(src, src_off, indices, dst_off, dst):
    for j in range(indices.shape[0]):
        a = src_off[indices[j]]
        d = dst_off[j]
        for t in range(dst_off[j + 1] - d):
            dst[d + t] = src[a + t]


# --------------------------------------------------------------------------
# key files

def read_keys(path, fmt="text"):
    """Read a key file: newline-delimited (``text``) or u32-length-prefixed (``binary``)."""
    raw = Path(path).read_bytes()
    if fmt == "text":
        keys = raw.split(b"\n")
        if keys and keys[-1] == b"":
            keys.pop()
        return KeySet.from_iterable(k[:-1] if k.endswith(b"\r") else k for k in keys)
    if fmt != "binary":
        raise ValueError(f"unknown key format {fmt!r}")
    keys = []
    pos = 0
    while pos < len(raw):
        if pos + 4 > len(raw):
            raise PhastError("truncated length prefix in binary key file")
        (size,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        if pos + size > len(raw):
            raise PhastError("truncated key in binary key file")
        keys.append(raw[pos:pos + size])
        pos += size
    return KeySet.from_iterable(keys)


def write_keys(keys, path, fmt="text"):
    with open(path, "wb") as f:
        for k in keys:
            if fmt == "text":
                if b"\n" in k:
                    raise ValueError("text key files cannot hold keys containing newlines")
                f.write(k + b"\n")
            else:
                f.write(struct.pack("<I", len(k)) + k)


# --------------------------------------------------------------------------
# synthetic keys

def _fingerprints(keys):
    from .hashing import hash_keys
    return hash_keys(keys, 0x5EED_0001), hash_keys(keys, 0x5EED_0002)


def _duplicate_positions(keys):
    """Indices of keys equal to an earlier key."""
    a, b = _fingerprints(keys)
    fp = np.empty(len(keys), dtype=[("a", "<u8"), ("b", "<u8")])
    fp["a"], fp["b"] = a, b
    _, inverse, counts = np.unique(fp, return_inverse=True, return_counts=True)
    if len(counts) == len(keys):
        return np.empty(0, dtype=np.int64)
    # fingerprint matches are confirmed byte-wise
    seen = set()
    dups = []
    for i in np.flatnonzero(counts[inverse] > 1).tolist():
        k = keys[i]
        if k in seen:
            dups.append(i)
        else:
            seen.add(k)
    return np.array(dups, dtype=np.int64)


def random_strings(n, rng_seed=0, min_len=10, max_len=50):
    """``n`` distinct random printable strings of uniformly random length."""
    rng = np.random.default_rng(rng_seed)
    lengths = rng.integers(min_len, max_len + 1, size=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    data = rng.integers(33, 127, size=offsets[-1], dtype=np.uint8)
    keys = KeySet(data, offsets)
    while True:
        dups = _duplicate_positions(keys)
        if len(dups) == 0:
            return keys
        for i in dups.tolist():
            a, b = offsets[i], offsets[i + 1]
            data[a:b] = rng.integers(33, 127, size=b - a, dtype=np.uint8)


def random_u64(n, rng_seed=0):
    """``n`` distinct random 64-bit integers (sampled without replacement)."""
    rng = np.random.default_rng(rng_seed)
    values = rng.integers(0, 2**64, size=n, dtype=np.uint64, endpoint=False)
    while True:
        _, first = np.unique(values, return_index=True)
        if len(first) == n:
            return values
        redo = np.ones(n, dtype=bool)
        redo[first] = False
        values[redo] = rng.integers(0, 2**64, size=int(redo.sum()), dtype=np.uint64)


def keygen(kind, n, rng_seed=0):
    """Reproducible synthetic key set: ``random-strings-10-50`` or ``u64-integers``."""
    if kind == "random-strings-10-50":
        return random_strings(n, rng_seed)
    if kind == "u64-integers":
        return KeySet.from_u64(random_u64(n, rng_seed))
    raise ValueError(f"unknown key kind {kind!r}")
