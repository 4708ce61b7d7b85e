"""Word-level arithmetic shared by construction and queries.

Every function exists twice: a plain-Python version working on arbitrary
precision ints (exact, used by the public API and for readability) and a
``numba`` kernel (prefixed ``nb_``) working on ``uint64`` with wrapping
semantics, used inside the compiled construction and query loops.
"""

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1

#: Multiplier spreading the entropy of small seeds (taken from FxHash).
SEED_MULTIPLIER = 5871781006564002453

MUL, ADD, WRAP = 0, 1, 2
VARIANT_NAMES = {MUL: "mul", ADD: "add", WRAP: "wrap"}


def fmap(x, r):
    """Map ``x`` in [0, 2**64) linearly onto [0, r): ``floor(x * r / 2**64)``."""
    return (x * r) >> 64


def place_mul(s, c, L):
    return (((s * SEED_MULTIPLIER) & MASK64) * c >> 64) & (L - 1)


def place_add(s, c, L):
    return (c & (L - 1)) + s - 1


def place_wrap(s, c, L, delta):
    return (c + delta * s) & (L - 1)


def place(variant, s, c, L, delta=1):
    if variant == MUL:
        return place_mul(s, c, L)
    if variant == ADD:
        return place_add(s, c, L)
    return place_wrap(s, c, L, delta)


def effective_slice(variant, L, S):
    """Number of values a key may reach inside its slice."""
    return L + (1 << S) - 2 if variant == ADD else L


# --------------------------------------------------------------------------
# compiled kernels

_M32 = np.uint64(0xFFFFFFFF)
_U32 = np.uint64(32)


@nb.njit(inline="always")
def nb_mulhi(a, b):
    a = np.uint64(a)
    b = np.uint64(b)
    a_lo = a & _M32
    a_hi = a >> _U32
    b_lo = b & _M32
    b_hi = b >> _U32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _U32) + (p1 & _M32) + (p2 & _M32)
    return p3 + (p1 >> _U32) + (p2 >> _U32) + (mid >> _U32)


@nb.njit(inline="always")
def nb_fmap(x, r):
    return np.int64(nb_mulhi(x, r))


@nb.njit(inline="always")
def nb_place_mul(s, c, L):
    k = np.uint64(s) * np.uint64(SEED_MULTIPLIER)
    return np.int64(nb_mulhi(k, c) & np.uint64(L - 1))


@nb.njit(inline="always")
def nb_place_add(s, c, L):
    return np.int64(np.uint64(c) & np.uint64(L - 1)) + s - 1


@nb.njit(inline="always")
def nb_place_wrap(s, c, L, delta):
    return np.int64((np.uint64(c) + np.uint64(delta * s)) & np.uint64(L - 1))


@nb.njit(inline="always")
def nb_place(variant, s, c, L, delta):
    if variant == 0:
        return nb_place_mul(s, c, L)
    elif variant == 1:
        return nb_place_add(s, c, L)
    return nb_place_wrap(s, c, L, delta)


@nb.njit(cache=True)
def _fmap_array(codes, r, out):
    for i in range(codes.shape[0]):
        out[i] = nb_fmap(codes[i], r)


def fmap_array(codes, r):
    """Vectorised :func:`fmap` over a ``uint64`` array; returns ``int64``."""
    codes = np.ascontiguousarray(codes, dtype=np.uint64)
    out = np.empty(codes.shape[0], dtype=np.int64)
    _fmap_array(codes, np.uint64(r), out)
    return out


@nb.njit(cache=True)
def _place_array(variant, seeds, codes, L, delta, out):
    for i in range(codes.shape[0]):
        out[i] = nb_place(variant, np.int64(seeds[i]), codes[i], L, delta)


def place_array(variant, seeds, codes, L, delta=1):
    codes = np.ascontiguousarray(codes, dtype=np.uint64)
    seeds = np.ascontiguousarray(seeds, dtype=np.int64)
    out = np.empty(codes.shape[0], dtype=np.int64)
    _place_array(variant, seeds, codes, L, delta, out)
    return out
