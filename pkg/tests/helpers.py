"""Randomized seed-search instances and a naive all-seeds oracle."""

import numpy as np

import reference as ref
from phast.assign import CyclicBitmap
from phast.params import LayerParams
from phast.primitives import ADD, WRAP


def _fmap(codes, r):
    return np.array([ref.fmap(c, r) for c in codes.tolist()], dtype=np.int64)


def naive_seed(codes, used, variant, S, L, delta, R):
    """All seeds at once: feasible seed with the smallest placement sum, smallest on ties."""
    s = np.arange(1, 1 << S, dtype=np.int64)[:, None]
    low = (codes & np.uint64(L - 1)).astype(np.int64)[None, :]
    if variant == ADD:
        pos = low + s - 1
    elif variant == WRAP:
        pos = (low + delta * s) & (L - 1)
    else:
        pos = np.array([[ref.p_mul(int(si), c, L) for c in codes.tolist()] for si in s[:, 0]],
                       dtype=np.int64).reshape(len(s), len(codes))
    vals = _fmap(codes, R)[None, :] + pos
    ok = ~used[vals].any(axis=1)
    srt = np.sort(vals, axis=1)
    ok &= (np.diff(srt, axis=1) != 0).all(axis=1)
    if not ok.any():
        return 0
    sums = np.where(ok, pos.sum(axis=1), np.iinfo(np.int64).max)
    return int(np.argmin(sums)) + 1


def random_instance(rng, variant, delta=1):
    S = int(rng.choice([4, 5, 8, 11]))
    L = 1 << int(rng.integers(2, 11))
    k = int(rng.integers(1, 9))
    L_eff = L + (2**S - 2 if variant == ADD else 0)
    m = L_eff + int(rng.integers(0, 3000))
    p = LayerParams(S=S, L=L, B=1, m=m, variant=variant, delta=delta).validate()
    codes = rng.integers(0, 2**64, size=k, dtype=np.uint64)
    if rng.random() < 0.1 and k > 1:
        codes[1] = codes[0]
    if rng.random() < 0.2:
        # codes at the top of their slice to force wrap boundaries
        codes |= np.uint64(L - 1)
    cap = max(128, 1 << (m - 1).bit_length())
    density = rng.choice([0.0, 0.3, 0.7, 0.95, 0.995])
    used = rng.random(cap) < density
    bm = CyclicBitmap(cap)
    bm.words[:] = np.packbits(used, bitorder="little").view(np.uint64)
    return codes, used, bm, p
