"""Grouping hash codes into buckets.

The bucket index of a code is ``fmap(code, B)``, which is monotone in the
code, so sorting codes numerically already groups them by bucket.
"""

from dataclasses import dataclass

import numba as nb
import numpy as np

from .primitives import nb_fmap


@dataclass(frozen=True)
class BucketedCodes:
    codes: np.ndarray          # uint64, sorted, grouped by bucket
    bucket_bounds: np.ndarray  # int64, length B + 1

    @property
    def B(self):
        return self.bucket_bounds.shape[0] - 1

    def bucket(self, i):
        return self.codes[self.bucket_bounds[i]:self.bucket_bounds[i + 1]]

    def sizes(self):
        return np.diff(self.bucket_bounds)


def bucket_count(n, lam):
    """Number of buckets for ``n`` keys with expected bucket size ``lam`` (half rounds up)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return max(1, int(np.floor(n / lam + 0.5)))


@nb.njit(cache=True, nogil=True)
def _bounds(sorted_codes, B, bounds):
    b = 0
    bounds[0] = 0
    for i in range(sorted_codes.shape[0]):
        k = nb_fmap(sorted_codes[i], B)
        while b < k:
            b += 1
            bounds[b] = i
    n = sorted_codes.shape[0]
    while b < B:
        b += 1
        bounds[b] = n


def partition(codes, B):
    """Sort ``codes`` and return them with the offsets delimiting each of ``B`` buckets.

    Duplicates are kept.
    """
    if B < 1:
        raise ValueError("B must be positive")
    codes = np.sort(np.asarray(codes, dtype=np.uint64), kind="stable")
    bounds = np.empty(B + 1, dtype=np.int64)
    _bounds(codes, np.uint64(B), bounds)
    return BucketedCodes(codes, bounds)
