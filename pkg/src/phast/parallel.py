"""Multithreaded seed assignment over gap-separated chunks of buckets.

Chunks are seeded independently. The gap between two chunks is wide enough
that no value reachable from one chunk is reachable from the other, so
workers share nothing. Gap buckets are seeded afterwards against the values
already taken by their neighbours.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assign import AssignResult, _seed_dtype, bucket_values, bumped_codes, run_assign

THREADS_ENV = "PHAST_THREADS"


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def gap_width(params):
    """Buckets per gap: ``ceil(L_eff * B / (m - L_eff + 1))``."""
    return -(-params.L_eff * params.B // params.R)


@dataclass(frozen=True)
class ChunkPlan:
    chunks: list
    gaps: list = field(default_factory=list)

    @property
    def t(self):
        return len(self.chunks)

    def ranges(self):
        """All chunk and gap ranges in bucket order."""
        out = []
        for i, c in enumerate(self.chunks):
            out.append(c)
            if i < len(self.gaps):
                out.append(self.gaps[i])
        return out


def plan_chunks(B, t_requested, params):
    """Split ``[0, B)`` into at most ``t_requested`` chunks separated by gaps.

    Fewer chunks are used when chunks would not be at least 64 gaps wide.
    """
    if B < 1 or t_requested < 1:
        raise ValueError("B and t must be positive")
    g = gap_width(params)
    t = min(t_requested, max(1, B // (64 * g)))
    if t == 1:
        return ChunkPlan([(0, B)])
    q, r = divmod(B - (t - 1) * g, t)
    chunks, gaps = [], []
    a = 0
    for i in range(t):
        b = a + q + (i < r)
        chunks.append((a, b))
        if i < t - 1:
            gaps.append((b, b + g))
        a = b + g
    return ChunkPlan(chunks, gaps)


def _neighbour_values(buckets, seeds, params, ranges):
    codes, bounds = buckets.codes, buckets.bucket_bounds
    total = sum(bounds[b] - bounds[a] for a, b in ranges)
    out = np.empty(total, dtype=np.int64)
    n = 0
    for a, b in ranges:
        n += bucket_values(codes, bounds, a, b, seeds, params.variant, params.L,
                           params.delta, params.R, out[n:])
    return np.sort(out[:n])


def parallel_assign(buckets, plan, params, executor=None):
    """Seed all buckets following ``plan``; same result shape as :func:`assign_seeds`."""
    seeds = np.zeros(buckets.B, dtype=_seed_dtype(params.S))
    stats = np.zeros((plan.t + len(plan.gaps), 4), dtype=np.int64)
    if plan.t == 1:
        run_assign(buckets, params, seeds, 0, buckets.B, stats=stats[0])
        return AssignResult(seeds, bumped_codes(buckets, seeds), stats.sum(axis=0))

    own = executor is None
    ex = ThreadPoolExecutor(plan.t) if own else executor
    try:
        jobs = [ex.submit(run_assign, buckets, params, seeds, a, b, None, stats[i])
                for i, (a, b) in enumerate(plan.chunks)]
        for j in jobs:
            j.result()
        g = gap_width(params)
        jobs = []
        for i, (a, b) in enumerate(plan.gaps):
            left = (max(plan.chunks[i][0], a - g), a)
            right = (b, min(plan.chunks[i + 1][1], b + g))
            presets = _neighbour_values(buckets, seeds, params, [left, right])
            jobs.append(ex.submit(run_assign, buckets, params, seeds, a, b, presets,
                                  stats[plan.t + i]))
        for j in jobs:
            j.result()
    finally:
        if own:
            ex.shutdown()
    return AssignResult(seeds, bumped_codes(buckets, seeds), stats.sum(axis=0))
