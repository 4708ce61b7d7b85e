"""
Building with several threads
=============================

Buckets are cut into chunks separated by short gaps. Keys of different
chunks can never reach the same output value, so chunks are seeded
independently; the gaps are filled in afterwards.
"""

import time

import numpy as np

import phast
from phast.parallel import gap_width, plan_chunks
from phast.params import resolve_params
from phast.keys import random_strings

keys = random_strings(1_000_000, rng_seed=3)
p = resolve_params(len(keys))
gap_width(p)                      # buckets per gap
plan_chunks(p.B, 4, p).ranges()   # chunk, gap, chunk, gap, ...

# tiny inputs are not split at all
plan_chunks(resolve_params(1000).B, 12, resolve_params(1000)).t

for t in (1, 2, 4):
    t0 = time.perf_counter()
    f = phast.build(keys, threads=t)
    dt = time.perf_counter() - t0
    ok = np.array_equal(np.sort(f.query_many(keys)), np.arange(len(keys)))
    print(f"threads={t}  {dt:5.2f}s  {f.bits_per_key():.4f} bits/key  bijective={ok}")
