"""
Building and querying a minimal perfect hash function
=====================================================

A hundred thousand random strings go in; every one of them comes out as a
distinct number below 100000.
"""

import numpy as np

import phast
from phast.keys import random_strings

keys = random_strings(100_000, rng_seed=1)
keys[0], keys[1]

# default configuration: multiplicative placement, 8-bit seeds
f = phast.build(keys)
values = f.query_many(keys)
values[:10]

# a bijection onto 0..n-1
np.array_equal(np.sort(values), np.arange(len(keys)))

# single lookups take bytes or str
f.query(keys[42]) == values[42]

# the structure is small: a little under two bits per key
f.bits_per_key()

# a few percent of the keys were bumped to later layers (about 1.5% at n = 10**6)
f.layer_sizes, f.bumped_fraction()

# persisted structures answer the same way
data = f.serialize()
g = phast.Mphf.deserialize(data)
np.array_equal(g.query_many(keys), values)
print(f"{len(keys)} keys, {f.bits_per_key():.3f} bits/key, layers {f.layer_sizes}")
