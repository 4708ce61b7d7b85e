"""
Looking inside one bucket
=========================

A bucket's seed decides where each of its keys lands inside the key's
slice. With additive placement, moving to the next seed moves every key one
slot to the right, so 64 seeds can be tested at once by OR-ing one 64-bit
word of the occupancy bitmap per key.
"""

import numpy as np

from phast import CyclicBitmap, find_first_seed_add, place_add
from phast.params import LayerParams
from phast.primitives import ADD, fmap

p = LayerParams(S=8, L=512, B=1, m=4096, variant=ADD).validate()
codes = np.array([0x1234_5678_9ABC_DEF0, 0x0FED_CBA9_8765_4321, 0xAAAA_5555_AAAA_5555],
                 dtype=np.uint64)

# where seed 1 would put the keys
starts = [fmap(int(c), p.R) for c in codes]
first = [s + place_add(1, int(c), p.L) for s, c in zip(starts, codes)]
first

bm = CyclicBitmap(8192)
find_first_seed_add(codes, bm, p)       # nothing taken: seed 1

# block the first 40 seeds for the third key
for d in range(40):
    bm.set(first[2] + d)
find_first_seed_add(codes, bm, p)       # first seed with all three slots free: 41

# a duplicated code collides with itself for every seed: the bucket is bumped
find_first_seed_add(np.array([7, 7], dtype=np.uint64), CyclicBitmap(8192), p)
print("done")
