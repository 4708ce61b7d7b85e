"""
Space against bucket size
=========================

lambda is the expected number of keys per bucket. Bigger buckets mean
fewer seeds to store but more keys per seed to place, so more buckets get
bumped. The total size is U-shaped in lambda.
"""

import numpy as np

import phast
from phast.keys import random_strings

keys = random_strings(200_000, rng_seed=2)

lams = np.arange(4.0, 6.51, 0.25)
sizes = []
for lam in lams:
    f = phast.build(keys, variant="add", S=8, lam=lam)
    sizes.append(f.bits_per_key())
    print(f"lambda={lam:4.2f}  {sizes[-1]:.4f} bits/key  bumped {f.bumped_fraction():6.2%}")

best = lams[int(np.argmin(sizes))]
print("smallest at lambda =", best)

# the multiplicative placement searches all seeds for the best one, so it
# packs keys more tightly than the additive one at the same lambda
for variant in ("mul", "add", "wrap"):
    f = phast.build(keys, variant=variant, S=8, lam=5.0)
    print(f"{variant:5s} {f.bits_per_key():.4f} bits/key")
