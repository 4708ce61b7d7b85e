import numpy as np
import pytest

import reference as ref
from phast import build
from phast.assign import assign_seeds
from phast.params import LayerParams, resolve_params
from phast.parallel import gap_width, parallel_assign, plan_chunks
from phast.partition import bucket_count, partition
from phast.primitives import ADD, MUL, WRAP


def test_gap_width_example():
    n = 5 * 10**7
    p = LayerParams(S=8, L=1024, B=bucket_count(n, 4.5), m=n)
    assert p.B == 11_111_111
    assert gap_width(p) == -(-1024 * p.B // (n - 1023)) == 228


def test_single_chunk():
    p = resolve_params(10**6)
    plan = plan_chunks(p.B, 1, p)
    assert plan.chunks == [(0, p.B)] and plan.gaps == []


def test_tiny_input_clamped():
    p = resolve_params(1000)
    assert plan_chunks(p.B, 12, p).t == 1


@pytest.mark.parametrize("t", [2, 3, 4, 7])
def test_plan_covers_buckets(t):
    p = resolve_params(10**6)
    plan = plan_chunks(p.B, t, p)
    assert plan.t == t
    ranges = plan.ranges()
    assert ranges[0][0] == 0 and ranges[-1][1] == p.B
    assert all(a[1] == b[0] for a, b in zip(ranges, ranges[1:]))
    g = gap_width(p)
    assert all(b - a == g for a, b in plan.gaps)


def _setup(variant, n=10**6, seed=0):
    rng = np.random.default_rng(seed)
    p = resolve_params(n, variant, S=8)
    return partition(rng.integers(0, 2**64, size=n, dtype=np.uint64), p.B), p


@pytest.mark.parametrize("variant", [MUL, ADD, WRAP])
def test_t1_identical_to_sequential(variant):
    buckets, p = _setup(variant, 200_000)
    a = assign_seeds(buckets, p)
    b = parallel_assign(buckets, plan_chunks(p.B, 1, p), p)
    assert a.seeds.tobytes() == b.seeds.tobytes()


def _values_by_range(buckets, seeds, p, ranges):
    out = []
    for a, b in ranges:
        lo, hi = buckets.bucket_bounds[a], buckets.bucket_bounds[b]
        codes = buckets.codes[lo:hi]
        s = np.repeat(seeds[a:b].astype(np.int64), np.diff(buckets.bucket_bounds[a:b + 1]))
        keep = s != 0
        codes, s = codes[keep], s[keep]
        low = (codes & np.uint64(p.L - 1)).astype(np.int64)
        if p.variant == ADD:
            pos = low + s - 1
        elif p.variant == WRAP:
            pos = (low + p.delta * s) & (p.L - 1)
        else:
            pos = np.array([ref.p_mul(int(x), int(c), p.L) for x, c in zip(s, codes)], dtype=np.int64)
        starts = np.array([ref.fmap(int(c), p.R) for c in codes], dtype=np.int64)
        out.append(starts + pos)
    return out


@pytest.mark.parametrize("variant", [MUL, ADD, WRAP])
def test_t4_valid_and_close(variant):
    buckets, p = _setup(variant)
    plan = plan_chunks(p.B, 4, p)
    assert plan.t == 4
    par = parallel_assign(buckets, plan, p)
    seq = assign_seeds(buckets, p)
    per_range = _values_by_range(buckets, par.seeds, p, plan.ranges())
    vals = np.concatenate(per_range)
    assert len(np.unique(vals)) == len(vals)
    assert vals.min() >= 0 and vals.max() < p.m
    # chunk isolation: the value ranges of distinct chunks never meet
    chunk_vals = per_range[::2]
    for x, y in zip(chunk_vals, chunk_vals[1:]):
        assert x.max() < y.min()
    assert abs(len(par.bumped) - len(seq.bumped)) < 0.01 * len(vals)


def test_deterministic_across_runs():
    buckets, p = _setup(MUL, 300_000, 5)
    plan = plan_chunks(p.B, 3, p)
    a = parallel_assign(buckets, plan, p)
    b = parallel_assign(buckets, plan, p)
    assert a.seeds.tobytes() == b.seeds.tobytes()


@pytest.mark.parametrize("t", [2, 4])
def test_parallel_build_bijective(strings_1m, t):
    f = build(strings_1m, threads=t)
    v = f.query_many(strings_1m)
    seen = np.zeros(len(strings_1m), dtype=bool)
    seen[v] = True
    assert seen.all()
    assert build(strings_1m, threads=t).serialize() == f.serialize()


def test_threads_one_byte_identical(strings_10k):
    assert build(strings_10k, threads=1).serialize() == build(strings_10k).serialize()
