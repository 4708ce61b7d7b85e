"""Slow pure-Python reference implementations used as test oracles."""

import heapq

M64 = (1 << 64) - 1
K = 5871781006564002453


def fmap(x, r):
    return (x * r) >> 64


def p_mul(s, c, L):
    return ((((s * K) & M64) * c) >> 64) % L


def p_add(s, c, L):
    return c % L + s - 1


def p_wrap(s, c, L, delta):
    return (c + delta * s) % L


def place(variant, s, c, L, delta):
    return (p_mul, p_add, lambda s, c, L: p_wrap(s, c, L, delta))[variant](s, c, L)


def best_seed(codes, used, variant, S, L, delta, R):
    """Naive scan of all seeds: feasible seed minimising the sum of placements.

    ``used`` is a set of taken output values. Ties go to the smallest seed.
    """
    best, best_sum = 0, None
    for s in range(1, 1 << S):
        ps = [place(variant, s, c, L, delta) for c in codes]
        vals = [fmap(c, R) + p for c, p in zip(codes, ps)]
        if len(set(vals)) != len(vals) or any(v in used for v in vals):
            continue
        total = sum(ps)
        if best_sum is None or total < best_sum:
            best, best_sum = s, total
    return best


def ell(values, size):
    if size <= 7:
        return values[size - 1]
    return values[6] + (size - 7) * (values[6] - values[5])


def assign(codes_sorted, bounds, p, ell_values, used=None):
    """Window algorithm with a plain set of used values."""
    B = len(bounds) - 1
    used = set() if used is None else set(used)
    seeds = [None] * B
    for b in range(B):
        if bounds[b + 1] == bounds[b]:
            seeds[b] = 1
    heap = []
    first = 0
    while first < B and seeds[first] is not None:
        first += 1
    pushed = first

    def extend():
        nonlocal pushed
        while pushed < min(first + p.W, B):
            if seeds[pushed] is None:
                size = bounds[pushed + 1] - bounds[pushed]
                heapq.heappush(heap, (-(ell(ell_values, size) - 1024 * pushed), pushed))
            pushed += 1

    extend()
    while heap:
        _, b = heapq.heappop(heap)
        codes = [int(c) for c in codes_sorted[bounds[b]:bounds[b + 1]]]
        s = best_seed(codes, used, p.variant, p.S, p.L, p.delta, p.R)
        seeds[b] = s
        if s:
            for c in codes:
                used.add(fmap(c, p.R) + place(p.variant, s, c, p.L, p.delta))
        if b == first:
            while first < B and seeds[first] is not None:
                first += 1
            extend()
    return seeds
