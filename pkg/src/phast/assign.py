"""Map-or-bump seed assignment.

Buckets are seeded from a sliding window of ``W`` consecutive buckets,
highest priority first. Used output values are tracked in a cyclic bitmap
that only covers the values reachable from the window. A bucket whose keys
cannot all be placed without collision receives seed 0 (bumped).
"""

from dataclasses import dataclass

import numba as nb
import numpy as np

from .primitives import ADD, MUL, WRAP, nb_fmap, nb_place_mul

_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
_U1 = np.uint64(1)
_U63 = np.uint64(63)
_U6 = np.uint64(6)

# ---------------------------------------------------------------------------
# bucket priority

_ELL_S5 = (-125171, 31908, 74770, 100065, 115115, 126729, 164878)
_ELL_S8 = (-50171, 59462, 109868, 141865, 163564, 181092, 192852)
_ELL_S11 = (-63000, 69496, 123197, 147274, 164471, 179677, 184910)


@dataclass(frozen=True)
class EllTable:
    """Size-dependent part of bucket priority for bucket sizes 1..7, linear beyond."""

    values: tuple

    def __call__(self, size):
        v = self.values
        if size <= 7:
            return v[size - 1]
        return v[6] + (size - 7) * (v[6] - v[5])

    def as_array(self):
        return np.array((0,) + tuple(self.values), dtype=np.int64)


def _linear_ramp(curve):
    first, second, last = curve[0], curve[1], curve[6]
    return (first,) + tuple(second + (last - second) * i // 5 for i in range(6))


def ell_table(S):
    if S == 5:
        return EllTable(_ELL_S5)
    if S == 8:
        return EllTable(_ELL_S8)
    if S >= 11:
        return EllTable(_ELL_S11)
    return EllTable(_linear_ramp(_ELL_S5 if S < 6 else _ELL_S8))


def priority(bucket_size, bucket_index, ell):
    return ell(bucket_size) - 1024 * bucket_index


# ---------------------------------------------------------------------------
# cyclic bitmap

def bitmap_capacity(params):
    """Ring size (bits) covering every value reachable from one window, plus read slack."""
    span = -(-params.W * params.R // params.B) + 2 + params.L_eff + 64
    return max(128, 1 << (span - 1).bit_length())


@nb.njit(inline="always")
def _bm_test(words, mask, v):
    pos = np.uint64(v) & mask
    return (words[pos >> _U6] >> (pos & _U63)) & _U1


@nb.njit(inline="always")
def _bm_set(words, mask, v):
    pos = np.uint64(v) & mask
    words[pos >> _U6] |= _U1 << (pos & _U63)


@nb.njit(inline="always")
def _bm_read64(words, mask, v):
    pos = np.uint64(v) & mask
    w = pos >> _U6
    o = pos & _U63
    lo = words[w] >> o
    if o == 0:
        return lo
    nxt = (w + _U1) & (mask >> _U6)
    return lo | (words[nxt] << (np.uint64(64) - o))


@nb.njit(inline="always")
def _bm_clear(words, mask, a, b):
    """Clear the bits of values in [a, b)."""
    if b - a > np.int64(mask):
        words[:] = 0
        return
    v = a
    while v < b:
        pos = np.uint64(v) & mask
        o = pos & _U63
        if o == 0 and b - v >= 64:
            words[pos >> _U6] = 0
            v += 64
        else:
            words[pos >> _U6] &= ~(_U1 << o)
            v += 1


class CyclicBitmap:
    """Fixed-capacity ring of used/free flags for output values.

    Value ``v`` lives at ring position ``v % capacity``; only values in
    ``[base, base + capacity)`` are meaningful.
    """

    def __init__(self, capacity, base=0):
        if capacity < 64 or capacity & (capacity - 1):
            raise ValueError("capacity must be a power of two >= 64")
        self.capacity = capacity
        self.base = base
        self.words = np.zeros(capacity // 64, dtype=np.uint64)

    @property
    def _mask(self):
        return np.uint64(self.capacity - 1)

    def _check(self, v):
        if not self.base <= v < self.base + self.capacity:
            raise IndexError(f"value {v} outside [{self.base}, {self.base + self.capacity})")

    def test(self, v):
        self._check(v)
        return bool(_bm_test(self.words, self._mask, v))

    def set(self, v):
        self._check(v)
        _bm_set(self.words, self._mask, v)

    def read64(self, v):
        """The 64 flags of values ``v .. v + 63`` as an int (bit i = value v + i)."""
        return int(_bm_read64(self.words, self._mask, v))

    def advance(self, new_base):
        """Slide the covered range forward, freeing the values that leave it."""
        if new_base > self.base:
            _bm_clear(self.words, self._mask, self.base, new_base)
            self.base = new_base

    def count(self):
        return int(np.unpackbits(self.words.view(np.uint8)).sum())


# ---------------------------------------------------------------------------
# seed search kernels
#
# All kernels receive the bucket's codes ``codes[lo:hi]`` and their slice
# starts ``starts[0:hi-lo]`` and return the chosen seed, 0 meaning bump.

@nb.njit(inline="always")
def _ctz(x):
    n = 0
    if x & np.uint64(0xFFFFFFFF) == 0:
        n += 32
        x >>= np.uint64(32)
    if x & np.uint64(0xFFFF) == 0:
        n += 16
        x >>= np.uint64(16)
    if x & np.uint64(0xFF) == 0:
        n += 8
        x >>= np.uint64(8)
    if x & np.uint64(0xF) == 0:
        n += 4
        x >>= np.uint64(4)
    if x & np.uint64(0x3) == 0:
        n += 2
        x >>= np.uint64(2)
    if x & np.uint64(0x1) == 0:
        n += 1
    return n


@nb.njit(inline="always")
def _self_collides(vals, k):
    for j in range(1, k):
        for t in range(j):
            if vals[j] == vals[t]:
                return True
    return False


@nb.njit(cache=True)
def _search_mul(codes, lo, hi, starts, words, mask, S, L, pos, vals):
    k = hi - lo
    best = 0
    best_sum = np.int64(1) << 62
    for s in range(1, 1 << S):
        total = np.int64(0)
        for j in range(k):
            p = nb_place_mul(s, codes[lo + j], L)
            pos[j] = p
            total += p
        if total >= best_sum:
            continue
        ok = True
        for j in range(k):
            v = starts[j] + pos[j]
            if _bm_test(words, mask, v):
                ok = False
                break
            vals[j] = v
        if ok and not _self_collides(vals, k):
            best = s
            best_sum = total
    return best


@nb.njit(cache=True)
def _search_add(codes, lo, hi, starts, words, mask, S, L, vals):
    k = hi - lo
    lmask = np.uint64(L - 1)
    for j in range(k):
        vals[j] = starts[j] + np.int64(codes[lo + j] & lmask)
    if _self_collides(vals, k):
        return 0
    last = (1 << S) - 1
    sb = 1
    while sb <= last:
        r = np.uint64(0)
        for j in range(k):
            r |= _bm_read64(words, mask, vals[j] + sb - 1)
        valid = last - sb + 1
        if valid < 64:
            r |= _ONES << np.uint64(valid)
        if r != _ONES:
            return sb + _ctz(~r)
        sb += 64
    return 0


def _stride_mask(delta):
    m = 0
    for i in range(0, 64, delta):
        m |= 1 << i
    return np.uint64(~m & 0xFFFFFFFFFFFFFFFF)


_STRIDE_MASKS = np.array([0, _stride_mask(1), _stride_mask(2), _stride_mask(3)], dtype=np.uint64)


@nb.njit(cache=True)
def _search_wrap(codes, lo, hi, starts, words, mask, S, L, delta, lows, vals, cuts,
                 stride_masks):
    k = hi - lo
    last = (1 << S) - 1
    lmask = np.uint64(L - 1)
    # interval boundaries: seeds at which some code's position wraps past L
    ncut = 0
    for j in range(k):
        low = np.int64(codes[lo + j] & lmask)
        lows[j] = low
        w = L
        while True:
            s_w = (w - low + delta - 1) // delta
            if s_w > last:
                break
            if s_w > 1:
                cuts[ncut] = s_w
                ncut += 1
            w += L
    cuts[:ncut].sort()
    cuts[ncut] = last + 1
    ncut += 1
    premask = stride_masks[delta]
    per_block = 63 // delta + 1
    best = 0
    best_sum = np.int64(1) << 62
    a = 1
    for ci in range(ncut):
        b = cuts[ci]
        if b <= a:
            continue
        total = np.int64(0)
        for j in range(k):
            p = (lows[j] + delta * a) & (L - 1)
            vals[j] = starts[j] + p
            total += p
        if total < best_sum and not _self_collides(vals, k):
            sb = a
            while sb < b:
                off = delta * (sb - a)
                r = premask
                for j in range(k):
                    r |= _bm_read64(words, mask, vals[j] + off)
                valid = b - sb
                if valid < per_block:
                    r |= _ONES << np.uint64(delta * (valid - 1) + 1)
                if r != _ONES:
                    s = sb + _ctz(~r) // delta
                    cand = total + delta * k * (s - a)
                    if cand < best_sum:
                        best = s
                        best_sum = cand
                    break
                sb += per_block
        a = b
    return best


@nb.njit(inline="always")
def _search(variant, codes, lo, hi, starts, words, mask, S, L, delta, pos, vals, cuts,
            stride_masks):
    if variant == 0:
        return _search_mul(codes, lo, hi, starts, words, mask, S, L, pos, vals)
    elif variant == 1:
        return _search_add(codes, lo, hi, starts, words, mask, S, L, vals)
    return _search_wrap(codes, lo, hi, starts, words, mask, S, L, delta, pos, vals, cuts,
                        stride_masks)


@nb.njit(inline="always")
def _values(variant, codes, lo, hi, starts, s, L, delta, vals):
    lmask = np.uint64(L - 1)
    for j in range(hi - lo):
        c = codes[lo + j]
        if variant == 0:
            p = nb_place_mul(s, c, L)
        elif variant == 1:
            p = np.int64(c & lmask) + s - 1
        else:
            p = np.int64((c + np.uint64(delta * s)) & lmask)
        vals[j] = starts[j] + p


# ---------------------------------------------------------------------------
# windowed assignment

@nb.njit(inline="always")
def _ell(ell, size):
    if size <= 7:
        return ell[size]
    return ell[7] + (size - 7) * (ell[7] - ell[6])


@nb.njit(inline="always")
def _before(pa, ba, pb, bb):
    """Heap order: higher priority first, lower bucket index on ties."""
    return pa > pb or (pa == pb and ba < bb)


@nb.njit(inline="always")
def _heap_push(hp, hb, size, p, b):
    i = size
    while i > 0:
        parent = (i - 1) >> 1
        if _before(p, b, hp[parent], hb[parent]):
            hp[i] = hp[parent]
            hb[i] = hb[parent]
            i = parent
        else:
            break
    hp[i] = p
    hb[i] = b
    return size + 1


@nb.njit(inline="always")
def _heap_pop(hp, hb, size):
    top = hb[0]
    size -= 1
    p = hp[size]
    b = hb[size]
    i = 0
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _before(hp[c + 1], hb[c + 1], hp[c], hb[c]):
            c += 1
        if _before(hp[c], hb[c], p, b):
            hp[i] = hp[c]
            hb[i] = hb[c]
            i = c
        else:
            break
    if size > 0:
        hp[i] = p
        hb[i] = b
    return top, size


@nb.njit(cache=True, nogil=True)
def assign_range(codes, bounds, b_lo, b_hi, seeds, variant, S, L, delta, R, W, ell, cap,
                 presets, stats):
    """Seed buckets ``b_lo .. b_hi - 1``, writing only that slice of ``seeds``.

    ``presets`` is a sorted array of output values already taken by keys
    outside the range. ``stats`` receives: [0] keys placed, [1] keys bumped,
    [2] bitmap writes behind the window base, [3] writes beyond the ring.
    """
    nb_ = b_hi - b_lo
    if nb_ <= 0:
        return
    R64 = np.uint64(R)
    mask = np.uint64(cap - 1)
    words = np.zeros(cap // 64, dtype=np.uint64)
    done = np.zeros(nb_, dtype=np.bool_)
    maxk = 1
    for b in range(b_lo, b_hi):
        k = bounds[b + 1] - bounds[b]
        if k == 0:
            seeds[b] = 1
            done[b - b_lo] = True
        elif k > maxk:
            maxk = k
    starts = np.empty(maxk, dtype=np.int64)
    pos = np.empty(maxk, dtype=np.int64)
    vals = np.empty(maxk, dtype=np.int64)
    cuts = np.empty(maxk * ((3 << S) // max(L, 1) + 2) + 2, dtype=np.int64)
    hp = np.empty(W, dtype=np.int64)
    hb = np.empty(W, dtype=np.int64)
    hsize = 0

    first = b_lo
    while first < b_hi and done[first - b_lo]:
        first += 1
    if first == b_hi:
        return
    base = nb_fmap(codes[bounds[first]], R64)
    pi = 0
    while pi < presets.shape[0] and presets[pi] < base + cap:
        if presets[pi] >= base:
            _bm_set(words, mask, presets[pi])
        pi += 1
    pushed = first
    end = min(first + W, b_hi)
    while pushed < end:
        if not done[pushed - b_lo]:
            k = bounds[pushed + 1] - bounds[pushed]
            hsize = _heap_push(hp, hb, hsize, _ell(ell, k) - 1024 * pushed, pushed)
        pushed += 1

    while hsize > 0:
        b, hsize = _heap_pop(hp, hb, hsize)
        lo = bounds[b]
        hi = bounds[b + 1]
        k = hi - lo
        for j in range(k):
            starts[j] = nb_fmap(codes[lo + j], R64)
        s = _search(variant, codes, lo, hi, starts, words, mask, S, L, delta, pos, vals,
                    cuts, _STRIDE_MASKS)
        seeds[b] = s
        done[b - b_lo] = True
        if s > 0:
            _values(variant, codes, lo, hi, starts, s, L, delta, vals)
            for j in range(k):
                v = vals[j]
                if v < base:
                    stats[2] += 1
                elif v >= base + cap:
                    stats[3] += 1
                _bm_set(words, mask, v)
            stats[0] += k
        else:
            stats[1] += k
        if b == first:
            while first < b_hi and done[first - b_lo]:
                first += 1
            if first == b_hi:
                break
            new_base = nb_fmap(codes[bounds[first]], R64)
            if new_base > base:
                _bm_clear(words, mask, base, new_base)
                base = new_base
                while pi < presets.shape[0] and presets[pi] < base + cap:
                    if presets[pi] >= base:
                        _bm_set(words, mask, presets[pi])
                    pi += 1
            end = min(first + W, b_hi)
            while pushed < end:
                if not done[pushed - b_lo]:
                    k = bounds[pushed + 1] - bounds[pushed]
                    hsize = _heap_push(hp, hb, hsize, _ell(ell, k) - 1024 * pushed, pushed)
                pushed += 1


@nb.njit(cache=True, nogil=True)
def bucket_values(codes, bounds, b_lo, b_hi, seeds, variant, L, delta, R, out):
    """Output values of all keys of seeded buckets in ``b_lo .. b_hi - 1``.

    Writes to ``out`` and returns the count; keys of bumped buckets are skipped.
    """
    R64 = np.uint64(R)
    lmask = np.uint64(L - 1)
    n = 0
    for b in range(b_lo, b_hi):
        s = np.int64(seeds[b])
        if s == 0:
            continue
        for i in range(bounds[b], bounds[b + 1]):
            c = codes[i]
            if variant == 0:
                p = nb_place_mul(s, c, L)
            elif variant == 1:
                p = np.int64(c & lmask) + s - 1
            else:
                p = np.int64((c + np.uint64(delta * s)) & lmask)
            out[n] = nb_fmap(c, R64) + p
            n += 1
    return n


# ---------------------------------------------------------------------------
# Python-level API

def _seed_dtype(S):
    return np.uint8 if S <= 8 else np.uint16


def _starts(codes, params):
    from .primitives import fmap_array
    return fmap_array(codes, params.R)


def _bitmap_args(bitmap):
    return bitmap.words, np.uint64(bitmap.capacity - 1)


def find_best_seed_mul(bucket_codes, bitmap, params):
    """Feasible seed minimising the sum of placed values (smallest on ties), or 0."""
    codes = np.ascontiguousarray(bucket_codes, dtype=np.uint64)
    k = len(codes)
    words, mask = _bitmap_args(bitmap)
    return int(_search_mul(codes, 0, k, _starts(codes, params), words, mask, params.S,
                           params.L, np.empty(k, np.int64), np.empty(k, np.int64)))


def find_first_seed_add(bucket_codes, bitmap, params):
    """Smallest feasible seed for additive placement, found 64 seeds at a time, or 0."""
    codes = np.ascontiguousarray(bucket_codes, dtype=np.uint64)
    k = len(codes)
    words, mask = _bitmap_args(bitmap)
    return int(_search_add(codes, 0, k, _starts(codes, params), words, mask, params.S,
                           params.L, np.empty(k, np.int64)))


def find_first_seed_wrap(bucket_codes, bitmap, params):
    """Sum-minimising feasible seed for wrapping placement, or 0.

    The seed range is cut into intervals inside which no code's position
    wraps; each interval is scanned bit-parallel for its first feasible seed.
    """
    codes = np.ascontiguousarray(bucket_codes, dtype=np.uint64)
    k = len(codes)
    words, mask = _bitmap_args(bitmap)
    ncuts = k * ((3 << params.S) // params.L + 2) + 2
    return int(_search_wrap(codes, 0, k, _starts(codes, params), words, mask, params.S,
                            params.L, params.delta, np.empty(k, np.int64),
                            np.empty(k, np.int64), np.empty(ncuts, np.int64),
                            _STRIDE_MASKS))


def find_seed(bucket_codes, bitmap, params):
    if params.variant == MUL:
        return find_best_seed_mul(bucket_codes, bitmap, params)
    if params.variant == ADD:
        return find_first_seed_add(bucket_codes, bitmap, params)
    return find_first_seed_wrap(bucket_codes, bitmap, params)


@dataclass
class AssignResult:
    seeds: np.ndarray
    bumped: np.ndarray  # codes of keys in bumped buckets
    stats: np.ndarray


def run_assign(buckets, params, seeds, b_lo, b_hi, presets=None, stats=None):
    """Run the window algorithm on one bucket range, in place on ``seeds``."""
    if presets is None:
        presets = np.empty(0, dtype=np.int64)
    if stats is None:
        stats = np.zeros(4, dtype=np.int64)
    assign_range(buckets.codes, buckets.bucket_bounds, b_lo, b_hi, seeds, params.variant,
                 params.S, params.L, params.delta, params.R, params.W,
                 ell_table(params.S).as_array(), bitmap_capacity(params), presets, stats)
    return stats


def bumped_codes(buckets, seeds):
    sizes = buckets.sizes()
    return buckets.codes[np.repeat(seeds == 0, sizes)]


def assign_seeds(buckets, params):
    """Seed every bucket; returns the seeds array and the codes of bumped keys."""
    seeds = np.zeros(buckets.B, dtype=_seed_dtype(params.S))
    stats = run_assign(buckets, params, seeds, 0, buckets.B)
    return AssignResult(seeds, bumped_codes(buckets, seeds), stats)


__all__ = [
    "ADD", "MUL", "WRAP", "AssignResult", "CyclicBitmap", "EllTable", "assign_seeds",
    "bitmap_capacity", "ell_table", "find_best_seed_mul", "find_first_seed_add",
    "find_first_seed_wrap", "find_seed", "priority",
]
