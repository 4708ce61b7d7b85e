"""Layer configuration and default parameter selection."""

from dataclasses import dataclass, replace

from .errors import InvalidConfigError
from .partition import bucket_count
from .primitives import ADD, MUL, WRAP, effective_slice

VARIANTS = {"mul": MUL, "add": ADD, "wrap": WRAP}

DEFAULT_WINDOW = 256
MIN_SEED_BITS, MAX_SEED_BITS = 4, 12

# Expected bucket sizes per seed size.
_LAMBDA_MUL = {4: 2.6, 5: 2.8, 6: 3.2, 7: 3.9, 8: 4.5, 9: 5.1, 10: 6.0, 11: 6.3, 12: 7.2}
_LAMBDA_ADD = {8: 5.25, 9: 5.55, 10: 6.10, 11: 6.70, 12: 7.05}
_LAMBDA_WRAP = {
    1: {8: 5.35, 9: 5.75, 10: 6.35, 11: 6.85, 12: 7.4},
    2: {8: 5.05, 9: 5.65, 10: 6.15, 11: 6.8, 12: 7.4},
    3: {8: 5.00, 9: 5.65, 10: 6.15, 11: 6.80, 12: 7.45},
}
# Slice lengths for the wrapping additive placement, per delta and seed size.
_L_WRAP = {
    1: {8: 1024, 9: 1024, 10: 2048, 11: 2048, 12: 4096},
    2: {8: 1024, 9: 2048, 10: 2048, 11: 4096, 12: 4096},
    3: {8: 1024, 9: 2048, 10: 2048, 11: 4096, 12: 4096},
}

#: Below these key counts an additive layer is replaced by a no-bump terminal layer.
TERMINAL_THRESHOLD = {MUL: 0, ADD: 8192, WRAP: 4096}


def _is_pow2(x):
    return x >= 1 and x & (x - 1) == 0


def _floor_pow2(x):
    return 1 << (int(x).bit_length() - 1)


@dataclass(frozen=True)
class LayerParams:
    S: int
    L: int
    B: int
    m: int
    variant: int = MUL
    delta: int = 1
    W: int = DEFAULT_WINDOW
    lam: float = 0.0
    key: int = 0  # hash function index of the layer

    @property
    def L_eff(self):
        return effective_slice(self.variant, self.L, self.S)

    @property
    def R(self):
        """Number of distinct slice starts, ``m - L_eff + 1``."""
        return self.m - self.L_eff + 1

    def validate(self):
        if not MIN_SEED_BITS <= self.S <= MAX_SEED_BITS:
            raise InvalidConfigError(f"S={self.S} outside {{{MIN_SEED_BITS}..{MAX_SEED_BITS}}}")
        if not _is_pow2(self.L):
            raise InvalidConfigError(f"L={self.L} is not a power of two")
        if self.variant not in (MUL, ADD, WRAP):
            raise InvalidConfigError(f"unknown variant {self.variant}")
        if self.delta not in (1, 2, 3):
            raise InvalidConfigError(f"delta={self.delta} outside {{1, 2, 3}}")
        if self.L_eff > self.m:
            raise InvalidConfigError(f"slice length {self.L_eff} exceeds m={self.m}")
        if self.B < 1 or self.W < 1:
            raise InvalidConfigError("B and W must be positive")
        return self

    def with_(self, **kw):
        return replace(self, **kw)


def default_lambda(variant, S, delta=1):
    if variant == ADD and S in _LAMBDA_ADD:
        return _LAMBDA_ADD[S]
    if variant == WRAP and S in _LAMBDA_WRAP[delta]:
        return _LAMBDA_WRAP[delta][S]
    return _LAMBDA_MUL[S]


def default_slice_length(variant, S, n, delta=1):
    """Slice length used when none is requested (before capping at ``m``)."""
    if variant == ADD:
        return 1 << (S + 1)
    if variant == WRAP:
        table = _L_WRAP[delta]
        return table[S] if S in table else max(64, table[8] >> (8 - S))
    L = 2048 if S >= 12 else 1024 if S >= 6 else 512
    if n < 64:
        return _floor_pow2(max(n, 1))
    for limit, cap in ((1300, 64), (9500, 128), (12000, 256), (140000, 512)):
        if n < limit:
            return min(L, cap)
    return L


def _variant_code(v):
    if isinstance(v, str):
        try:
            return VARIANTS[v.lower()]
        except KeyError:
            raise InvalidConfigError(f"unknown variant {v!r}") from None
    return v


def resolve_params(n, variant=MUL, S=8, lam=None, L=None, m=None, delta=1,
                   W=DEFAULT_WINDOW, key=0):
    """Fill unset fields with the defaults for ``n`` keys and validate the result.

    An explicitly requested ``L`` is rejected if invalid; a default one is
    halved until the effective slice fits into ``m``.
    """
    if n < 1:
        raise InvalidConfigError("n must be positive")
    variant = _variant_code(variant)
    if not MIN_SEED_BITS <= S <= MAX_SEED_BITS:
        raise InvalidConfigError(f"S={S} outside {{{MIN_SEED_BITS}..{MAX_SEED_BITS}}}")
    if delta not in (1, 2, 3):
        raise InvalidConfigError(f"delta={delta} outside {{1, 2, 3}}")
    m = n if m is None else int(m)
    if m < n:
        raise InvalidConfigError(f"m={m} smaller than n={n}")
    lam = default_lambda(variant, S, delta) if lam is None else float(lam)
    if lam <= 0:
        raise InvalidConfigError("lambda must be positive")
    if L is None:
        L = default_slice_length(variant, S, n, delta)
        L = min(L, _floor_pow2(m))
        while L > 1 and effective_slice(variant, L, S) > m:
            L //= 2
    return LayerParams(S=S, L=int(L), B=bucket_count(n, lam), m=m, variant=variant,
                       delta=delta, W=W, lam=lam, key=key).validate()
