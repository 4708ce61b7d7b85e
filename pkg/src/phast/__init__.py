"""PHast: perfect hashing with bucket placement, bumping and bit-parallel seed search."""

from .assign import (CyclicBitmap, EllTable, assign_seeds, ell_table, find_best_seed_mul,
                     find_first_seed_add, find_first_seed_wrap, priority)
from .errors import (CorruptStreamError, DuplicateKeysError, HashMismatchError,
                     InvalidConfigError, LayerLimitError, PhastError, VersionMismatchError)
from .hashing import hash64, hash_keys
from .keys import KeySet, keygen, read_keys, write_keys
from .mphf import Layer, Mphf, build, verify
from .parallel import ChunkPlan, parallel_assign, plan_chunks
from .params import LayerParams, resolve_params
from .partition import BucketedCodes, bucket_count, partition
from .primitives import ADD, MUL, WRAP, fmap, place_add, place_mul, place_wrap
from .remap import COMPACT, ELIAS_FANO, CompactArray, EliasFano, RemapArray, remap_build

__version__ = "0.1.0"

__all__ = [
    "ADD", "COMPACT", "ELIAS_FANO", "MUL", "WRAP", "BucketedCodes", "ChunkPlan",
    "CompactArray", "CorruptStreamError", "CyclicBitmap", "DuplicateKeysError", "EliasFano",
    "EllTable", "HashMismatchError", "InvalidConfigError", "KeySet", "Layer", "LayerLimitError",
    "LayerParams", "Mphf", "PhastError", "RemapArray", "VersionMismatchError", "assign_seeds",
    "bucket_count", "build", "ell_table", "find_best_seed_mul", "find_first_seed_add",
    "find_first_seed_wrap", "fmap", "hash64", "hash_keys", "keygen", "parallel_assign",
    "partition", "place_add", "place_mul", "place_wrap", "plan_chunks", "priority",
    "read_keys", "remap_build", "resolve_params", "verify", "write_keys",
]
