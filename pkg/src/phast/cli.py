"""Command-line front end: ``phast build | query | bench | keygen``.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 duplicate keys, 4 unreadable input, 5 corrupt or incompatible structure.
"""

import argparse
import csv
import itertools
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .errors import CorruptStreamError, DuplicateKeysError, InvalidConfigError, PhastError
from .keys import keygen, read_keys, write_keys
from .mphf import Mphf, build, verify
from .parallel import THREADS_ENV, default_threads
from .params import default_lambda, resolve_params, _variant_code
from .remap import ENCODINGS

EXIT_VERIFY, EXIT_CONFIG, EXIT_DUPLICATES, EXIT_INPUT, EXIT_CORRUPT = 1, 2, 3, 4, 5

CSV_FIELDS = ["variant", "S", "L", "lambda", "delta", "threads", "n", "bits_per_key",
              "build_ns_per_key", "query_ns_per_query", "bumped_frac", "layers", "error"]

KEY_KINDS = ("random-strings-10-50", "u64-integers")


@dataclass
class BenchRecord:
    variant: str
    S: int
    L: int
    lam: float
    delta: int
    threads: int
    n: int
    bits_per_key: float = float("nan")
    build_ns_per_key: float = float("nan")
    query_ns_per_query: float = float("nan")
    bumped_frac: float = float("nan")
    layers: int = 0
    error: str = ""

    def row(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return {k: _fmt(d[k]) for k in CSV_FIELDS}


def _fmt(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.6g}"
    return str(v)


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# shared helpers

def _load_keys(path, fmt):
    try:
        return read_keys(path, fmt)
    except (OSError, PhastError, UnicodeError) as e:
        raise _Fail(EXIT_INPUT, f"cannot read keys from {path}: {e}") from None


def _first_layer_m(n, m_percent):
    if m_percent is None:
        return None
    if m_percent < 100:
        raise _Fail(EXIT_CONFIG, "--m-percent must be at least 100")
    return max(n, math.ceil(n * m_percent / 100))


def _build_kwargs(args, n):
    return dict(variant=args.variant, S=args.s_bits, lam=args.lam, L=args.slice_len,
                delta=args.delta, m=_first_layer_m(n, args.m_percent), minimal=args.minimal,
                remap=ENCODINGS[args.remap], threads=args.threads)


def _record(mphf, kw, n, threads):
    p = mphf.layers[0].params
    name = {0: "mul", 1: "add", 2: "wrap"}[_variant_code(kw["variant"])]
    return BenchRecord(name, p.S, p.L, p.lam if p.lam else float("nan"), p.delta, threads, n,
                       bits_per_key=mphf.bits_per_key(), bumped_frac=mphf.bumped_fraction(),
                       layers=len(mphf.layers))


def _writer(stream):
    w = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    return w


# --------------------------------------------------------------------------
# subcommands

def cmd_build(args):
    keys = _load_keys(args.input, args.format)
    t0 = time.perf_counter_ns()
    try:
        mphf = build(keys, **_build_kwargs(args, len(keys)))
    except DuplicateKeysError as e:
        raise _Fail(EXIT_DUPLICATES, str(e)) from None
    except InvalidConfigError as e:
        raise _Fail(EXIT_CONFIG, str(e)) from None
    elapsed = time.perf_counter_ns() - t0
    if args.verify and not verify(mphf, keys):
        raise _Fail(EXIT_VERIFY, "verification failed: queries are not a bijection")
    try:
        mphf.save(args.output)
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot write {args.output}: {e}") from None
    rec = _record(mphf, _build_kwargs(args, len(keys)), len(keys), args.threads)
    rec.build_ns_per_key = elapsed / len(keys)
    _writer(sys.stdout).writerow(rec.row())
    return 0


def cmd_query(args):
    try:
        mphf = Mphf.load(args.structure)
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot read {args.structure}: {e}") from None
    except CorruptStreamError as e:
        raise _Fail(EXIT_CORRUPT, f"{args.structure}: {e}") from None
    keys = _load_keys(args.keys, args.format)
    out = sys.stdout
    for v in mphf.query_many(keys).tolist():
        out.write(f"{v}\n")
    return 0


def cmd_keygen(args):
    if args.n < 1:
        raise _Fail(EXIT_CONFIG, "n must be positive")
    keys = keygen(args.kind, args.n, args.rng_seed)
    try:
        write_keys(keys, args.output, args.format)
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot write {args.output}: {e}") from None
    return 0


def _parse_list(text, conv):
    """``"a,b,c"`` or a range ``"start:stop:step"`` (stop included)."""
    if text is None:
        return [None]
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ":" in part:
            start, stop, step = (float(x) for x in part.split(":"))
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(conv(round(start + i * step, 10)) for i in range(count))
        else:
            out.append(conv(part))
    return out


def _sweep(args):
    """(variant, S, lambda, L, delta) tuples from a sweep file or the axis flags."""
    if args.sweep_file:
        try:
            with open(args.sweep_file, newline="") as f:
                rows = list(csv.DictReader(f))
        except OSError as e:
            raise _Fail(EXIT_INPUT, f"cannot read {args.sweep_file}: {e}") from None

        def get(row, k, conv):
            v = (row.get(k) or "").strip()
            return conv(v) if v else None

        return [(row["variant"].strip(), get(row, "S", int) or 8, get(row, "lambda", float),
                 get(row, "L", int), get(row, "delta", int) or 1) for row in rows]
    return list(itertools.product(_parse_list(args.variants, str),
                                  _parse_list(args.s_bits_list, int),
                                  _parse_list(args.lambdas, float),
                                  _parse_list(args.slice_lens, int),
                                  _parse_list(args.deltas, int)))


def _median_build_ns(keys, kw, repeats):
    build(keys, **kw)  # warm-up, discarded
    times = []
    mphf = None
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        mphf = build(keys, **kw)
        times.append(time.perf_counter_ns() - t0)
    return mphf, statistics.median(times) / len(keys)


def _query_ns(mphf, keys, count, rng_seed):
    rng = np.random.default_rng(rng_seed)
    batch = keys.take(rng.integers(0, len(keys), size=min(count, 10**6)))
    mphf.query_many(batch.take(np.arange(min(len(batch), 1000))))  # warm-up
    done, elapsed = 0, 0
    while done < count:
        if count - done < len(batch):
            batch = batch.take(np.arange(count - done))
        t0 = time.perf_counter_ns()
        mphf.query_many(batch)
        elapsed += time.perf_counter_ns() - t0
        done += len(batch)
    return elapsed / done


def bench_rows(keys, sweep, threads_list, repeats=3, queries=10**7, minimal=True,
               m_percent=None, remap="ef", rng_seed=0):
    """Yield one :class:`BenchRecord` per sweep tuple and thread count."""
    n = len(keys)
    for (variant, S, lam, L, delta), t in itertools.product(sweep, threads_list):
        try:
            lam_eff = lam if lam is not None else default_lambda(_variant_code(variant), S, delta)
            rec = BenchRecord(str(variant).lower(), S, L or 0, lam_eff, delta, t, n)
            kw = dict(variant=variant, S=S, lam=lam, L=L, delta=delta,
                      m=_first_layer_m(n, m_percent), minimal=minimal,
                      remap=ENCODINGS[remap], threads=t)
            resolve_params(n, variant, S=S, lam=lam, L=L, m=kw["m"], delta=delta)
            mphf, build_ns = _median_build_ns(keys, kw, repeats)
            rec = _record(mphf, kw, n, t)
            rec.build_ns_per_key = build_ns
            if queries:
                rec.query_ns_per_query = _query_ns(mphf, keys, queries, rng_seed)
        except (PhastError, _Fail, KeyError, ValueError) as e:
            rec.error = f"{type(e).__name__}: {e}".replace("\n", " ")
        yield rec


def cmd_bench(args):
    if args.keys:
        keys = _load_keys(args.keys, args.format)
    else:
        keys = keygen(args.kind, args.n, args.rng_seed)
    sweep = _sweep(args)
    threads = _parse_list(args.threads_list, int)
    w = _writer(sys.stdout)
    sys.stdout.flush()
    for rec in bench_rows(keys, sweep, threads, args.repeats, args.queries, args.minimal,
                          args.m_percent, args.remap, args.rng_seed):
        w.writerow(rec.row())
        sys.stdout.flush()
    return 0


# --------------------------------------------------------------------------
# argument parsing

def _add_build_flags(p):
    p.add_argument("--variant", choices=["mul", "add", "wrap"], default="mul")
    p.add_argument("--s-bits", type=int, default=8, help="seed size S in bits")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="expected bucket size (default depends on variant and S)")
    p.add_argument("--slice-len", type=int, default=None, help="slice length L (power of two)")
    p.add_argument("--delta", type=int, default=1, choices=[1, 2, 3])
    p.add_argument("--threads", type=int, default=default_threads(),
                   help=f"build threads (default: ${THREADS_ENV} or 1)")
    _add_common(p)


def _add_common(p):
    p.add_argument("--minimal", action=argparse.BooleanOptionalAction, default=True,
                   help="map onto 0..n-1 (--non-minimal: onto 0..m-1)")
    p.add_argument("--non-minimal", dest="minimal", action="store_false", help=argparse.SUPPRESS)
    p.add_argument("--m-percent", type=float, default=None,
                   help="first-layer range as a percentage of n (>= 100)")
    p.add_argument("--remap", choices=["ef", "compact"], default="ef")
    p.add_argument("--format", choices=["text", "binary"], default="text",
                   help="key file format")


def make_parser():
    parser = argparse.ArgumentParser(prog="phast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build, verify and save a hash function")
    p.add_argument("input", help="key file")
    p.add_argument("-o", "--output", required=True, help="where to write the structure")
    p.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True)
    _add_build_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="print the value of every key in a key file")
    p.add_argument("structure")
    p.add_argument("keys")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="parameter sweep; CSV on standard output")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--keys", help="key file (default: synthetic keys)")
    src.add_argument("--kind", choices=KEY_KINDS, default=KEY_KINDS[0])
    p.add_argument("-n", type=int, default=10**6, help="synthetic key count")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--variant", dest="variants", default="mul", help="comma-separated list")
    p.add_argument("--s-bits", dest="s_bits_list", default="8", help="comma-separated list")
    p.add_argument("--lambda", dest="lambdas", default=None,
                   help="list or start:stop:step range (default: per-variant)")
    p.add_argument("--slice-len", dest="slice_lens", default=None)
    p.add_argument("--delta", dest="deltas", default="1")
    p.add_argument("--threads", dest="threads_list", default=str(default_threads()),
                   help=f"comma-separated list (default: ${THREADS_ENV} or 1)")
    p.add_argument("--sweep-file", help="CSV with columns variant,S,lambda,L,delta")
    p.add_argument("--repeats", type=int, default=3, help="timed builds per row")
    p.add_argument("--queries", type=int, default=10**7, help="timed lookups per row")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("keygen", help="write a synthetic key file")
    p.add_argument("kind", choices=KEY_KINDS)
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "binary"], default="text")
    p.set_defaults(func=cmd_keygen)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as e:
        print(f"phast: {e}", file=sys.stderr)
        return e.code
    except InvalidConfigError as e:
        print(f"phast: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
