"""Command-line interface: ``entcum {cumulant, mean, eval, verify, cache}``.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 internal
invariant violation.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import __version__
from .convert import Converter
from .emit import emit
from .engine import CumulantEngine, CumulantKey, DiskCache, StatKind
from .exactalg import PoleError
from .symexpr import InvariantError, SymExpr, substitute_alpha

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_INTERNAL = 3

DEFAULT_CACHE = "./.cumcache"
MAX_ORDER = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _joint(text: str) -> tuple[StatKind, int]:
    kind, sep, k = text.partition(":")
    if not sep or kind.upper() not in ("T", "R"):
        raise argparse.ArgumentTypeError(f"expected KIND:K with KIND in T, R; got {text!r}")
    try:
        index = int(k)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad index in {text!r}")
    if index < 0:
        raise argparse.ArgumentTypeError("joint index must be non-negative")
    return StatKind(kind.upper()), index


def _orders(text: str) -> list[int]:
    try:
        out = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of orders, got {text!r}")
    if not out or out[0] < 1 or out[-1] > 6:
        raise argparse.ArgumentTypeError("orders must lie in 1..6")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cache", default=DEFAULT_CACHE, metavar="DIR", help="cache directory (default %(default)s)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the disk cache")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = _Parser(prog="entcum", description="Exact cumulants of the entanglement entropy of random states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cumulant", parents=[common], help="closed form of kappa_L(S), kappa_L(T) or a joint cumulant")
    c.add_argument("--of", choices=["S", "T"], default="S")
    c.add_argument("--order", type=_positive, required=True, metavar="L")
    c.add_argument("--joint", type=_joint, metavar="KIND:K",
                   help="joint cumulant kappa_L(X_K, T, ..., T) with X in {T, R}")
    c.add_argument("--format", choices=["latex", "json", "text"], default="text")

    mn = sub.add_parser("mean", parents=[common], help="mean of S, of T_K or of R_K")
    mn.add_argument("--of", choices=["S", "T", "R"], default="T")
    mn.add_argument("--order", type=int, default=1, metavar="K", help="index K of T_K or R_K (ignored for S)")
    mn.add_argument("--format", choices=["latex", "json", "text"], default="text")

    e = sub.add_parser("eval", parents=[common], help="numeric value of kappa_L at integer (m, n)")
    e.add_argument("--of", choices=["S", "T"], default="S")
    e.add_argument("--order", type=_positive, required=True, metavar="L")
    e.add_argument("--m", type=_positive, required=True)
    e.add_argument("--n", type=_positive, required=True)
    e.add_argument("--digits", type=_positive, default=50, metavar="D")

    v = sub.add_parser("verify", parents=[common], help="Monte Carlo check of kappa_L(S)")
    v.add_argument("--m", type=_positive, required=True)
    v.add_argument("--n", type=_positive, required=True)
    v.add_argument("--orders", type=_orders, default=[1, 2])
    v.add_argument("--samples", type=_positive, default=100_000, metavar="N")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--threshold", type=float, default=4.0)
    v.add_argument("--workers", type=_positive, default=1)
    v.add_argument("--digits", type=_positive, default=30, metavar="D")

    k = sub.add_parser("cache", parents=[common], help="inspect or clear the cache")
    k.add_argument("action", choices=["list", "clear"])
    return p


def _engine(args) -> CumulantEngine:
    return CumulantEngine(None if args.no_cache else args.cache)


def _cmd_cumulant(args, out) -> int:
    engine = _engine(args)
    if args.joint is not None:
        if args.of != "T":
            raise UsageError("--joint applies to the {m, alpha} side; use --of T")
        kind, index = args.joint
        expr = engine.joint_cumulant(CumulantKey(kind, index, args.order))
    elif args.order > MAX_ORDER:
        raise UsageError(f"order above {MAX_ORDER} is not supported")
    elif args.of == "T":
        expr = engine.cumulant_T(args.order)
    else:
        expr = Converter(engine).cumulant_S(args.order)
    print(emit(expr, args.format), file=out)
    return EXIT_OK


def _cmd_mean(args, out) -> int:
    engine = _engine(args)
    if args.of == "S":
        expr = Converter(engine).cumulant_S(1)
    else:
        if args.order < 0:
            raise UsageError("--order must be non-negative")
        expr = engine.mean_T(args.order) if args.of == "T" else engine.mean_R(args.order)
    print(emit(expr, args.format), file=out)
    return EXIT_OK


def _check_point(m: int, n: int) -> None:
    if m > n:
        raise UsageError(f"need m <= n, got m={m}, n={n}")


def _cmd_eval(args, out) -> int:
    from .numverify import eval_expr, to_decimal_string

    _check_point(args.m, args.n)
    if args.order > MAX_ORDER:
        raise UsageError(f"order above {MAX_ORDER} is not supported")
    engine = _engine(args)
    if args.of == "T":
        expr: SymExpr = engine.cumulant_T(args.order)
    else:
        expr = Converter(engine).cumulant_S(args.order)
    value = eval_expr(expr, args.m, args.n, args.digits)
    print(to_decimal_string(value, args.digits), file=out)
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    from .numverify import verify

    _check_point(args.m, args.n)
    if args.m > 64 or args.n > 64:
        raise UsageError("sampling supports m <= n <= 64")
    if args.samples < 1000:
        raise UsageError("verify needs at least 1000 samples")
    report = verify(args.m, args.n, args.orders, N=args.samples, seed=args.seed, threshold=args.threshold,
                    workers=args.workers, engine=_engine(args), digits=args.digits)
    print(report.to_json(), file=out)
    print(f"verify: {len(report.results)} orders in {report.wall_time:.2f} s", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_cache(args, out) -> int:
    disk = DiskCache(args.cache)
    if args.action == "list":
        for name in disk.entries():
            print(name, file=out)
    else:
        removed = disk.clear()
        print(f"removed {removed} entries from {args.cache}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "cumulant": _cmd_cumulant,
    "mean": _cmd_mean,
    "eval": _cmd_eval,
    "verify": _cmd_verify,
    "cache": _cmd_cache,
}


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"entcum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"entcum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"entcum: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, PoleError) as exc:
        print(f"entcum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report, never crash silently
        print(f"entcum: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
