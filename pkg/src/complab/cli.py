"""Command-line entry point: ``complab <command> --exclude 1,4 ...``.

JSON reports carry the resolved configuration and the package version, and
are written with a fixed layout so identical inputs give identical bytes
(``--no-timestamp`` drops the wall-clock fields).  Exit status is 0 on
success, 1 on invalid input and 2 when a verification finds a counterexample.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import __version__
from .asymptotics import SeriesTolError, asymptotic_constants
from .bench import ks_standardized
from .blocking import DEFAULT_BETA_MULTIPLIER, DEFAULT_ENUMERATION_CAP, conditional_independence_check, decompose, default_parameters
from .counting import count_asymptotic, count_exact, log_moment_table
from .part_set import TruncatedPartSet, parse_exclude
from .roots import RootConvergenceError, RootGapError, all_roots
from .sampler import CompositionSampler, make_generator
from .verify import run_checks

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _threads(args) -> int:
    env = os.environ.get("COMPLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"COMPLAB_THREADS must be an integer, got {env!r}") from None
    if args.threads is not None:
        return max(1, args.threads)
    return os.cpu_count() or 1


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(args, config: dict, result: dict, t0: float | None = None):
    report = {"version": __version__, "config": config}
    report.update(result)
    if t0 is not None and not args.no_timestamp:
        report["runtime"] = time.perf_counter() - t0
    sys.stdout.write(_dump(report))


def _fmt17(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else "%.17g" % x


def _write_csv(header, rows):
    out = [",".join(header)]
    out.extend(",".join(row) for row in rows)
    sys.stdout.write("\n".join(out) + "\n")


# commands ----------------------------------------------------------------


def cmd_roots(args) -> int:
    ps = parse_exclude(args.exclude)
    prof = all_roots(ps, tol=args.tol)
    _emit(args, {"command": "roots", "part_set": ps.to_json(), "tol": args.tol}, prof.to_json())
    return EXIT_OK


def cmd_count(args) -> int:
    ps = parse_exclude(args.exclude)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    const = asymptotic_constants(ps)
    exact = count_exact(ps, args.n)[args.n]
    est = count_asymptotic(ps, const.p, args.n)
    gap = math.expm1(est.log_value - math.log(exact)) if exact else None
    result = {
        "n": args.n,
        "exact": str(exact),
        "asymptotic": est.value,
        "log_asymptotic": est.log_value,
        "relative_gap": gap,
    }
    _emit(args, {"command": "count", "part_set": ps.to_json(), "n": args.n}, result)
    return EXIT_OK


def cmd_moments(args) -> int:
    ps = parse_exclude(args.exclude)
    if args.n < 1:
        raise UsageError("--n must be positive")
    if not 1 <= args.tmax <= 4:
        raise UsageError("--tmax must be between 1 and 4")
    table = log_moment_table(ps, args.n, t_max=args.tmax)
    rows = []
    for n in range(1, args.n + 1):
        if not table.present(n):
            continue
        var = table.variance(n) if args.tmax >= 2 else None
        fourth = table.fourth_central(n) if args.tmax >= 4 else None
        rows.append([str(n), _fmt17(float(table.mean(n))), _fmt17(var and float(var)), _fmt17(fourth and float(fourth))])
    _write_csv(["n", "mean", "variance", "fourth_central"], rows)
    return EXIT_OK


def cmd_constants(args) -> int:
    ps = parse_exclude(args.exclude)
    const = asymptotic_constants(ps, tol=args.tol)
    _emit(args, {"command": "constants", "part_set": ps.to_json(), "tol": args.tol}, const.to_json())
    return EXIT_OK


def _universe(args):
    ps = parse_exclude(args.exclude)
    return ps if args.beta is None else TruncatedPartSet(ps, args.beta)


def cmd_sample(args) -> int:
    uni = _universe(args)
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    sampler = CompositionSampler(uni, args.n)
    gen = make_generator(args.seed, args.stream)
    parts = [[int(k) for k in a] for a in sampler.iter_parts(args.count, gen)]
    if args.format == "lines":
        sys.stdout.write("".join(",".join(map(str, c)) + "\n" for c in parts))
    else:
        config = {
            "command": "sample",
            "part_set": uni.to_json(),
            "n": args.n,
            "count": args.count,
            "seed": args.seed,
            "stream": args.stream,
            "rng": "numpy.PCG64",
        }
        _emit(args, config, {"samples": parts})
    return EXIT_OK


def cmd_decompose(args) -> int:
    ps = parse_exclude(args.exclude)
    if args.n is not None:
        p = asymptotic_constants(ps).p
        m, beta = args.m, args.beta
        if m is None or beta is None:
            d = default_parameters(args.n, p, args.multiplier)
            m = d.m if m is None else m
            beta = d.beta if beta is None else beta
        comp = [int(k) for k in CompositionSampler(TruncatedPartSet(ps, beta), args.n).sample(make_generator(args.seed))]
        source = "sampled"
    else:
        text = sys.stdin.read().strip()
        if not text:
            raise UsageError("no composition on stdin (pass --n to sample one)")
        try:
            comp = [int(t) for t in text.replace(",", " ").split()]
        except ValueError:
            raise UsageError(f"invalid composition: {text!r}") from None
        bad = [k for k in comp if k not in ps]
        if bad:
            raise UsageError(f"parts {bad} are not in S")
        if args.m is None:
            raise UsageError("--m is required when reading a composition")
        m = args.m
        beta = args.beta if args.beta is not None else max(comp)
        source = "stdin"
    bd = decompose(comp, m, beta, strict=args.strict)
    result = bd.to_json()
    result["valid"] = bd.n // m > 2 * beta
    config = {
        "command": "decompose",
        "part_set": ps.to_json(),
        "source": source,
        "n": bd.n,
        "m": m,
        "beta": beta,
        "strict": args.strict,
    }
    if source == "sampled":
        config["seed"] = args.seed
    _emit(args, config, result)
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    if args.suite == "independence":
        if args.exclude is None:
            raise UsageError("verify independence needs --exclude")
        ps = parse_exclude(args.exclude)
        if args.beta is None or args.n is None or args.m is None:
            raise UsageError("verify independence needs --beta, --n and --m")
        rep = conditional_independence_check(TruncatedPartSet(ps, args.beta), args.n, args.m, cap=args.cap)
        config = {"command": "verify independence", "part_set": ps.to_json(), "beta": args.beta, "n": args.n, "m": args.m, "cap": args.cap}
        _emit(args, config, rep.to_json(), t0)
        return EXIT_OK if rep.passed else EXIT_FAILED
    results = run_checks(quick=args.quick)
    for r in results:
        print(r.line(), file=sys.stderr)
    config = {"command": "verify all", "quick": args.quick}
    body = {
        "passed": all(r.passed for r in results),
        "checks": [r.to_json(timestamps=not args.no_timestamp) for r in results],
    }
    _emit(args, config, body, t0)
    return EXIT_OK if body["passed"] else EXIT_FAILED


def cmd_clt(args) -> int:
    ps = parse_exclude(args.exclude)
    threads = _threads(args)
    ns = args.n
    if not ns:
        raise UsageError("--n is required")
    if args.mode == "sweep":
        rows = []
        for n in ns:
            rep = ks_standardized(ps, n, args.samples, args.seed, threads, args.exact_moments)
            rows.append([str(n), _fmt17(rep.ks_distance), _fmt17(rep.mu_used), _fmt17(rep.sigma_used), str(args.samples), str(args.seed)])
        _write_csv(["n", "ks", "mu", "sigma", "N", "seed"], rows)
        return EXIT_OK
    if len(ns) != 1:
        raise UsageError("clt takes a single --n (use 'clt sweep' for a list)")
    rep = ks_standardized(ps, ns[0], args.samples, args.seed, threads, args.exact_moments)
    config = {
        "command": "clt",
        "part_set": ps.to_json(),
        "n": ns[0],
        "samples": args.samples,
        "seed": args.seed,
        "threads": threads,
        "exact_moments": args.exact_moments,
    }
    _emit(args, config, rep.to_json(timestamps=not args.no_timestamp))
    return EXIT_OK


# parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--no-timestamp", action="store_true", help="omit wall-clock fields from reports")
    common.add_argument("--threads", type=int, default=None, help="worker count (COMPLAB_THREADS overrides)")

    parser = _Parser(prog="complab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"complab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text, exclude_required=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("--exclude", required=exclude_required, help="excluded parts, e.g. 1,4")
        sp.set_defaults(func=fn)
        return sp

    sp = add("roots", cmd_roots, "roots of (1 - x) f(x)")
    sp.add_argument("--tol", type=float, default=1e-12)

    sp = add("count", cmd_count, "exact and asymptotic |Λ_n|")
    sp.add_argument("--n", type=int, required=True)

    sp = add("moments", cmd_moments, "CSV of moments of log B for n = 1..N")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tmax", type=int, default=4)

    sp = add("constants", cmd_constants, "asymptotic constants a1, a0, b1, b0")
    sp.add_argument("--tol", type=float, default=1e-14)

    sp = add("sample", cmd_sample, "uniform random compositions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--beta", type=int, default=None, help="restrict parts to at most beta")
    sp.add_argument("--format", choices=("lines", "json"), default="lines")

    sp = add("decompose", cmd_decompose, "blocking decomposition of a composition (stdin) or a sampled one")
    sp.add_argument("--n", type=int, default=None, help="sample a composition of n instead of reading stdin")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--beta", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--multiplier", type=float, default=DEFAULT_BETA_MULTIPLIER)
    sp.add_argument("--strict", action="store_true")

    sp = add("verify", cmd_verify, "run verification suites", exclude_required=False)
    sp.add_argument("suite", choices=("independence", "all"))
    sp.add_argument("--quick", action="store_true", help="reduced sizes for 'all'")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--beta", type=int, default=None)
    sp.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)

    sp = add("clt", cmd_clt, "KS distance of standardised log B (or 'clt sweep' for CSV)")
    sp.add_argument("mode", nargs="?", choices=("sweep",), default=None)
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--exact-moments", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, ValueError, ArithmeticError, RootGapError, RootConvergenceError, SeriesTolError) as exc:
        print(f"complab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
