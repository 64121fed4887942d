"""``normwalk`` command line.

Results go to standard output as JSON lines; human-readable summaries go
to standard error.  Exit codes: 0 success, 1 property failure, 2 parse
error, 3 domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import measures, montecarlo, restricted, verify, walk
from ._parallel import default_workers
from .errors import DomainError
from .montecarlo import Ecdf
from .sequence import SequenceParseError, read_sequences, render_sequence

EXIT_OK, EXIT_PROPERTY, EXIT_PARSE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4

MEASURES = ("normality", "restricted", "welldist", "correlation")
QUANTILES = (0.01, 0.25, 0.5, 0.75, 0.99)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(obj, out) -> None:
    out.write(json.dumps(obj) + "\n")


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _seed(args) -> int:
    env = os.environ.get("NORMWALK_SEED")
    if env is None:
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise CliError(EXIT_DOMAIN, f"NORMWALK_SEED={env!r} is not an integer") from None


def _threads(args) -> int:
    return default_workers() if args.threads is None else args.threads


def _open_output(path):
    if path in (None, "-"):
        return sys.stdout
    try:
        return open(path, "w")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot open {path}: {exc}") from None


def cmd_measure(args) -> int:
    if args.measure == "restricted" and args.d is None:
        raise CliError(EXIT_DOMAIN, "--measure restricted needs --d")
    if args.measure == "correlation" and args.k is None:
        raise CliError(EXIT_DOMAIN, "--measure correlation needs --k")
    try:
        fh = sys.stdin if args.input in (None, "-") else open(args.input, newline="")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.input}: {exc}") from None
    out = _open_output(args.output)
    try:
        for lineno, E in enumerate(read_sequences(fh, args.format), start=1):
            if args.measure == "normality":
                report = measures.normality_measure(E)
            elif args.measure == "welldist":
                report = measures.well_distribution_measure(E)
            elif args.measure == "correlation":
                report = measures.correlation_measure(E, args.k)
            else:
                if E.length % args.d:
                    if not args.truncate:
                        raise CliError(EXIT_DOMAIN, f"sequence {lineno}: N={E.length} not a multiple of d={args.d} (use --truncate)")
                    E = E.truncate(args.d)
                report = restricted.restricted_normality_measure(E, args.d)
            record = report.to_dict()
            record["N"] = E.length
            _emit(record, out)
    except SequenceParseError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None
    finally:
        if fh is not sys.stdin:
            fh.close()
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_sample(args) -> int:
    seed = _seed(args)
    ecdf = montecarlo.sample_distribution(args.kind, args.N, args.samples, seed, d=args.d, workers=_threads(args))
    if args.output:
        try:
            ecdf.to_csv(args.output)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    qs = [float(q) for q in ecdf.quantile(list(QUANTILES))]
    _emit({"kind": args.kind, "N": args.N, "d": args.d, "samples": args.samples, "seed": seed,
           "quantiles": dict(zip((f"{int(q * 100)}%" for q in QUANTILES), qs))}, sys.stdout)
    _note("quantiles " + "  ".join(f"{int(p * 100)}%={q:.4f}" for p, q in zip(QUANTILES, qs)))
    return EXIT_OK


def cmd_exitprob(args) -> int:
    seed = _seed(args)
    if args.method == "lattice":
        est = walk.simulate_lattice_exit(args.d, args.t, args.N, args.samples, seed, workers=_threads(args))
    else:
        est = walk.simulate_wiener_exit(args.d, args.t, args.steps, args.samples, seed, workers=_threads(args))
    _emit(est.to_dict(), sys.stdout)
    _note(f"{est.method}: P(exit) = {est.estimate:.4f} +- {est.stderr:.4f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all(scale=args.scale, seed=_seed(args), only=args.suite)
    summary = {"passed": all(r.passed for r in results), "suites": [r.to_dict() for r in results]}
    _emit(summary, sys.stdout)
    for r in results:
        _note(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.checked} checked, {r.failures} failed")
    return EXIT_OK if summary["passed"] else EXIT_PROPERTY


def cmd_compare(args) -> int:
    try:
        a, b = Ecdf.from_csv(args.a), Ecdf.from_csv(args.b)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"malformed ECDF file: {exc}") from None
    ks = montecarlo.ks_distance(a, b)
    crit = montecarlo.ks_critical_value(a.count, b.count, args.alpha)
    _emit({"ks": ks, "n_a": a.count, "n_b": b.count, "alpha": args.alpha, "critical": crit, "reject": ks > crit}, sys.stdout)
    return EXIT_OK


def cmd_minsearch(args) -> int:
    n_max = args.N if args.n_max is None else args.n_max
    for N in range(args.N, n_max + 1):
        value, E = measures.min_normality_exhaustive(N)
        _emit({"N": N, "value_num": value.numerator, "value_den": value.denominator,
               "value_float": float(value), "witness": render_sequence(E, args.format)}, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normwalk", description=__doc__.splitlines()[0].strip("`"))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0, help="base seed (NORMWALK_SEED overrides)")
        p.add_argument("--threads", type=int, default=None, help="worker threads; never changes results")

    p = sub.add_parser("measure", help="measures of sequences read one per line")
    p.add_argument("--input", "-i", default="-")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=("zero-one", "plus-minus"), default="zero-one")
    p.add_argument("--measure", choices=MEASURES, default="normality")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--truncate", action="store_true", help="cut N to a multiple of d")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sample", help="ECDF of a normalised measure over random sequences")
    p.add_argument("--kind", choices=montecarlo.KINDS, default="normality")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--output", "-o", default=None, help="ECDF CSV path")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exitprob", help="polytope exit probability")
    p.add_argument("--method", choices=("lattice", "gaussian"), default="gaussian")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", type=int, default=1 << 14, help="sequence length (lattice)")
    p.add_argument("--steps", type=int, default=512, help="time grid size (gaussian)")
    p.add_argument("--samples", type=int, default=10000)
    common(p)
    p.set_defaults(func=cmd_exitprob)

    p = sub.add_parser("verify", help="run the exact-identity self checks")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on random sample counts")
    p.add_argument("--suite", action="append", default=None, help="run only this suite (repeatable)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="KS distance between two ECDF CSV files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--alpha", type=float, default=0.01)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("minsearch", help="exhaustive minimal normality measure")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n-max", type=int, default=None, help="search every length N..n-max")
    p.add_argument("--format", choices=("zero-one", "plus-minus"), default="zero-one")
    p.set_defaults(func=cmd_minsearch)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _note(f"normwalk: {exc}")
        return exc.code
    except DomainError as exc:
        _note(f"normwalk: {exc}")
        return EXIT_DOMAIN
    except OSError as exc:
        _note(f"normwalk: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
