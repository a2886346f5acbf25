"""Command-line interface.

Subcommands: ``identities``, ``density``, ``test``, ``power``, ``simulate``.
Exit codes: 0 success, 1 verification failure, 2 usage or data error.
The default seed can be overridden with ``EXPCHAR_SEED``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import characterization as ch
from . import series
from .distributions import DistributionSpec, Family, Sample, sample
from .errors import ExpcharError
from .gof import RULES, exponentiality_test, load_triples, load_reference_triples, test_triples
from .montecarlo import MIN_REPLICATES, estimate_power

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "EXPCHAR_SEED"
RECURSION_LAMBDAS = ("1", "2", "1/3", "5", "7/2")
RECURSION_ORDER = 30


class UsageError(Exception):
    """Bad arguments or input data; maps to exit code 2."""


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    results: dict
    version: str = __version__
    seeds: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


def digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        seed = int(raw, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if not 0 <= seed < 1 << 64:
        raise UsageError(f"{SEED_ENV} must be an unsigned 64-bit integer")
    return seed


def _emit(report: RunReport, output: str | None):
    text = report.to_json()
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# CSV helpers


def format_value(v: float) -> str:
    return format(float(v), ".17g")


def read_value_csv(path: str) -> np.ndarray:
    """Read a single-column CSV with header ``value``; errors carry line numbers."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    rows = csv.reader(io.StringIO(text))
    values = []
    header_seen = False
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if not header_seen:
            if [c.strip() for c in row] != ["value"]:
                raise UsageError(f"{path}:{lineno}: expected header 'value', got {','.join(row)!r}")
            header_seen = True
            continue
        if len(row) != 1:
            raise UsageError(f"{path}:{lineno}: expected one column, got {len(row)}")
        try:
            v = float(row[0])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: {row[0]!r} is not a number") from None
        if not np.isfinite(v) or v <= 0:
            raise UsageError(f"{path}:{lineno}: value {row[0]!r} is not a positive finite number")
        values.append(v)
    if not header_seen:
        raise UsageError(f"{path}: empty file")
    if not values:
        raise UsageError(f"{path}: no data rows")
    return np.array(values)


def write_value_csv(values, out) -> None:
    out.write("value\n")
    for v in values:
        out.write(format_value(v) + "\n")


# ---------------------------------------------------------------------------
# distribution arguments


def _add_family_args(p: argparse.ArgumentParser):
    p.add_argument("--family", default="exponential", choices=[f.value for f in Family])
    p.add_argument("--scale", type=float, default=1.0,
                   help="scale (exponential mean, lognormal median, uniform bound)")
    p.add_argument("--shape", type=float, default=None,
                   help="shape for weibull/gamma, sigma for lognormal")


def _spec_from(args) -> DistributionSpec:
    try:
        return DistributionSpec(Family(args.family), args.scale, args.shape)
    except ExpcharError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def _sweep(witnesses):
    ws = list(witnesses)
    return {
        "checked": len(ws),
        "all_hold": all(w.holds for w in ws),
        "failures": [w.to_dict() for w in ws if not w.holds],
    }


def run_identities(max_n: int, max_k: int) -> RunReport:
    if max_n < 4:
        raise UsageError("--max-n must be at least 4")
    if max_k < 1:
        raise UsageError("--max-k must be at least 1")
    results = {
        "binomial_A": {"n_range": [4, max_n],
                       **_sweep(series.binomial_identity_A(n) for n in range(4, max_n + 1))},
        "binomial_B": {"n_range": [4, max_n],
                       **_sweep(series.binomial_identity_B(n) for n in range(4, max_n + 1))},
        "factorial_sum": {"k_range": [1, max_k],
                          **_sweep(series.factorial_sum_identity(k) for k in range(1, max_k + 1))},
        "laplace": {"grid": [[str(l), str(t)] for l, t in series.laplace_grid()],
                    **_sweep(series.laplace_identity_check(l, t) for l, t in series.laplace_grid())},
        "derivative_matching": {"n_range": [4, max_n], **_sweep(
            series.derivative_identity_check_thm4(n, 1, part)
            for n in range(4, max_n + 1) for part in ("i", "ii"))},
    }
    lam_ok = {}
    for lam in RECURSION_LAMBDAS:
        a = series.solve_thm1_recursion(Fraction(lam), RECURSION_ORDER)
        lam_ok[lam] = all(c == 0 for c in a.coefficients[2:])
    results["reciprocal_recursion"] = {"order": RECURSION_ORDER, "higher_coefficients_vanish": lam_ok,
                                 "all_hold": all(lam_ok.values())}
    c = series.solve_thm2_recursion(1, RECURSION_ORDER)
    match = c == series.max_density_closed_form(1, RECURSION_ORDER)
    results["max_density_recursion"] = {"order": RECURSION_ORDER, "delta": "1",
                                 "c_2": str(c[2]), "all_hold": match}
    results["notes"] = [series.C2_SIGN_NOTE]
    results["all_hold"] = all(v["all_hold"] for k, v in results.items() if isinstance(v, dict))
    return RunReport("identities", digest({"max_n": max_n, "max_k": max_k}), results)


def run_density(form: str, spec: DistributionSpec, n: int, mode: str, grid: np.ndarray):
    lhs, rhs, note = ch.identity_pair(form, n, mode)
    rep = ch.discrepancy(lhs, rhs, spec, grid)
    return rep, note, lhs.name, rhs.name


def _cmd_identities(args) -> int:
    report = run_identities(args.max_n, args.max_k)
    _emit(report, args.output)
    return EXIT_OK if report.results["all_hold"] else EXIT_FAIL


def _cmd_density(args) -> int:
    spec = _spec_from(args)
    if args.form not in ch.PAIR_NAMES:
        raise UsageError(f"unknown form {args.form!r}; choose from {', '.join(ch.PAIR_NAMES)}")
    if args.upper is None:
        grid = ch.default_grid(spec, args.points, args.lower)
    else:
        if not 0 < args.lower < args.upper:
            raise UsageError("need 0 < --lower < --upper")
        grid = np.geomspace(args.lower, args.upper, args.points)
    rep, note, lname, rname = run_density(args.form, spec, args.n, args.mode, grid)
    buf = io.StringIO()
    if note:
        buf.write(f"# note: {note}\n")
    buf.write("x,lhs,rhs,residual\n")
    for x, l, r in zip(rep.grid, rep.lhs, rep.rhs):
        buf.write(",".join(format_value(v) for v in (x, l, r, l - r)) + "\n")
    if args.output:
        Path(args.output).write_text(buf.getvalue())
        results = {"form": args.form, "mode": args.mode, "n": args.n, "lhs": lname,
                   "rhs": rname, "spec": spec.to_dict(), **rep.to_dict(),
                   "output": str(args.output)}
        if note:
            results["note"] = note
        inputs = {"form": args.form, "mode": args.mode, "n": args.n, "spec": spec.to_dict(),
                  "grid": [grid[0], grid[-1], grid.size]}
        _emit(RunReport("density", digest(inputs), results), None)
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _cmd_test(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    if args.precomputed_rst:
        if args.input:
            try:
                triples = load_triples(args.input)
            except OSError as exc:
                raise UsageError(f"{args.input}: {exc.strerror}") from None
            raw = Path(args.input).read_bytes()
        else:
            triples = load_reference_triples()
            raw = b"builtin:reference_rst"
        report = test_triples(triples, args.alpha, args.rule)
        seeds = []
    else:
        if not args.input:
            raise UsageError("an input CSV is required unless --precomputed-rst is given")
        values = read_value_csv(args.input)
        if values.size % 6:
            raise UsageError(
                f"{args.input}: {values.size} values is not a multiple of 6; "
                f"truncate to {values.size // 6 * 6}")
        raw = Path(args.input).read_bytes()
        report = exponentiality_test(Sample(values), args.alpha, seed, args.rule)
        seeds = [seed]
    inputs = {"data_sha256": hashlib.sha256(raw).hexdigest(), "alpha": args.alpha,
              "rule": args.rule, "precomputed_rst": args.precomputed_rst, "seed": seed}
    _emit(RunReport("test", digest(inputs), report.to_dict(), seeds=seeds), args.output)
    return EXIT_OK


def _cmd_power(args) -> int:
    spec = _spec_from(args)
    seed = args.seed if args.seed is not None else default_seed()
    if args.replicates < MIN_REPLICATES:
        raise UsageError(f"--replicates must be at least {MIN_REPLICATES}")
    try:
        est = estimate_power(spec, args.n, args.alpha, args.replicates, seed,
                             args.workers, args.rule)
    except ExpcharError as exc:
        raise UsageError(str(exc)) from None
    inputs = {"spec": spec.to_dict(), "n": args.n, "alpha": args.alpha,
              "replicates": args.replicates, "seed": seed, "rule": args.rule}
    _emit(RunReport("power", digest(inputs), est.to_dict(), seeds=[seed]), args.output)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = _spec_from(args)
    seed = args.seed if args.seed is not None else default_seed()
    try:
        s = sample(spec, args.n, seed)
    except ExpcharError as exc:
        raise UsageError(str(exc)) from None
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_value_csv(s.values, fh)
        inputs = {"spec": spec.to_dict(), "n": args.n, "seed": seed}
        _emit(RunReport("simulate", digest(inputs),
                        {"spec": spec.to_dict(), "n": args.n, "output": str(args.output)},
                        seeds=[seed]), None)
    else:
        write_value_csv(s.values, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expchar",
        description="Exponentiality characterizations for samples of size three.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="exact-arithmetic identity and recursion sweep")
    p.add_argument("--max-n", type=int, default=64)
    p.add_argument("--max-k", type=int, default=40)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("density", help="evaluate a density identity on a grid, write CSV")
    p.add_argument("form", help=f"one of: {', '.join(ch.PAIR_NAMES)}")
    _add_family_args(p)
    p.add_argument("--n", type=int, default=3, help="sample size for comb/max/scaled-sum forms")
    p.add_argument("--mode", choices=("default", "literal"), default="default")
    p.add_argument("--points", type=int, default=ch.DEFAULT_POINTS)
    p.add_argument("--lower", type=float, default=ch.DEFAULT_LOWER)
    p.add_argument("--upper", type=float, default=None,
                   help="grid upper end (default: survival < 1e-8)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("test", help="six-way split rank-sum test of exponentiality")
    p.add_argument("input", nargs="?", help="CSV with header 'value' (or R/S/T block file)")
    p.add_argument("--precomputed-rst", action="store_true",
                   help="input holds R/S/T blocks; without input use the shipped fixture")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rule", choices=RULES, default="calibrated")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("power", help="Monte Carlo rejection rate")
    _add_family_args(p)
    p.add_argument("--n", type=int, default=180)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rule", choices=RULES, default="calibrated")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("simulate", help="draw a seeded sample, write CSV")
    _add_family_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "alpha", None) is not None and not 0 < args.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        if getattr(args, "seed", None) is not None and not 0 <= args.seed < 1 << 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpcharError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
