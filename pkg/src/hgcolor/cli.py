"""Command-line entry point: ``hgcolor <subcommand> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 a size guard refused the request. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .experiments import (
    MODELS,
    SweepConfig,
    bad_edge_experiment,
    isolated_vertex_experiment,
    run_sweep,
)
from .hypergraph import GuardError, Seed, sample_bernoulli, sample_multi, sample_uniform
from .moments import expected_Z, expected_Z2_exact, log_asymptotic_Z, log_asymptotic_Z2

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
RANGE_BOUNDS = (2, 64)
THRESHOLD_FIELDS = ["r", "k", "u_low", "c_rk", "c_refined", "u_high", "xi", "classification"]


class UsageError(ValueError):
    pass


def parse_range(text: str, lo: int = RANGE_BOUNDS[0], hi: int = RANGE_BOUNDS[1]) -> range:
    """'a..b' (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = (int(t) for t in text.split("..", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}; expected a..b") from None
    if a > b:
        raise UsageError(f"range {text!r} is empty")
    if a < lo or b > hi:
        raise UsageError(f"range {text!r} leaves the supported interval {lo}..{hi}")
    return range(a, b + 1)


def parse_grid(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse density grid {text!r}") from None


def fmt_num(x) -> str:
    """Fixed notation with at least 6 decimals below 1e6, repr above."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if not math.isfinite(x) or abs(x) >= 1e6:
        return repr(float(x))
    return f"{x:.10f}"


def _float_or_none(q) -> float | None:
    """Float value of a big rational, or None when it overflows a double."""
    try:
        return float(q)
    except OverflowError:
        return None


def _emit_csv(rows: list[dict], fields: list[str], out) -> None:
    out.write(",".join(fields) + "\n")
    for row in rows:
        out.write(",".join(fmt_num(row[f]) if not isinstance(row[f], int) else str(row[f]) for f in fields) + "\n")


def cmd_thresholds(args, out) -> int:
    from .thresholds import c_threshold

    rs = parse_range(args.r_range)
    ks = parse_range(args.k_range)
    rows = []
    for r in rs:
        for k in ks:
            d = c_threshold(r, k, refined=args.refined).as_dict()
            rows.append({f: d[f] for f in THRESHOLD_FIELDS})
    if args.format == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
    else:
        fields = THRESHOLD_FIELDS if args.refined else [f for f in THRESHOLD_FIELDS if f != "c_refined"]
        _emit_csv(rows, fields, out)
    return EXIT_OK


def cmd_moments(args, out) -> int:
    n, r, k, m = args.n, args.r, args.k, args.m
    if hasattr(sys, "set_int_max_str_digits"):
        # exact moments at moderate n have tens of thousands of digits
        sys.set_int_max_str_digits(0)
    if min(n, r, k) < 1 or m < 0:
        raise UsageError("need positive n, r, k and m >= 0")
    if n % k:
        raise UsageError(f"k={k} must divide n={n}")
    z1 = expected_Z(n, r, k, m)
    report = {
        "n": n, "r": r, "k": k, "m": m,
        "E_Z": str(z1.exact), "E_Z_float": _float_or_none(z1.exact), "log_E_Z": z1.log_exact,
    }
    if args.exact_z2:
        z2 = expected_Z2_exact(n, r, k, m)
        report.update(E_Z2=str(z2.exact), E_Z2_float=_float_or_none(z2.exact), log_E_Z2=z2.log_exact)
        if z2.exact:
            report["second_moment_ratio"] = float(z1.exact**2 / z2.exact)
    if args.asymptotic:
        c = m / n
        report["log_E_Z_asymptotic"] = log_asymptotic_Z(n, r, k, c) if k > 1 else None
        try:
            report["log_E_Z2_asymptotic"] = log_asymptotic_Z2(n, r, k, c)
            if args.exact_z2 and z2.exact > 0:
                report["exact_over_asymptotic_Z2"] = math.exp(report["log_E_Z2"] - report["log_E_Z2_asymptotic"])
        except (ValueError, ZeroDivisionError) as exc:
            report["log_E_Z2_asymptotic"] = None
            print(f"note: {exc}", file=sys.stderr)
    if args.format == "json":
        json.dump(report, out, indent=2)
        out.write("\n")
    else:
        for key, val in report.items():
            out.write(f"{key} = {fmt_num(val) if isinstance(val, float) or val is None else val}\n")
    return EXIT_OK


def cmd_sample(args, out) -> int:
    seed = Seed(args.seed)
    if args.model == "bernoulli":
        if args.p is None:
            raise UsageError("the bernoulli model needs --p")
        H = sample_bernoulli(args.n, args.r, args.p, seed)
    else:
        if args.m is None:
            raise UsageError(f"the {args.model} model needs --m")
        sampler = sample_uniform if args.model == "uniform" else sample_multi
        H = sampler(args.n, args.r, args.m, seed)
    out.write(f"# n={args.n} r={args.r} m={H.m} model={args.model} seed={args.seed}\n")
    for e in H.edge_list():
        out.write(" ".join(map(str, e)) + "\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    grid = parse_grid(args.c_grid)
    try:
        cfg = SweepConfig(
            r=args.r, k=args.k, n=args.n, c_grid=tuple(grid), trials=args.trials,
            model=args.model, seed=Seed(args.seed), condition_simple=args.condition_simple,
        )
    except GuardError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_sweep(cfg, threads=args.threads)
    if args.out:
        with open(args.out + ".csv", "w", newline="") as fh:
            fh.write(result.to_csv())
        with open(args.out + ".json", "w") as fh:
            fh.write(result.to_json(include_timing=args.timing))
        print(f"wrote {args.out}.csv and {args.out}.json", file=sys.stderr)
    else:
        out.write(result.to_csv())
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from . import lemmas

    ids = args.lemma or sorted(lemmas.REGISTRY)
    try:
        checks = [lemmas.run_check(i) for i in ids]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    out.write(lemmas.summary_csv(checks) if args.format == "csv" else lemmas.summary_text(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_badedges(args, out) -> int:
    if args.r < 2 or args.n < 1 or args.trials < 1 or args.c < 0:
        raise UsageError("need r >= 2, n >= 1, trials >= 1, c >= 0")
    seed = Seed(args.seed)
    report = bad_edge_experiment(args.r, args.c, args.n, args.trials, seed).as_dict()
    if args.isolated:
        iso = isolated_vertex_experiment(args.r, args.c, args.n, args.trials, Seed(args.seed, 1))
        report["isolated"] = iso.as_dict()
    json.dump(report, out, indent=2, sort_keys=True)
    out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hgcolor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes for sweeps (default: all cores)")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("thresholds", help="tabulate c_{r,k} and the first-moment brackets")
    t.add_argument("--r-range", default="2..8")
    t.add_argument("--k-range", default="2..15")
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--refined", action="store_true", help="also compute the refined bound")
    t.set_defaults(func=cmd_thresholds)

    mo = sub.add_parser("moments", help="exact first and second moments of Z")
    mo.add_argument("--n", type=int, required=True)
    mo.add_argument("--r", type=int, required=True)
    mo.add_argument("--k", type=int, required=True)
    mo.add_argument("--m", type=int, required=True)
    mo.add_argument("--exact-z2", action="store_true")
    mo.add_argument("--asymptotic", action="store_true")
    mo.add_argument("--format", choices=("text", "json"), default="text")
    mo.set_defaults(func=cmd_moments)

    s = sub.add_parser("sample", help="draw one random hypergraph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--p", type=float, help="edge probability for the bernoulli model")
    s.add_argument("--model", choices=MODELS, default="multi")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_sample)

    sw = sub.add_parser("sweep", help="Monte Carlo P(k-colorable) over a density grid")
    sw.add_argument("--r", type=int, required=True)
    sw.add_argument("--k", type=int, required=True)
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--c-grid", required=True, help="comma-separated increasing densities")
    sw.add_argument("--trials", type=int, default=100)
    sw.add_argument("--model", choices=MODELS, default="uniform")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--condition-simple", action="store_true",
                    help="multi model only: resample until no bad edge")
    sw.add_argument("--out", help="write OUT.csv and OUT.json instead of CSV to stdout")
    sw.add_argument("--timing", action="store_true", help="add wall time and a timestamp to the JSON")
    sw.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="numerically check the analytic inequalities")
    v.add_argument("--lemma", action="append", help="lemma id; repeatable, default all")
    v.add_argument("--format", choices=("text", "csv"), default="text")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("badedges", help="bad-edge and isolated-vertex statistics")
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--c", type=float, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--isolated", action="store_true")
    b.set_defaults(func=cmd_badedges)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except GuardError as exc:
        print(f"hgcolor: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError) as exc:
        print(f"hgcolor: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
