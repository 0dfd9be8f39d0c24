"""Command-line surface: coefficient tables, zonal and series evaluation,
extreme-eigenvalue distribution grids, simulation, and the validation suite.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 domain error,
4 series truncation failure, 5 divergence-domain rejection.  All commands
honor --seed; without it a fixed default (1729) is used, never wall-clock
entropy.  CSV output uses dot decimal separators regardless of locale.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from . import mc, validate, wishart, zonal
from .errors import DivergenceError, DomainError, TruncationError
from .hypergeom import TruncationPolicy, pfq
from .partitions import Partition

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_TRUNCATION = 4
EXIT_DIVERGENCE = 5


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None
    precision: int = 15

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if not 1 <= self.precision <= 17:
            raise UsageError(f"precision must be in [1, 17], got {self.precision}")

    def fnum(self, v: float) -> float:
        """Float rounded to the requested decimal precision."""
        return float(f"{float(v):.{self.precision}g}")

    def emit(self, header: list[str], rows: list[list], json_payload) -> None:
        if self.format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
            text = buf.getvalue()
        else:
            text = json.dumps(json_payload, indent=2) + "\n"
        if self.path:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _parse_int_list(text: str) -> list[int]:
    if text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text: str) -> list[float]:
    if text.strip() == "":
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_partition(text: str) -> Partition:
    parts = _parse_int_list(text)
    for a, b in zip(parts, parts[1:]):
        if a < b:
            raise UsageError(
                f"partition parts must be non-ascending, got {text!r}")
    if any(p < 0 for p in parts):
        raise UsageError(f"partition parts must be nonnegative, got {text!r}")
    return Partition(parts)


def _output_spec(args) -> OutputSpec:
    return OutputSpec(args.format, args.output, args.precision)


def _add_output_args(sub) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default=None, help="output path (default stdout)")
    sub.add_argument("--precision", type=int, default=15,
                     help="decimal digits for floating output (1-17)")


def cmd_zonal_table(args) -> int:
    if args.k < 1:
        raise UsageError(f"k must be >= 1, got {args.k}")
    out = _output_spec(args)
    part_cap = args.part_cap if args.part_cap is not None else args.k
    table = zonal.get_table(args.k, part_cap)
    rows = []
    payload = {"k": table.k, "part_cap": table.part_cap, "rows": []}
    for kappa, lam, c in table.items():
        kap_s = ",".join(str(x) for x in kappa.parts)
        lam_s = ",".join(str(x) for x in lam.parts)
        rows.append([kap_s, lam_s, str(c.numerator), str(c.denominator)])
        payload["rows"].append({
            "kappa": list(kappa.parts), "lambda": list(lam.parts),
            "numerator": str(c.numerator), "denominator": str(c.denominator)})
    out.emit(["kappa", "lambda", "numerator", "denominator"], rows, payload)
    return EXIT_OK


def cmd_eval(args) -> int:
    kappa = _parse_partition(args.kappa)
    eigs = _parse_float_list(args.eigs)
    if not eigs:
        raise UsageError("--eigs must be nonempty")
    out = _output_spec(args)
    if len(kappa) > len(eigs):
        raise DomainError(
            f"partition {kappa.parts} has more parts than {len(eigs)} eigenvalues")
    table = zonal.get_table(kappa.weight, min(len(eigs), max(kappa.weight, 1)))
    value = zonal.eval_zonal(table, kappa, eigs)
    if args.exact:
        from .partitions import BigRational

        exact = zonal.eval_zonal_rational(
            table, kappa, [BigRational(e) for e in eigs])
        rows = [[out.fnum(value), str(exact.numerator), str(exact.denominator)]]
        payload = {"value": out.fnum(value), "numerator": str(exact.numerator),
                   "denominator": str(exact.denominator)}
        out.emit(["value", "numerator", "denominator"], rows, payload)
    else:
        out.emit(["value"], [[out.fnum(value)]], {"value": out.fnum(value)})
    return EXIT_OK


def cmd_pfq(args) -> int:
    a = _parse_float_list(args.a)
    b = _parse_float_list(args.b)
    eigs = _parse_float_list(args.eigs)
    if not eigs:
        raise UsageError("--eigs must be nonempty")
    out = _output_spec(args)
    policy = TruncationPolicy(args.max_degree, args.tol, hard_fail_on_cap=False)
    res = pfq(a, b, eigs, policy)
    rows = [[out.fnum(res.value), res.degree_used, res.converged]]
    payload = {"value": out.fnum(res.value), "degree_used": res.degree_used,
               "converged": res.converged}
    out.emit(["value", "degree_used", "converged"], rows, payload)
    if not res.converged:
        print(f"warning: series not converged at degree cap {policy.max_degree}",
              file=sys.stderr)
        return EXIT_TRUNCATION
    return EXIT_OK


def cmd_wishart(args) -> int:
    if args.m < 1 or args.n < args.m:
        raise UsageError(f"need n >= m >= 1, got m={args.m}, n={args.n}")
    if not args.sigma2 > 0:
        raise UsageError(f"sigma2 must be positive, got {args.sigma2}")
    grid = _parse_float_list(args.grid)
    if not grid:
        raise UsageError("--grid must be nonempty")
    statistic = args.statistic
    if any(x < 0 for x in grid) or (statistic != "lmin-sf" and any(x <= 0 for x in grid)):
        raise UsageError("grid values must be positive")
    out = _output_spec(args)
    params = wishart.isotropic_params(args.m, args.n, args.sigma2)
    policy = TruncationPolicy(args.max_degree, args.tol, hard_fail_on_cap=False)
    rows = []
    payload = {"statistic": statistic, "m": args.m, "n": args.n,
               "sigma2": args.sigma2, "rows": []}
    all_converged = True
    if statistic in ("lmax-cdf", "lmax-pdf"):
        fn = (wishart.lambda_max_cdf_grid if statistic == "lmax-cdf"
              else wishart.lambda_max_pdf_grid)
        for x, res in zip(grid, fn(grid, params, policy)):
            rows.append([out.fnum(x), out.fnum(res.value), res.degree_used, res.converged])
            payload["rows"].append({
                "x": out.fnum(x), "value": out.fnum(res.value),
                "degree_used": res.degree_used, "converged": res.converged})
            all_converged = all_converged and res.converged
    else:
        cap = args.m * (2 * args.n - 2 * args.m + 1)
        for x in grid:
            value = (wishart.lambda_min_sf(x, params) if statistic == "lmin-sf"
                     else wishart.lambda_min_pdf(x, params))
            rows.append([out.fnum(x), out.fnum(value), cap, True])
            payload["rows"].append({"x": out.fnum(x), "value": out.fnum(value),
                                    "degree_used": cap, "converged": True})
    out.emit(["x", "value", "degree_used", "converged"], rows, payload)
    if not all_converged:
        print(f"warning: some grid points hit the degree cap {policy.max_degree}",
              file=sys.stderr)
        return EXIT_TRUNCATION
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.m < 1 or args.n < args.m:
        raise UsageError(f"need n >= m >= 1, got m={args.m}, n={args.n}")
    if args.samples < 1:
        raise UsageError(f"samples must be >= 1, got {args.samples}")
    if not args.sigma2 > 0:
        raise UsageError(f"sigma2 must be positive, got {args.sigma2}")
    out = _output_spec(args)
    params = wishart.isotropic_params(args.m, args.n, args.sigma2)
    rng = mc.RngStream(args.seed, 1)
    if args.statistic == "trace":
        samples = mc.wishart_trace_samples(params, args.samples, rng)
        analytic_cdf = None
    else:
        lmax, lmin = mc.wishart_extreme_eigenvalues(params, args.samples, rng)
        samples = lmax if args.statistic == "lmax" else lmin
        analytic_cdf = _analytic_cdf_interpolant(args.statistic, params, samples)
    rows = [[i, out.fnum(v)] for i, v in enumerate(samples)]
    payload = {"statistic": args.statistic, "m": args.m, "n": args.n,
               "sigma2": args.sigma2, "seed": args.seed,
               "samples": [out.fnum(v) for v in samples]}
    if analytic_cdf is not None:
        ecdf = mc.empirical_cdf(samples)
        ks = mc.ks_distance(ecdf, analytic_cdf)
        rows.append(["ks_distance", out.fnum(ks)])
        payload["ks_distance"] = out.fnum(ks)
    else:
        mean = float(samples.mean())
        rows.append(["mean", out.fnum(mean)])
        payload["mean"] = out.fnum(mean)
    out.emit(["row", "value"], rows, payload)
    return EXIT_OK


def _analytic_cdf_interpolant(statistic: str, params, samples):
    """Monotone interpolant of the analytic CDF through exact anchor values."""
    import numpy as np
    from scipy.interpolate import PchipInterpolator

    lo = max(float(samples.min()) * 0.999, 1e-9)
    hi = float(samples.max()) * 1.001
    anchors = np.linspace(lo, hi, 200)
    if statistic == "lmax":
        policy = TruncationPolicy(max_degree=300, layer_tol=1e-10,
                                  hard_fail_on_cap=True)
        values = [r.value for r in wishart.lambda_max_cdf_grid(anchors, params, policy)]
    else:
        values = [1.0 - wishart.lambda_min_sf(x, params) for x in anchors]
    interp = PchipInterpolator(anchors, values)
    return lambda x: float(np.clip(interp(x), 0.0, 1.0))


def cmd_validate(args) -> int:
    report = validate.run_validation(args.level, args.seed)
    text = validate.report_json(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qzonal",
        description=("Zonal polynomials of quaternion matrix argument, "
                     "matrix-argument hypergeometric series, and quaternion "
                     "Wishart extreme-eigenvalue distributions."))
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"global RNG seed (default {DEFAULT_SEED})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zonal-table", help="emit an exact coefficient table")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--part-cap", type=int, default=None, dest="part_cap")
    _add_output_args(p)
    p.set_defaults(fn=cmd_zonal_table)

    p = sub.add_parser("eval", help="evaluate one zonal polynomial")
    p.add_argument("--kappa", required=True, help="partition, e.g. 2,1")
    p.add_argument("--eigs", required=True, help="eigenvalues, e.g. 1.0,2.0")
    p.add_argument("--exact", action="store_true",
                   help="also print the exact rational value")
    _add_output_args(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("pfq", help="evaluate a matrix-argument pFq series")
    p.add_argument("--a", default="", help="numerator parameters, comma list")
    p.add_argument("--b", default="", help="denominator parameters, comma list")
    p.add_argument("--eigs", required=True)
    p.add_argument("--max-degree", type=int, default=60, dest="max_degree")
    p.add_argument("--tol", type=float, default=1e-12)
    _add_output_args(p)
    p.set_defaults(fn=cmd_pfq)

    p = sub.add_parser("wishart", help="extreme-eigenvalue distribution grids")
    p.add_argument("statistic", choices=("lmax-cdf", "lmin-sf", "lmax-pdf", "lmin-pdf"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma2", type=float, default=1.0,
                   help="isotropic scale (Sigma = sigma2 * I)")
    p.add_argument("--grid", required=True, help="x grid, comma list")
    p.add_argument("--max-degree", type=int, default=170, dest="max_degree")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output_args(p)
    p.set_defaults(fn=cmd_wishart)

    p = sub.add_parser("simulate", help="sample Wishart statistics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--statistic", choices=("lmax", "lmin", "trace"), required=True)
    _add_output_args(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
