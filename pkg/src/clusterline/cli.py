"""Batch command-line frontend.

Every subcommand emits one plot-ready document (CSV or JSON) and nothing
else on stdout; there is no interactive mode and no rendering. Numeric
fields are formatted to 9 significant digits so documents are byte-stable
across platforms. Exit status: 0 on success, 1 on computation errors,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .cluster_laws import (
    ModelParams,
    cluster_length_cdf,
    cluster_length_law,
    cycle_sum_cdf,
    cycle_sum_density,
    mean_cluster_length,
)
from .component_counts import (
    IntervalModel,
    coverage_report,
    mean_complete,
    moment_complete,
    pmf_circle_table,
    pmf_complete_table,
    pmf_incomplete_table,
    var_complete,
)
from .laplace_check import count_transform_residuals
from .mc_engine import SampleConfig, estimate
from .stats_compare import compare_continuous, compare_pmf

SCHEMA_VERSION = "1"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _round9(value):
    if isinstance(value, float):
        return float(format(value, ".9g"))
    return value


def _emit(args, command: str, columns: list[str], rows: list[dict]) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        text = buf.getvalue()
    else:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "columns": columns,
            "rows": [{c: _round9(row[c]) for c in columns} for row in rows],
        }
        text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model(args) -> IntervalModel:
    return IntervalModel(ModelParams(args.lam, args.epsilon), args.length)


def _parse_grid(text: str) -> list[float]:
    """Parse 'min:max:step' (endpoints inclusive within 1e-12) or a float."""
    if ":" not in text:
        return [float(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be min:max:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad grid {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-12)) + 1
    return [lo + k * step for k in range(count)]


def _parse_int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p != ""]


def _cmd_table(args, which: str) -> None:
    model = _model(args)
    table = {
        "pmf": pmf_complete_table,
        "incomplete": pmf_incomplete_table,
        "circle": pmf_circle_table,
    }[which](model)
    rows = [{"n": n, "probability": p} for n, p in enumerate(table.probs)]
    _emit(args, which, ["n", "probability"], rows)


def _cmd_moments(args) -> None:
    model = _model(args)
    rows = [{"m": m, "moment": moment_complete(model, m)} for m in range(1, args.m + 1)]
    _emit(args, "moments", ["m", "moment"], rows)


def _cmd_coverage(args) -> None:
    report = coverage_report(_model(args))
    rows = [
        {
            "coverage": report.quadrature,
            "closed_form": report.closed_form,
            "mismatch": int(report.mismatch),
        }
    ]
    _emit(args, "coverage", ["coverage", "closed_form", "mismatch"], rows)


def _cmd_density(args) -> None:
    params = ModelParams(args.lam, args.epsilon)
    law = args.law.upper()
    rows = []
    if law == "B":
        mixed = cluster_length_law(params)
        x_max = params.radius + 10.0 * mean_cluster_length(params)
        xs = np.linspace(params.radius, x_max, args.points)
        rows.append({"kind": "atom", "x": mixed.atom_location, "value": mixed.atom_mass})
        dens = np.asarray(mixed.density(xs), dtype=float)
        rows.extend({"kind": "density", "x": float(x), "value": float(d)} for x, d in zip(xs, dens))
    elif law == "U":
        order = int(args.n)
        x_max = params.radius + 10.0 * order * (mean_cluster_length(params) + 1.0 / params.intensity)
        xs = np.linspace(params.radius, x_max, args.points)
        rows.extend(
            {"kind": "density", "x": float(x), "value": cycle_sum_density(params, order, float(x))}
            for x in xs
        )
    else:
        raise ValueError(f"unknown law {args.law!r}; expected B or U")
    _emit(args, "density", ["kind", "x", "value"], rows)


def _cmd_laplace_check(args) -> None:
    params = ModelParams(args.lam, args.epsilon)
    rows = count_transform_residuals(params, range(4), (0.5, 1.0, 2.0))
    _emit(args, "laplace-check", ["n", "s", "closed", "numeric", "abs_err"], rows)


def _scenario_key(text: str) -> str:
    return text.lower().replace("-", "_")


def _cmd_simulate(args) -> None:
    params = ModelParams(args.lam, args.epsilon)
    config = SampleConfig(seed=args.seed, replications=args.samples, parallelism_hint=args.jobs)
    key = _scenario_key(args.scenario)
    order = int(args.n) if args.n else 1
    result = estimate(params, key, args.length, config, cycle_order=order)
    if isinstance(result, np.ndarray):
        rows = [{"index": i, "value": float(v)} for i, v in enumerate(result)]
        _emit(args, "simulate", ["index", "value"], rows)
        return
    rows = [
        {
            "outcome": n,
            "count": result.counts[n],
            "estimate": result.estimate(n),
            "std_error": result.std_error(n),
        }
        for n in result.outcomes()
    ]
    _emit(args, "simulate", ["outcome", "count", "estimate", "std_error"], rows)


def _cmd_compare(args) -> None:
    params = ModelParams(args.lam, args.epsilon)
    config = SampleConfig(seed=args.seed, replications=args.samples, parallelism_hint=args.jobs)
    key = _scenario_key(args.scenario)
    order = int(args.n) if args.n else 1
    result = estimate(params, key, args.length, config, cycle_order=order)
    model = IntervalModel(params, args.length)
    if key == "b_law":
        report = compare_continuous(result, cluster_length_cdf(params))
    elif key == "u_law":
        report = compare_continuous(result, cycle_sum_cdf(params, order))
    else:
        if key == "complete":
            table = pmf_complete_table(model)
        elif key == "incomplete":
            table = pmf_incomplete_table(model)
        elif key == "circle":
            table = pmf_circle_table(model)
        else:  # coverage
            from .component_counts import DistributionTable, coverage_prob

            cov = coverage_prob(model)
            table = DistributionTable(support_max=1, probs=(1.0 - cov, cov), tail_mass=0.0)
        report = compare_pmf(result, table)

    columns = [
        "outcome",
        "analytic",
        "empirical",
        "z",
        "max_abs_z",
        "chi_square",
        "dof",
        "ks",
        "verdict",
    ]
    summary = {
        "max_abs_z": report.max_abs_z,
        "chi_square": report.chi_square,
        "dof": report.dof,
        "ks": "" if report.ks_statistic is None else report.ks_statistic,
        "verdict": report.verdict,
    }
    if report.per_outcome:
        rows = [
            {"outcome": s.outcome, "analytic": s.analytic, "empirical": s.empirical, "z": s.z, **summary}
            for s in report.per_outcome
        ]
    else:
        rows = [{"outcome": "", "analytic": "", "empirical": "", "z": "", **summary}]
    _emit(args, "compare", columns, rows)


def _cmd_sweep(args) -> None:
    grid = _parse_grid(args.lam_grid)
    eps = args.epsilon
    length = args.length
    if args.curve == "pmf":
        ns = _parse_int_list(args.n) if args.n else [0, 1, 2, 3]
        columns = ["lambda"] + [f"p{n}" for n in ns]
        rows = []
        for lam in grid:
            model = IntervalModel(ModelParams(lam, eps), length)
            table = pmf_complete_table(model)
            row = {"lambda": lam}
            for n in ns:
                row[f"p{n}"] = table.probs[n] if n <= table.support_max else 0.0
            rows.append(row)
    else:
        fn = mean_complete if args.curve == "mean" else var_complete
        columns = ["lambda", "value"]
        rows = [
            {"lambda": lam, "value": fn(IntervalModel(ModelParams(lam, eps), length))}
            for lam in grid
        ]
    _emit(args, "sweep", columns, rows)


def _add_common(sub, *, length=False, fmt=True):
    sub.add_argument("--lambda", dest="lam", type=float, required=True, help="Poisson intensity (points per unit length)")
    sub.add_argument("--epsilon", type=float, required=True, help="connection radius (length units)")
    if length:
        sub.add_argument("--length", type=float, required=True, help="domain length / circumference")
    if fmt:
        sub.add_argument("--format", choices=("csv", "json"), default="csv", help="output document format")
        sub.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterline",
        description=(
            "Closed-form cluster statistics of one-dimensional Poisson deployments, "
            "with Monte Carlo validation."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser(
        "pmf",
        help="distribution of the complete-cluster count",
        description="Complete-cluster count distribution. Columns: n, probability.",
    )
    _add_common(sp, length=True)
    sp.set_defaults(handler=lambda a: _cmd_table(a, "pmf"))

    sp = subs.add_parser(
        "incomplete",
        help="distribution of the incomplete-cluster count",
        description="Incomplete-cluster count distribution. Columns: n, probability.",
    )
    _add_common(sp, length=True)
    sp.set_defaults(handler=lambda a: _cmd_table(a, "incomplete"))

    sp = subs.add_parser(
        "circle",
        help="distribution of the cluster count on a circle",
        description="Circle cluster-count distribution. Columns: n, probability.",
    )
    _add_common(sp, length=True)
    sp.set_defaults(handler=lambda a: _cmd_table(a, "circle"))

    sp = subs.add_parser(
        "moments",
        help="raw moments of the complete-cluster count",
        description="First --m raw moments. Columns: m, moment.",
    )
    _add_common(sp, length=True)
    sp.add_argument("--m", type=int, required=True, help="highest moment order")
    sp.set_defaults(handler=_cmd_moments)

    sp = subs.add_parser(
        "coverage",
        help="full-coverage probability",
        description=(
            "Full-coverage probability: authoritative quadrature value next to the "
            "experimental closed-form series. Columns: coverage, closed_form, mismatch."
        ),
    )
    _add_common(sp, length=True)
    sp.set_defaults(handler=_cmd_coverage)

    sp = subs.add_parser(
        "density",
        help="density grid of the span law (B) or cycle-sum law (U)",
        description=(
            "Sampled density grid; for --law B the first row is the atom at the "
            "radius. Columns: kind, x, value."
        ),
    )
    _add_common(sp)
    sp.add_argument("--law", choices=("B", "U"), required=True, help="which law to sample")
    sp.add_argument("--n", default="1", help="cycle count for --law U")
    sp.add_argument("--points", type=int, default=200, help="grid size")
    sp.set_defaults(handler=_cmd_density)

    sp = subs.add_parser(
        "laplace-check",
        help="closed-form vs quadrature transform residuals",
        description=(
            "Count-probability transforms, closed form against adaptive quadrature "
            "for n = 0..3 and s in {0.5, 1, 2}. Columns: n, s, closed, numeric, abs_err."
        ),
    )
    _add_common(sp)
    sp.set_defaults(handler=_cmd_laplace_check)

    sp = subs.add_parser(
        "simulate",
        help="run replications of one scenario",
        description=(
            "Seeded simulation. Count scenarios emit columns outcome, count, "
            "estimate, std_error; b-law/u-law emit the sorted sample as index, value."
        ),
    )
    _add_common(sp, length=True)
    sp.add_argument("--scenario", required=True, help="complete|incomplete|circle|coverage|b-law|u-law")
    sp.add_argument("--samples", type=int, default=100_000, help="replication count")
    sp.add_argument("--seed", type=int, default=0, help="run seed")
    sp.add_argument("--jobs", type=int, default=1, help="parallelism hint (results are identical for any value)")
    sp.add_argument("--n", default=None, help="cycle count for u-law")
    sp.set_defaults(handler=_cmd_simulate)

    sp = subs.add_parser(
        "compare",
        help="simulate and score against the analytic law",
        description=(
            "Simulation scored against the analytic law. Columns: outcome, analytic, "
            "empirical, z, max_abs_z, chi_square, dof, ks, verdict (summary fields "
            "repeat on every row; continuous scenarios emit one summary row)."
        ),
    )
    _add_common(sp, length=True)
    sp.add_argument("--scenario", required=True, help="complete|incomplete|circle|coverage|b-law|u-law")
    sp.add_argument("--samples", type=int, default=100_000, help="replication count")
    sp.add_argument("--seed", type=int, default=0, help="run seed")
    sp.add_argument("--jobs", type=int, default=1, help="parallelism hint (results are identical for any value)")
    sp.add_argument("--n", default=None, help="cycle count for u-law")
    sp.set_defaults(handler=_cmd_compare)

    sp = subs.add_parser(
        "sweep",
        help="curve of mean/var/pmf against intensity (plot-ready figure data)",
        description=(
            "Intensity sweep. Columns: lambda, value for --curve mean/var; "
            "lambda, p<n>... for --curve pmf."
        ),
    )
    sp.add_argument("--curve", choices=("mean", "var", "pmf"), required=True)
    sp.add_argument("--lambda", dest="lam_grid", required=True, help="intensity grid min:max:step (inclusive)")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--length", type=float, required=True)
    sp.add_argument("--n", default=None, help="comma list of counts for --curve pmf (default 0,1,2,3)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(handler=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"clusterline: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
