"""Command-line interface.

Subcommands::

    amred build    --fn f2 --spacing 0.05 --seed-point 0,0 --out manifold.csv
    amred fit      --manifold manifold.csv --degree 5 --out model.jsonl
    amred compare  --fn f1 --spacing 0.05 --degree 4 --queries 100 \
                   --seed 42 --folds 8 --out report.csv
    amred ingest   --grad field.csv [--out roundtrip.csv]

Exit codes: 0 on success, 1 on usage errors, 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import __version__
from ._kernels import BACKEND_NAME
from .errors import AmredError
from .functions import builtin_names, get_function
from .geometry import build_gradient_field, write_field_csv
from .harness import (
    ExperimentSpec,
    emit_plot_data,
    ingest_gradient_csv,
    monte_carlo,
    write_report_csv,
)
from .manifold import build_active_manifold, manifold_to_pairs, read_manifold_csv, write_manifold_csv
from .projection import TraversalConfig, write_projection_report
from .surrogate import fit_polynomial, write_surrogate_jsonl

USAGE_EXIT = 1
NUMERIC_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}; expected e.g. 0,0")


def _add_source_args(p):
    p.add_argument("--fn", help=f"builtin function id ({', '.join(builtin_names())})")
    p.add_argument("--grad-csv", help="ingest a gradient-field CSV instead of a builtin")
    p.add_argument("--dim", type=int, help="dimension override for builtins")
    p.add_argument("--spacing", type=float, default=0.05, help="grid pitch (default 0.05)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="amred", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"amred {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="trace an active manifold and export it")
    _add_source_args(b)
    b.add_argument("--seed-point", type=_parse_point, help="trace seed, e.g. 0,0 (default: center)")
    b.add_argument("--step", type=float, help="trace step (default: grid spacing)")
    b.add_argument("--max-steps", type=int, default=10_000)
    b.add_argument("--out", required=True, help="manifold CSV output path")

    f = sub.add_parser("fit", help="fit a polynomial surrogate to a manifold CSV")
    f.add_argument("--manifold", required=True)
    f.add_argument("--degree", type=int, default=5)
    f.add_argument("--out", required=True, help="surrogate JSONL output path")

    c = sub.add_parser("compare", help="run the manifold-vs-subspace error comparison")
    _add_source_args(c)
    c.add_argument("--degree", type=int, default=5, help="surrogate degree (default 5)")
    c.add_argument("--queries", type=int, default=100)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--folds", type=int, default=1)
    c.add_argument("--methods", default="am,as", help="comma list from {am,as}")
    c.add_argument("--seed-point", type=_parse_point)
    c.add_argument("--step", type=float, help="manifold trace step")
    c.add_argument("--eps-hit", type=float, help="hit tolerance (default: spacing)")
    c.add_argument("--delta", type=float, help="traversal step (default: spacing/4)")
    c.add_argument("--max-iters", type=int, help="traversal budget")
    c.add_argument("--drift-tol", type=float, help="allowed |f(p_k) - f(p_0)|")
    c.add_argument("--exact-gradients", action="store_true",
                   help="steer traversals with analytic gradients instead of grid samples")
    c.add_argument("--out", required=True, help="report CSV output path")
    c.add_argument("--plot-data", help="also emit (s, z, fhat) CSV for the manifold")
    c.add_argument("--am-report", help="also emit the per-query projection report CSV")

    i = sub.add_parser("ingest", help="validate (and optionally re-export) a field CSV")
    i.add_argument("--grad", required=True, help="gradient-field CSV to ingest")
    i.add_argument("--out", help="re-export path (round-trip check)")
    return parser


def _load_field(args, parser):
    if bool(args.fn) == bool(args.grad_csv):
        parser.error("exactly one of --fn or --grad-csv is required")
    if args.grad_csv:
        return None, ingest_gradient_csv(args.grad_csv)
    get_function(args.fn)  # fail fast on unknown ids
    return args.fn, None


def _cmd_build(args, parser) -> int:
    fn, field = _load_field(args, parser)
    if field is None:
        field = build_gradient_field(fn, dimension=args.dim, spacing=args.spacing)
    x0 = None if args.seed_point is None else np.asarray(args.seed_point, dtype=float)
    manifold = build_active_manifold(field, x0=x0, step=args.step, max_steps=args.max_steps)
    write_manifold_csv(manifold, args.out)
    print(
        f"manifold: {len(manifold)} points, dim {manifold.dimension}, "
        f"z range [{manifold.values[0]:.6g}, {manifold.values[-1]:.6g}] -> {args.out}"
    )
    return 0


def _cmd_fit(args) -> int:
    manifold = read_manifold_csv(args.manifold)
    model = fit_polynomial(manifold_to_pairs(manifold), args.degree)
    write_surrogate_jsonl(model, args.out)
    print(
        f"fit: degree {model.degree}, residual_rms {model.residual_rms:.6g} -> {args.out}"
    )
    return 0


def _cmd_compare(args, parser) -> int:
    fn, field = _load_field(args, parser)
    methods = tuple(m for m in args.methods.split(",") if m)
    traversal: Optional[TraversalConfig] = None
    if any(v is not None for v in (args.eps_hit, args.delta, args.max_iters, args.drift_tol)):
        # Partial overrides need the derived defaults; build them from a
        # throwaway artifact pass afterwards would be circular, so require
        # the full set when any is given.
        missing = [n for n, v in (
            ("--eps-hit", args.eps_hit), ("--delta", args.delta),
            ("--max-iters", args.max_iters), ("--drift-tol", args.drift_tol),
        ) if v is None]
        if missing:
            parser.error(f"traversal overrides need all four flags; missing {missing}")
        traversal = TraversalConfig(
            eps_hit=args.eps_hit,
            delta=args.delta,
            max_iters=args.max_iters,
            drift_tolerance=args.drift_tol,
        )
    spec = ExperimentSpec(
        function_id=fn,
        dimension=args.dim,
        spacing=args.spacing,
        surrogate_degree=args.degree,
        n_queries=args.queries,
        rng_seed=args.seed,
        methods=methods,
        seed_point=args.seed_point,
        trace_step=args.step,
        traversal=traversal,
        exact_gradients=args.exact_gradients,
    )
    from .harness import build_artifacts, run_fold

    artifacts = build_artifacts(spec, field=field)
    reports = [run_fold(spec, artifacts, fold) for fold in range(args.folds)]
    fold_means = {
        m: float(np.mean([r.summaries[m].mean_abs_error for r in reports]))
        for m in methods
    }
    write_report_csv(args.out, spec, reports, fold_means, artifacts.field.dimension)
    for rep in reports:
        for m in methods:
            s = rep.summaries[m]
            print(
                f"fold {rep.fold} {m}: mean |f - fhat| = {s.mean_abs_error:.6e} "
                f"({s.successes} ok, {s.failures} failed)"
            )
    for m in methods:
        print(f"overall {m}: {fold_means[m]:.6e}")
    print(f"report -> {args.out} (kernel backend: {BACKEND_NAME})")
    if args.plot_data:
        emit_plot_data(artifacts.manifold, artifacts.am_surrogate, args.plot_data)
        print(f"plot data -> {args.plot_data}")
    if args.am_report:
        am_records = [r for r in reports[0].records if r.method == "am"]
        results, truths = _rebuild_projection_rows(spec, artifacts, am_records)
        write_projection_report(args.am_report, results, truths)
        print(f"projection report -> {args.am_report}")
    return 0


def _rebuild_projection_rows(spec, artifacts, am_records):
    """Re-run fold-0 AM traversals to get full ProjectionResult objects."""
    from .errors import TraversalFailed
    from .projection import estimate_at, traverse_to_manifold

    results, truths = [], []
    for rec in am_records:
        try:
            res = traverse_to_manifold(
                artifacts.field, artifacts.manifold, rec.query, config=artifacts.traversal
            )
            estimate_at(artifacts.am_surrogate, res)
        except TraversalFailed as exc:
            res = exc.result
        results.append(res)
        truths.append(rec.truth)
    return results, truths


def _cmd_ingest(args) -> int:
    field = ingest_gradient_csv(args.grad)
    zero = int(np.count_nonzero(field.zero_flags))
    print(
        f"ingested: dim {field.dimension}, spacing {field.spacing:g}, "
        f"{field.n_points} samples, {zero} zero-gradient"
    )
    if args.out:
        write_field_csv(field, args.out)
        print(f"re-exported -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "build":
            return _cmd_build(args, parser)
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "compare":
            return _cmd_compare(args, parser)
        if args.command == "ingest":
            return _cmd_ingest(args)
    except AmredError as exc:
        print(f"amred: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except OSError as exc:
        print(f"amred: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    parser.error(f"unknown command {args.command!r}")
    return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
