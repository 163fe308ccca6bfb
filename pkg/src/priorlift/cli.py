"""Command-line interface.

Subcommands: estimate, subclass, discrete, diagnose, evaluate. Exit codes
discriminate failure classes: 2 data error, 3 estimation/convergence
error, 4 configuration error. All output is deterministic for a fixed
command line (JSON floats carry 17 significant digits, tables 6).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

from .dataset import (
    RECIPES,
    ColumnSpec,
    Dataset,
    LabelRule,
    load_csv,
    load_spec_file,
    partition,
)
from .diagnostics import MARGINAL_THRESHOLD, USEFUL_THRESHOLD, diagnose
from .discrete import estimate_discrete, save_table_csv, tabulate
from .exceptions import (
    ConfigError,
    DataError,
    EstimationError,
    PriorLiftError,
)
from .harness import DEFAULT_REPLICATES, SubsampleConfig, run_grid, smooth_curve
from .logistic import fit_model
from .priors import classical_prior, estimate_prior, variance_reduction
from .serialize import curve_csv_text, dumps_json, render_table
from .subclass import Constraint, Region, classical_subclass, estimate_subclass

__all__ = ["main", "build_parser"]

DEFAULT_GRID = tuple((r, u) for r in (100, 200, 300) for u in (100, 250, 500))

EXIT_DATA = 2
EXIT_ESTIMATION = 3
EXIT_CONFIG = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_io_flags(sub, with_partition=True):
    sub.add_argument("--input", required=True, help="input CSV (header row required)")
    sub.add_argument(
        "--recipe",
        choices=sorted(RECIPES),
        help="named column preset; overrides --feature-cols/--label-col",
    )
    sub.add_argument(
        "--feature-cols", help="comma-separated feature column names"
    )
    sub.add_argument("--label-col", help="label column name")
    sub.add_argument(
        "--transform",
        help="label rule op:value (op in le,lt,ge,gt,eq) mapping labels to binary",
    )
    sub.add_argument(
        "--spec-file",
        help="column spec as key=value lines (features=..., label=..., transform=...)",
    )
    if with_partition:
        sub.add_argument(
            "--labeled-count",
            type=int,
            help="keep labels on a seeded random subset of this size",
        )
        sub.add_argument(
            "--labeled-frac",
            type=float,
            help="keep labels on a seeded random fraction of rows",
        )
    sub.add_argument("--seed", type=int, default=0, help="random seed")
    sub.add_argument("--class-index", type=int, help="restrict output to one class")
    sub.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level")
    sub.add_argument(
        "--format",
        choices=("json", "csv", "table"),
        default="table",
        dest="fmt",
        help="output format",
    )
    sub.add_argument("--output", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="priorlift",
        description="Class prior estimation from labeled plus unlabeled data",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    est = commands.add_parser(
        "estimate", help="semi-supervised and classical prior estimates"
    )
    _add_io_flags(est)

    sub = commands.add_parser(
        "subclass", help="conditional class probability over a feature region"
    )
    _add_io_flags(sub)
    sub.add_argument(
        "--region",
        action="append",
        required=True,
        metavar="IDX:LO:HI",
        help="interval constraint (repeatable; constraints are conjoined); "
        "empty or inf bounds allowed",
    )

    dis = commands.add_parser(
        "discrete", help="exact nonparametric estimate for finite-valued features"
    )
    _add_io_flags(dis)
    dis.add_argument("--table-output", help="write the audit count table CSV here")

    dia = commands.add_parser(
        "diagnose", help="assess the expected benefit of unlabeled data"
    )
    _add_io_flags(dia)
    dia.add_argument(
        "--useful-threshold", type=float, default=USEFUL_THRESHOLD,
        help="sigma at or above this recommends collecting unlabeled data",
    )
    dia.add_argument(
        "--marginal-threshold", type=float, default=MARGINAL_THRESHOLD,
        help="sigma at or above this (but below useful) is marginal",
    )

    ev = commands.add_parser(
        "evaluate", help="subsample MSE-ratio benchmark on a fully labeled CSV"
    )
    _add_io_flags(ev, with_partition=False)
    ev.add_argument(
        "--grid",
        action="append",
        metavar="R:U[,R:U...]",
        help="labeled:unlabeled cell sizes (repeatable or comma separated); "
        "default 100,200,300 x 100,250,500",
    )
    ev.add_argument(
        "--replicates", type=int, default=DEFAULT_REPLICATES, help="subsamples per cell"
    )
    ev.add_argument("--threads", type=int, help="worker threads (PRIOR_LIFT_THREADS caps)")
    ev.add_argument(
        "--smooth-window", type=int, default=1,
        help="odd moving-average window over each fixed-r slice (1 = raw)",
    )
    return parser


# -- shared plumbing ---------------------------------------------------


def _column_spec(args) -> ColumnSpec:
    if args.recipe:
        return RECIPES[args.recipe].spec
    if args.spec_file:
        return load_spec_file(args.spec_file)
    if not args.feature_cols:
        raise ConfigError("one of --recipe, --spec-file, or --feature-cols is required")
    features = tuple(c.strip() for c in args.feature_cols.split(",") if c.strip())
    rule = None
    if args.transform:
        parts = args.transform.split(":", 1)
        if len(parts) != 2:
            raise ConfigError(f"--transform must be op:value, got {args.transform!r}")
        rule = LabelRule(parts[0], parts[1])
    return ColumnSpec(features, args.label_col, rule)


def _load_dataset(args, allow_partition=True) -> Dataset:
    data = load_csv(args.input, _column_spec(args))
    if not allow_partition:
        return data
    count = getattr(args, "labeled_count", None)
    frac = getattr(args, "labeled_frac", None)
    if count is not None and frac is not None:
        raise ConfigError("--labeled-count and --labeled-frac are exclusive")
    if frac is not None:
        if not 0.0 < frac <= 1.0:
            raise ConfigError(f"--labeled-frac {frac} outside (0, 1]")
        count = max(1, round(frac * data.n))
    if count is not None:
        data = partition(data, count, args.seed)
    return data


def _class_indices(args, class_count) -> list[int]:
    if args.class_index is None:
        return list(range(class_count))
    if not 0 <= args.class_index < class_count:
        raise ConfigError(
            f"--class-index {args.class_index} outside [0, {class_count - 1}]"
        )
    return [args.class_index]


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                ""
                if value is None
                else format(value, ".17g")
                if isinstance(value, float)
                else str(value)
                for value in row
            ]
        )
    return buffer.getvalue()


def _parse_bound(text, default):
    text = text.strip()
    if text == "":
        return default
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse region bound {text!r}") from None


def _parse_region(specs) -> Region:
    constraints = []
    for spec in specs:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--region must be IDX:LO:HI, got {spec!r}")
        try:
            index = int(parts[0])
        except ValueError:
            raise ConfigError(f"region feature index {parts[0]!r} not an integer") from None
        lower = _parse_bound(parts[1], -math.inf)
        upper = _parse_bound(parts[2], math.inf)
        constraints.append(Constraint(index, lower, upper))
    return Region(constraints)


def _parse_grid(specs) -> tuple[tuple[int, int], ...]:
    if not specs:
        return DEFAULT_GRID
    cells = []
    for chunk in specs:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            parts = item.split(":")
            if len(parts) != 2:
                raise ConfigError(f"grid cell must be R:U, got {item!r}")
            try:
                cells.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ConfigError(f"grid cell {item!r} not integers") from None
    if not cells:
        raise ConfigError("empty evaluation grid")
    return tuple(cells)


# -- subcommands -------------------------------------------------------


def cmd_estimate(args) -> int:
    data = _load_dataset(args)
    model = fit_model(data)
    rows = []
    for j in _class_indices(args, data.class_count):
        semi = estimate_prior(data, model, j, args.alpha)
        classical = classical_prior(data, j, args.alpha)
        fit = model[j]
        rows.append(
            {
                "class_index": j,
                "class_value": data.class_values[j],
                "semi_supervised": semi.to_dict(),
                "classical": classical.to_dict(),
                "variance_reduction": variance_reduction(semi, data),
                "model": {
                    "converged": fit.converged,
                    "iterations": fit.iterations,
                    "score_norm": fit.score_norm,
                    "separation": fit.separation,
                },
            }
        )
    doc = {
        "command": "estimate",
        "input": args.input,
        "n": data.n,
        "r": data.r,
        "alpha": args.alpha,
        "classes": rows,
    }
    if args.fmt == "json":
        _emit(dumps_json(doc), args.output)
    elif args.fmt == "csv":
        csv_rows = []
        for row in rows:
            for method_key, reduction in (
                ("semi_supervised", row["variance_reduction"]),
                ("classical", None),
            ):
                e = row[method_key]
                csv_rows.append(
                    [
                        row["class_index"],
                        row["class_value"],
                        e["method"],
                        e["q_hat"],
                        e["var_g_term"],
                        e["sandwich_term"],
                        e["avar"],
                        e["std_error"],
                        e["ci"][0],
                        e["ci"][1],
                        reduction,
                    ]
                )
        _emit(
            _csv_text(
                (
                    "class_index",
                    "class_value",
                    "method",
                    "q_hat",
                    "var_g_term",
                    "sandwich_term",
                    "avar",
                    "std_error",
                    "ci_low",
                    "ci_high",
                    "variance_reduction",
                ),
                csv_rows,
            ),
            args.output,
        )
    else:
        table_rows = []
        for row in rows:
            for key in ("semi_supervised", "classical"):
                e = row[key]
                table_rows.append(
                    [
                        row["class_value"],
                        e["method"],
                        e["q_hat"],
                        e["std_error"],
                        e["ci"][0],
                        e["ci"][1],
                        row["variance_reduction"] if key == "semi_supervised" else None,
                    ]
                )
        _emit(
            render_table(
                ("class", "method", "estimate", "std_error", "ci_low", "ci_high", "var_reduction"),
                table_rows,
            ),
            args.output,
        )
    return 0


def cmd_subclass(args) -> int:
    data = _load_dataset(args)
    region = _parse_region(args.region)
    model = fit_model(data)
    rows = []
    for j in _class_indices(args, data.class_count):
        semi = estimate_subclass(data, model, j, region, args.alpha)
        classical = classical_subclass(data, j, region, args.alpha)
        rows.append(
            {
                "class_index": j,
                "class_value": data.class_values[j],
                "semi_supervised": semi.to_dict(),
                "classical": classical.to_dict(),
            }
        )
    doc = {
        "command": "subclass",
        "input": args.input,
        "region": list(args.region),
        "n": data.n,
        "r": data.r,
        "alpha": args.alpha,
        "classes": rows,
    }
    if args.fmt == "json":
        _emit(dumps_json(doc), args.output)
    else:
        table_rows = []
        for row in rows:
            for key in ("semi_supervised", "classical"):
                e = row[key]
                table_rows.append(
                    [
                        row["class_value"],
                        e["method"],
                        e["q_hat_w"],
                        e["p_hat_w"],
                        e["std_error"],
                        e["ci"][0],
                        e["ci"][1],
                    ]
                )
        header = ("class", "method", "q_hat_w", "p_hat_w", "std_error", "ci_low", "ci_high")
        if args.fmt == "csv":
            text = _csv_text(header, table_rows)
        else:
            text = render_table(header, table_rows)
        _emit(text, args.output)
    return 0


def cmd_discrete(args) -> int:
    data = _load_dataset(args)
    table = tabulate(data)
    if args.table_output:
        save_table_csv(table, args.table_output)
    rows = [
        {
            "class_index": j,
            "class_value": data.class_values[j],
            "estimate": estimate_discrete(table, j, args.alpha).to_dict(),
        }
        for j in _class_indices(args, data.class_count)
    ]
    doc = {
        "command": "discrete",
        "input": args.input,
        "n": data.n,
        "r": data.r,
        "distinct_values": table.cell_count,
        "alpha": args.alpha,
        "classes": rows,
    }
    if args.fmt == "json":
        _emit(dumps_json(doc), args.output)
    else:
        table_rows = [
            [
                row["class_value"],
                row["estimate"]["q_hat"],
                row["estimate"]["std_error"],
                row["estimate"]["ci"][0],
                row["estimate"]["ci"][1],
            ]
            for row in rows
        ]
        header = ("class", "q_hat", "std_error", "ci_low", "ci_high")
        if args.fmt == "csv":
            text = _csv_text(header, table_rows)
        else:
            text = render_table(header, table_rows)
        _emit(text, args.output)
    return 0


def cmd_diagnose(args) -> int:
    data = _load_dataset(args)
    model = fit_model(data)
    rows = []
    for j in _class_indices(args, data.class_count):
        report = diagnose(
            data, model, j, args.useful_threshold, args.marginal_threshold
        )
        payload = report.to_dict()
        payload["class_value"] = data.class_values[j]
        rows.append(payload)
    doc = {
        "command": "diagnose",
        "input": args.input,
        "n": data.n,
        "r": data.r,
        "classes": rows,
    }
    if args.fmt == "json":
        _emit(dumps_json(doc), args.output)
    else:
        table_rows = [
            [row["class_value"], row["eta"], row["sigma"], row["recommendation"]]
            for row in rows
        ]
        header = ("class", "eta", "sigma", "recommendation")
        if args.fmt == "csv":
            text = _csv_text(header, table_rows)
        else:
            text = render_table(header, table_rows)
        _emit(text, args.output)
    return 0


def cmd_evaluate(args) -> int:
    data = _load_dataset(args, allow_partition=False)
    if args.class_index is not None:
        indices = _class_indices(args, data.class_count)
        class_index = indices[0]
    else:
        class_index = 1 if data.class_count >= 2 else 0
    config = SubsampleConfig(
        grid=_parse_grid(args.grid),
        replicates=args.replicates,
        seed=args.seed,
    )
    curve = run_grid(data, class_index, config, threads=args.threads)
    if args.smooth_window != 1:
        curve = smooth_curve(curve, args.smooth_window)
    if args.fmt == "json":
        doc = {"command": "evaluate", "input": args.input, **curve.to_dict()}
        _emit(dumps_json(doc), args.output)
    elif args.fmt == "csv":
        _emit(curve_csv_text(curve), args.output)
    else:
        table_rows = [
            [c.r, c.n_minus_r, c.mse_semi, c.mse_classical, c.ratio, c.replicates_used, c.failures]
            for c in curve.cells
        ]
        _emit(
            render_table(
                ("r", "n_minus_r", "mse_semi", "mse_classical", "ratio", "used", "failures"),
                table_rows,
            ),
            args.output,
        )
    return 0


_COMMANDS = {
    "estimate": cmd_estimate,
    "subclass": cmd_subclass,
    "discrete": cmd_discrete,
    "diagnose": cmd_diagnose,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EstimationError as exc:
        print(f"error[estimation]: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PriorLiftError as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
