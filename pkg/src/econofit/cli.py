"""``econofit`` command-line front end.

Exit codes: 0 on success, 1 for invalid input (bad files, flags or data),
2 when a fit, path or report cannot be computed. Errors go to stderr as a
single JSON object. Reports are written to a temporary file and renamed
into place, so a failed run never leaves a partial report behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from . import models, ramsey
from .data_model import (
    Kind,
    parse_binned_tables,
    parse_decile_csv,
    parse_decile_csv_lenient,
    parse_macro_csv,
)
from .errors import (
    BatchError,
    DomainError,
    EconofitError,
    FitError,
    ReportError,
)
from .fitting import FitConfig, fit_polynomial
from .macro import TransformConfig, batch_fit, build_report, parse_params_csv
from .transforms import build_growth_points, compute_gini

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2
CURVE_SAMPLES = 200
COUNTRIES = ("fin", "rou", "us")
_COUNTRY_MODEL = {"fin": "fd_ccdf", "rou": "fd_ccdf", "us": "fd_pdf"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output helpers -----------------------------------------------------------


def _clean(obj):
    """Make a report JSON-safe: non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(Path(args.out), text)


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fit_config(args) -> FitConfig:
    return FitConfig(max_iterations=args.max_iterations, multistart=args.multistart)


# -- commands -----------------------------------------------------------------


def _load_fit_inputs(args):
    text = _read(args.input)
    failures = {}
    if args.model == "fd_pdf":
        items = parse_binned_tables(text)
    else:
        items, failures = parse_decile_csv_lenient(text)
        items = [s for s in items if s.kind.value == args.kind]
        if args.variable:
            items = [s for s in items if s.variable.value == args.variable]
    if args.year is not None:
        items = [s for s in items if s.year in args.year]
        failures = {k: v for k, v in failures.items() if k.lstrip("-").isdigit() and int(k) in args.year}
    return items, failures


def cmd_fit(args) -> int:
    items, failures = _load_fit_inputs(args)
    tconf = TransformConfig(args.model, degree=args.degree)
    table = batch_fit(items, args.model, tconf, _fit_config(args), failures)
    if args.format == "csv":
        report = table.to_csv()
    else:
        report = _dump_json(table.to_dict())

    # Plot data for the fitted years, written before the report so a
    # failure here cannot leave a report without its companions.
    if args.out is not None:
        by_year = {item.year: item for item in items}
        point_rows, curve_rows = [], []
        for year, row in table.rows.items():
            points = tconf.points(by_year[year])
            point_rows += [(year, repr(float(x)), repr(float(p))) for x, p in points.points]
            lo, hi = row.fit.x_range
            xs = np.linspace(lo, hi, CURVE_SAMPLES)
            ys = np.atleast_1d(row.fit.predict(xs))
            curve_rows += [(year, repr(float(x)), repr(float(y))) for x, y in zip(xs, ys)]
        _atomic_write(Path(f"{args.out}.points.csv"), _csv_text(["year", "x", "p"], point_rows))
        _atomic_write(Path(f"{args.out}.curve.csv"), _csv_text(["year", "x", "y"], curve_rows))
    _emit(args, report)
    return EXIT_OK


def _price_ratios(path) -> dict[int, float]:
    """Year -> price level from ``year,index`` or ``year,inflation_pct`` CSV.

    Inflation rates are chained into an index starting at 1.
    """
    rows = list(csv.reader(io.StringIO(_read(path))))
    rows = [[c.strip() for c in r] for r in rows if r and any(c.strip() for c in r)]
    if not rows or rows[0][0] != "year" or len(rows[0]) != 2 or rows[0][1] not in ("index", "inflation_pct"):
        raise UsageError("price CSV header must be 'year,index' or 'year,inflation_pct'")
    try:
        pairs = sorted((int(y), float(v)) for y, v in rows[1:])
    except ValueError as exc:
        raise UsageError(f"bad price CSV row: {exc}") from None
    if rows[0][1] == "index":
        return dict(pairs)
    level, out = 1.0, {}
    for i, (year, rate) in enumerate(pairs):
        if i:
            level *= 1.0 + rate / 100.0
        out[year] = level
    return out


def cmd_dynamic(args) -> int:
    series = [s for s in parse_decile_csv(_read(args.input)) if s.kind.value == args.kind]
    if args.variable:
        series = [s for s in series if s.variable.value == args.variable]
    by_year = {s.year: s for s in series}
    if len(by_year) != len(series):
        raise UsageError("input holds more than one series per year; filter with --variable")
    years = sorted(by_year)
    if args.endpoints:
        if len(years) < 2:
            raise UsageError("--endpoints needs at least two years")
        pairs = [(years[0], years[-1])]
    elif args.all_pairs:
        pairs = list(zip(years, years[1:]))
        if not pairs:
            raise UsageError("--all-pairs needs at least two years")
    else:
        if args.base is None or args.later is None:
            raise UsageError("give --base and --later, --all-pairs, or --endpoints")
        for y in (args.base, args.later):
            if y not in by_year:
                raise UsageError(f"year {y} not found in input")
        pairs = [(args.base, args.later)]
    prices = _price_ratios(args.deflate) if args.deflate else None

    entries = []
    for base, later in pairs:
        deflator = None
        if prices is not None:
            if base not in prices or later not in prices:
                raise UsageError(f"price data missing for {base} or {later}")
            deflator = prices[later] / prices[base]
        growth, points = build_growth_points(by_year[base], by_year[later], deflator)
        result = fit_polynomial(points, args.degree)
        entries.append(
            {
                "pair": growth.label,
                "base_year": base,
                "later_year": later,
                "basis": growth.basis,
                "deltas_sorted": list(growth.deltas_sorted),
                "cumulated": list(growth.cumulated),
                "coefficients": dict(zip(result.param_names, result.param_values)),
                "t_values": dict(zip(result.param_names, result.t_values)),
                "r_squared": result.r_squared,
                "durbin_watson": result.durbin_watson,
            }
        )
    if args.format == "csv":
        names = list(entries[0]["coefficients"])
        header = ["pair"]
        for n in names:
            header += [n, f"{n}_t"]
        rows = []
        for e in entries:
            row = [e["pair"]]
            for n in names:
                row += [repr(e["coefficients"][n]), repr(e["t_values"][n])]
            rows.append(row + [repr(100 * e["r_squared"]), repr(e["durbin_watson"])])
        _emit(args, _csv_text(header + ["r_squared_pct", "durbin_watson"], rows))
    else:
        _emit(args, _dump_json({"model": "polynomial", "degree": args.degree, "pairs": entries}))
    return EXIT_OK


def _bundled(name: str) -> str:
    return resources.files("econofit.data").joinpath(name).read_text(encoding="utf-8")


def _parse_mapping(items):
    out = []
    for item in items:
        param, sep, indicator = item.partition(":")
        if not sep or not param or not indicator:
            raise UsageError(f"--map expects param:indicator, got {item!r}")
        out.append((param, indicator))
    return out


def cmd_correlate(args) -> int:
    if args.country:
        params_text = _read(args.params) if args.params else _bundled(f"{args.country}_params.csv")
        macro_text = _read(args.macro) if args.macro else _bundled(f"{args.country}_macro.csv")
        model = args.model or _COUNTRY_MODEL[args.country]
    else:
        if not args.params or not args.macro:
            raise UsageError("--params and --macro are required without --country")
        params_text, macro_text = _read(args.params), _read(args.macro)
        model = args.model or "fd_ccdf"
    table = parse_params_csv(params_text, model)
    macro = parse_macro_csv(macro_text)
    kwargs = {"mapping": _parse_mapping(args.map)} if args.map else {}
    report = build_report(table, macro, label=args.country, **kwargs)
    _emit(args, report.to_csv() if args.format == "csv" else report.to_json())
    return EXIT_OK


def cmd_ramsey(args) -> int:
    family = ramsey.Family(args.family)
    if family is ramsey.Family.POLYNOMIAL:
        u = ramsey.UtilitySpec.polynomial(args.p1, args.p2, args.p3)
    else:
        u = ramsey.UtilitySpec(family, g=args.g, kT=args.kT, mu=args.mu)
    if (args.const is None) == (args.c0 is None):
        raise UsageError("give exactly one of --const or --c0")
    const = args.const
    if const is None:
        const = ramsey.const_from_initial(u, args.beta, args.r, args.t_start, args.c0)
    spec = ramsey.PathSpec(args.beta, args.r, const, args.t_start, args.t_end, args.steps)
    path = ramsey.closed_form_path(u, spec)
    _emit(args, path.to_csv())
    return EXIT_OK


def cmd_gini(args) -> int:
    series = [s for s in parse_decile_csv(_read(args.input)) if s.kind is Kind.MEAN]
    if args.variable:
        series = [s for s in series if s.variable.value == args.variable]
    series.sort(key=lambda s: (s.year, s.variable.value))
    rows = [(s.year, s.variable.value, compute_gini(s)) for s in series]
    if args.format == "csv":
        _emit(args, _csv_text(["year", "variable", "gini"], [(y, v, repr(g)) for y, v, g in rows]))
    else:
        _emit(args, _dump_json({"gini": [{"year": y, "variable": v, "gini": g} for y, v, g in rows]}))
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="econofit", description="Fit income distributions and related models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--in", dest="input", required=True, help="input CSV")
        p.add_argument("--out", help="report path (stdout if omitted)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("fit", help="fit one model to every year of a table")
    common(p)
    p.add_argument("--model", required=True, choices=models.MODEL_IDS)
    p.add_argument("--kind", default="mean", choices=[k.value for k in Kind])
    p.add_argument("--variable")
    p.add_argument("--year", type=int, action="append", help="restrict to a year (repeatable)")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--max-iterations", type=int, default=200)
    p.add_argument("--multistart", action="store_true")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("dynamic", help="polynomial fits of cumulated decile growth")
    common(p)
    p.add_argument("--kind", default="mean", choices=[k.value for k in Kind])
    p.add_argument("--variable")
    p.add_argument("--base", type=int)
    p.add_argument("--later", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all-pairs", action="store_true", help="every consecutive pair of years")
    group.add_argument("--endpoints", action="store_true", help="first year against last year")
    p.add_argument("--deflate", help="price CSV: year,index or year,inflation_pct")
    p.add_argument("--degree", type=int, default=3)
    p.set_defaults(handler=cmd_dynamic)

    p = sub.add_parser("correlate", help="correlate fitted parameters with macro indicators")
    common(p, needs_input=False)
    p.add_argument("--params", help="per-year parameter CSV (year,g,T,mu[,fugacity])")
    p.add_argument("--macro", help="macro CSV (indicator,year,value)")
    p.add_argument("--model", choices=models.MODEL_IDS)
    p.add_argument("--map", action="append", help="param:indicator pairing (repeatable)")
    p.add_argument("--country", choices=COUNTRIES, help="use the bundled published tables")
    p.set_defaults(handler=cmd_correlate)

    p = sub.add_parser("ramsey", help="closed-form consumption path, written as t,c CSV")
    p.add_argument("--out")
    p.add_argument("--family", required=True, choices=[f.value for f in ramsey.Family])
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--const", type=float)
    p.add_argument("--c0", type=float, help="initial consumption instead of --const")
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--p1", type=float, default=1.0)
    p.add_argument("--p2", type=float, default=0.0)
    p.add_argument("--p3", type=float, default=0.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--kT", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.set_defaults(handler=cmd_ramsey)

    p = sub.add_parser("gini", help="Gini coefficient per year from decile means")
    common(p)
    p.add_argument("--variable")
    p.set_defaults(handler=cmd_gini)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    t = getattr(exc, "t", None)
    if t is not None:
        payload["t_star"] = t
    failures = getattr(exc, "failures", None)
    if failures:
        payload["failures"] = {str(k): v for k, v in failures.items()}
    sys.stderr.write(json.dumps(_clean(payload)) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        return _fail(EXIT_INPUT, exc)
    except (FitError, DomainError, BatchError, ReportError) as exc:
        return _fail(EXIT_COMPUTE, exc)
    except (EconofitError, OSError, ValueError) as exc:
        return _fail(EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
