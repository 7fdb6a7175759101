"""Command-line entry point wiring the whole pipeline.

Subcommands: ``curve`` (inspect a curve file), ``ref-gen`` (build a
reference table), ``simulate`` (generate or convert test datasets),
``finedate`` (match measured ages and report indicators), ``evaluate``
(score a test series), ``lookup`` (build/query the quality table),
``hist`` and ``scatter`` (plot-ready data).  Every artifact-producing
run writes a ``*_manifest.txt`` with the effective configuration, and
every CSV starts with a provenance comment block.  Outputs contain no
timestamps: the same configuration and seed reproduce identical bytes.

Exit codes: 0 success, 2 usage, 3 I/O, 4 data.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, csvio
from .calcurve import Measurement, curve_at, load_curve
from .evaluate import (
    average_deviation_analysis,
    evaluate_test_series,
    histogram,
    interval_normality,
    mpd_report,
    overall_aggregate,
    performance_curves,
    read_eval_rows,
    write_eval_rows,
)
from .finedate import (
    INDICATOR_NAMES,
    compute_indicators,
    match_measurements,
    normalize_indicator,
    write_report,
)
from .lookup import build_lookup, query_lookup, read_lookup, write_lookup
from .reftable import (
    RefTableSpec,
    build_combo_table,
    build_reference_table,
    edge_warnings,
    read_table,
    standard_spec,
    write_table,
)
from .simulate import generate_test_datasets, read_tests, write_tests

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4


def parse_date(text: str) -> float:
    """Signed calendar year; '200BC' and 'AD20'/'20AD' accepted."""
    t = text.strip().replace(" ", "")
    upper = t.upper()
    if upper.endswith("BC"):
        return -float(upper[:-2])
    if upper.endswith("AD"):
        return float(upper[:-2])
    if upper.startswith("AD"):
        return float(upper[2:])
    if upper.startswith("BC"):
        return -float(upper[2:])
    return float(t)


def parse_span(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"span must be OLD:YOUNG, got {text!r}")
    return parse_date(parts[0]), parse_date(parts[1])


def parse_date_range(text: str) -> list[float]:
    """START:END:STEP, inclusive of END when it lies on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"dates must be START:END:STEP, got {text!r}")
    start, end = parse_date(parts[0]), parse_date(parts[1])
    step = float(parts[2])
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    dates = []
    d = start
    while d <= end + 1e-9:
        dates.append(round(d, 9))
        d += step
    if not dates:
        raise ValueError(f"empty date range {text!r}")
    return dates


def load_config(path) -> dict[str, str]:
    """Flat ``key = value`` text; later keys win, '#' starts a comment."""
    config: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ValueError(f"bad config line {lineno}: {line.rstrip()!r}")
            key, _, val = text.partition("=")
            config[key.strip()] = val.strip()
    return config


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _effective(
    args: argparse.Namespace, config: dict[str, str], key: str, default=None, attr: str | None = None
):
    """Flag value if given, else config entry, else default."""
    val = getattr(args, attr if attr else key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _require(value, flag: str):
    if value is None:
        raise CliError(EXIT_USAGE, f"usage: missing required option --{flag}")
    return value


def _write_manifest(out_base: Path, subcommand: str, entries: dict) -> str:
    """Write '<base>_manifest.txt' (or 'run_manifest.txt' inside an
    output directory) and return its bare name for CSV headers."""
    if out_base.suffix:
        path = out_base.with_name(out_base.stem + "_manifest.txt")
    else:
        out_base.mkdir(parents=True, exist_ok=True)
        path = out_base / "run_manifest.txt"
    lines = [
        f"tool = finedating {__version__}",
        f"subcommand = {subcommand}",
    ]
    for key, val in entries.items():
        lines.append(f"{key} = {csvio.fmt(val)}")
    csvio.write_lines(path, lines)
    return path.name


def _provenance(subcommand: str, manifest_name: str, seed=None) -> dict:
    prov = {
        "tool": f"finedating {__version__}",
        "subcommand": subcommand,
        "manifest": manifest_name,
    }
    if seed is not None:
        prov["seed"] = seed
    return prov


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finedating",
        description="Simulation-based radiocarbon fine-dating pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"finedating {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="global RNG seed")
    parser.add_argument(
        "--workers", type=int, default=None, help="worker processes (default: all cores)"
    )
    parser.add_argument("--config", default=None, help="flat key = value config file")
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("curve", help="inspect a calibration curve file")
    curve_sub = p.add_subparsers(dest="action")
    info = curve_sub.add_parser("info", help="knot count, domain, interpolated values")
    info.add_argument("file")
    info.add_argument("--at", default=None, help="comma-separated calendar dates")

    p = sub.add_parser("ref-gen", help="build a reference table")
    p.add_argument("--curve", default=None)
    p.add_argument("--label", default=None, help="table name, e.g. 5_20_5")
    p.add_argument("--step", type=int, default=None, help="grid step in years")
    p.add_argument("--per-slice", type=int, default=None, help="measurements per time step")
    p.add_argument("--sd", type=float, default=None)
    p.add_argument("--span", default=None, help="OLD:YOUNG, e.g. -300:20")
    p.add_argument("--combo", default=None, help="comma-separated component labels")
    p.add_argument("--out", default=None)

    p = sub.add_parser("simulate", help="generate or convert test datasets")
    sim_sub = p.add_subparsers(dest="action")
    tests = sim_sub.add_parser("tests", help="simulate clustered test datasets")
    tests.add_argument("--curve", default=None)
    tests.add_argument("--dates", default=None, help="START:END:STEP")
    tests.add_argument("--per-date", type=int, default=None)
    tests.add_argument("--group", type=int, default=None, help="measurements per dataset")
    tests.add_argument("--sd", type=float, default=None)
    tests.add_argument("--out", default=None)
    conv = sim_sub.add_parser("convert", help="cluster an exported simulation CSV")
    conv.add_argument("--in", dest="infile", default=None)
    conv.add_argument("--group", type=int, default=None)
    conv.add_argument("--out", default=None)

    p = sub.add_parser("finedate", help="match measured ages and write the report")
    p.add_argument("--ref", default=None, help="reference table CSV")
    p.add_argument("--ages", default=None, help="comma-separated integer ages BP")
    p.add_argument("--sd", default=None, help="shared sd, or comma-separated per age")
    p.add_argument("--ages-file", default=None, help="CSV with age,sd columns")
    p.add_argument("--out", default=None, help="report path prefix")

    p = sub.add_parser("evaluate", help="score a test series against a table")
    p.add_argument("--ref", default=None)
    p.add_argument("--tests", default=None)
    p.add_argument("--curve", default=None, help="curve file, sharpens the buffer warning")
    p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("lookup", help="indicator-quality lookup table")
    lk_sub = p.add_subparsers(dest="action")
    build = lk_sub.add_parser("build")
    build.add_argument("--eval", dest="eval_file", default=None)
    build.add_argument("--bucket-width", type=float, default=None)
    build.add_argument("--out", default=None)
    query = lk_sub.add_parser("query")
    query.add_argument("--table", default=None)
    query.add_argument("--indicator", default=None)
    query.add_argument("--value", type=float, default=None)

    p = sub.add_parser("hist", help="histogram data from a CSV column or indicator")
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--col", default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("scatter", help="x/y data from CSV columns or indicators")
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--x", dest="xcol", default=None)
    p.add_argument("--y", dest="ycol", default=None)
    p.add_argument("--out", default=None)
    return parser


def _merge_negative_values(argv: list[str]) -> list[str]:
    # argparse reads values like -300:20 or -251 as flags; gluing them to
    # their option with '=' keeps the natural "--span -300:20" syntax.
    merged: list[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (
            token.startswith("--")
            and "=" not in token
            and i + 1 < len(argv)
            and len(argv[i + 1]) > 1
            and argv[i + 1][0] == "-"
            and (argv[i + 1][1].isdigit() or argv[i + 1][1] == ".")
        ):
            merged.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            merged.append(token)
            i += 1
    return merged


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    argv = _merge_negative_values(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(args.config) if args.config else {}
        return _dispatch(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA


def _dispatch(args: argparse.Namespace, config: dict[str, str]) -> int:
    seed = _effective(args, config, "seed")
    seed = int(seed) if seed is not None else 0
    workers = _effective(args, config, "workers")
    workers = int(workers) if workers is not None else (os.cpu_count() or 1)

    if args.subcommand == "curve":
        return _cmd_curve(args, config)
    if args.subcommand == "ref-gen":
        return _cmd_ref_gen(args, config, seed, workers)
    if args.subcommand == "simulate":
        return _cmd_simulate(args, config, seed, workers)
    if args.subcommand == "finedate":
        return _cmd_finedate(args, config)
    if args.subcommand == "evaluate":
        return _cmd_evaluate(args, config)
    if args.subcommand == "lookup":
        return _cmd_lookup(args, config)
    if args.subcommand == "hist":
        return _cmd_hist(args, config)
    if args.subcommand == "scatter":
        return _cmd_scatter(args, config)
    raise CliError(EXIT_USAGE, f"unknown subcommand {args.subcommand!r}")


def _load_curve_arg(path_text: str):
    path = Path(path_text)
    if not path.is_file():
        raise CliError(EXIT_IO, f"io: curve file not found: {path}")
    return load_curve(path, name=path.name)


def _cmd_curve(args, config) -> int:
    if getattr(args, "action", None) != "info":
        raise CliError(EXIT_USAGE, "usage: curve needs the 'info' action")
    curve = _load_curve_arg(args.file)
    lo, hi = curve.domain
    print(f"curve: {curve.name}")
    print(f"knots: {curve.n_knots}")
    print(f"domain: {lo:g} .. {hi:g} (calendar years; negative = BC)")
    at = _effective(args, config, "at")
    if at:
        for token in str(at).split(","):
            date = parse_date(token)
            mu, sig = curve_at(curve, date)
            print(f"at {date:g}: mu={mu:.2f} BP, sigma={sig:.2f}")
    return 0


def _cmd_ref_gen(args, config, seed: int, workers: int) -> int:
    curve = _load_curve_arg(_require(_effective(args, config, "curve"), "curve"))
    out = Path(_require(_effective(args, config, "out"), "out"))
    combo = _effective(args, config, "combo")
    if combo:
        labels = [t.strip() for t in str(combo).split(",") if t.strip()]
        specs = [standard_spec(label, seed + i) for i, label in enumerate(labels)]
        label = _effective(args, config, "label", "Combo")
        table = build_combo_table(curve, specs, label=label, workers=workers)
    else:
        label = _require(_effective(args, config, "label"), "label")
        step = _effective(args, config, "step")
        per_slice = _effective(args, config, "per-slice")
        sd = _effective(args, config, "sd")
        span = _effective(args, config, "span")
        if step is None and per_slice is None and sd is None and span is None:
            spec = standard_spec(label, seed)
        else:
            spec = RefTableSpec(
                label=label,
                year_interval=int(_require(step, "step")),
                per_slice=int(_require(per_slice, "per-slice")),
                sd=float(_require(sd, "sd")),
                span=parse_span(str(_require(span, "span"))),
                seed=seed,
            )
        table = build_reference_table(curve, spec, workers=workers)
    manifest = _write_manifest(
        out,
        "ref-gen",
        {
            "curve": curve.name,
            "label": table.label,
            "seed": seed,
            "records": len(table.records),
            "out": out.name,
        },
    )
    write_table(table, out, extra_header=_provenance("ref-gen", manifest, seed))
    print(f"wrote {out} ({len(table.records)} records)")
    return 0


def _cmd_simulate(args, config, seed: int, workers: int) -> int:
    action = getattr(args, "action", None)
    if action == "tests":
        curve = _load_curve_arg(_require(_effective(args, config, "curve"), "curve"))
        dates = parse_date_range(str(_require(_effective(args, config, "dates"), "dates")))
        per_date = int(_require(_effective(args, config, "per-date"), "per-date"))
        group = int(_effective(args, config, "group", 3))
        sd = float(_require(_effective(args, config, "sd"), "sd"))
        out = Path(_require(_effective(args, config, "out"), "out"))
        datasets = generate_test_datasets(
            curve, dates, per_date, sd=sd, seed=seed, group_size=group, workers=workers
        )
        manifest = _write_manifest(
            out,
            "simulate-tests",
            {
                "curve": curve.name,
                "dates": f"{dates[0]:g}..{dates[-1]:g}",
                "per_date": per_date,
                "group": group,
                "sd": sd,
                "seed": seed,
                "datasets": len(datasets),
                "out": out.name,
            },
        )
        write_tests(
            datasets,
            out,
            extra_header={**_provenance("simulate-tests", manifest, seed), "curve": curve.name},
        )
        print(f"wrote {out} ({len(datasets)} datasets)")
        return 0
    if action == "convert":
        infile = _require(_effective(args, config, "in", attr="infile"), "in")
        group = int(_effective(args, config, "group", 3))
        out = Path(_require(_effective(args, config, "out"), "out"))
        datasets, leftovers = convert_rsim_to_tests(infile, group_size=group)
        manifest = _write_manifest(
            out,
            "simulate-convert",
            {
                "in": Path(str(infile)).name,
                "group": group,
                "datasets": len(datasets),
                "leftover_rows": len(leftovers),
                "out": out.name,
            },
        )
        write_tests(datasets, out, extra_header=_provenance("simulate-convert", manifest))
        for date, count in leftovers:
            print(
                f"warning: {count} leftover row(s) at date {date:g} did not fill a "
                f"group of {group} and were excluded",
                file=sys.stderr,
            )
        print(f"wrote {out} ({len(datasets)} datasets)")
        return 0
    raise CliError(EXIT_USAGE, "usage: simulate needs an action: tests or convert")


def convert_rsim_to_tests(path, group_size: int = 3):
    """Group exported simulation rows (cal_date, age, sd) into
    consecutive clusters of ``group_size`` sharing one calendar date.

    Returns (datasets, leftovers) where leftovers lists (date, count)
    of trailing rows that did not fill a full group.
    """
    from .simulate import SimRecord, TestDataset

    if group_size < 1:
        raise ValueError(f"group_size must be >= 1, got {group_size}")
    meta, columns, rows = csvio.read_commented_csv(path)
    cols = [c.strip().casefold() for c in columns]
    aliases = {
        "cal_date": ("cal_date", "caldate", "original_cal_date", "date", "calendar_date"),
        "age": ("age", "age_bp", "c14_age", "14c_age", "value"),
        "sd": ("sd", "error", "sigma", "uncertainty"),
    }

    def find(kind: str) -> int:
        for alias in aliases[kind]:
            if alias in cols:
                return cols.index(alias)
        raise ValueError(
            f"cannot find a {kind} column in {path}; columns are {columns}"
        )

    ci, ai, si = find("cal_date"), find("age"), find("sd")
    by_date: dict[float, list[tuple[int, float]]] = {}
    order: list[float] = []
    for lineno, cells in enumerate(rows, start=1):
        try:
            date = parse_date(cells[ci])
            age = int(round(float(cells[ai])))
            sd = float(cells[si])
        except (ValueError, IndexError):
            raise ValueError(f"malformed row {lineno} in {path}: {cells}") from None
        if date not in by_date:
            by_date[date] = []
            order.append(date)
        by_date[date].append((age, sd))

    datasets = []
    leftovers: list[tuple[float, int]] = []
    data_id = 0
    sim_id = 0
    for date in order:
        entries = by_date[date]
        n_full = len(entries) // group_size
        for g in range(n_full):
            data_id += 1
            chunk = entries[g * group_size : (g + 1) * group_size]
            sds = {sd for _, sd in chunk}
            sd = chunk[0][1] if len(sds) == 1 else float(sum(s for _, s in chunk) / group_size)
            recs = []
            for age, row_sd in chunk:
                sim_id += 1
                recs.append(
                    SimRecord(
                        sim_id=sim_id,
                        base_date=date,
                        age=age,
                        sd=row_sd,
                        cal_mean=float("nan"),
                        cal_median=float("nan"),
                        cal_sigma=float("nan"),
                    )
                )
            datasets.append(
                TestDataset(data_id=data_id, original_date=date, sd=sd, records=tuple(recs))
            )
        rest = len(entries) - n_full * group_size
        if rest:
            leftovers.append((date, rest))
    return datasets, leftovers


def _parse_measurements(args, config) -> list[Measurement]:
    ages_file = _effective(args, config, "ages-file")
    if ages_file:
        _, columns, rows = csvio.read_commented_csv(ages_file)
        cols = [c.casefold() for c in columns]
        if "age" not in cols or "sd" not in cols:
            raise ValueError(f"ages file {ages_file} needs 'age' and 'sd' columns")
        ai, si = cols.index("age"), cols.index("sd")
        return [Measurement(age=int(r[ai]), sd=float(r[si])) for r in rows]
    ages_text = _require(_effective(args, config, "ages"), "ages")
    ages = [int(t) for t in str(ages_text).split(",") if t.strip()]
    sd_text = str(_require(_effective(args, config, "sd"), "sd"))
    sds = [float(t) for t in sd_text.split(",") if t.strip()]
    if len(sds) == 1:
        sds = sds * len(ages)
    if len(sds) != len(ages):
        raise ValueError(f"{len(ages)} ages but {len(sds)} sd values")
    return [Measurement(age=a, sd=s) for a, s in zip(ages, sds)]


def _cmd_finedate(args, config) -> int:
    table = read_table(_require(_effective(args, config, "ref"), "ref"))
    measurements = _parse_measurements(args, config)
    out = Path(_require(_effective(args, config, "out"), "out"))
    matches = match_measurements(table, measurements)
    indicators = compute_indicators(matches)
    manifest = _write_manifest(
        out,
        "finedate",
        {
            "ref": table.label,
            "ages": ";".join(str(m.age) for m in measurements),
            "matches": matches.n_prime,
            "out": out.name,
        },
    )
    overview, summary = write_report(
        matches, indicators, out, extra_header=_provenance("finedate", manifest)
    )
    for age in matches.unmatched:
        print(f"warning: measured age {age} BP has no match in the table", file=sys.stderr)
    print(f"wrote {overview} and {summary} ({matches.n_prime} matched records)")
    return 0


def _cmd_evaluate(args, config) -> int:
    table = read_table(_require(_effective(args, config, "ref"), "ref"))
    datasets = read_tests(_require(_effective(args, config, "tests"), "tests"))
    if not datasets:
        raise CliError(EXIT_DATA, "data: tests file holds no datasets")
    out_dir = Path(_require(_effective(args, config, "out"), "out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    curve_path = _effective(args, config, "curve")
    curve = _load_curve_arg(str(curve_path)) if curve_path else None
    for warning in edge_warnings(
        table,
        [ds.original_date for ds in datasets],
        curve=curve,
        sd=max(ds.sd for ds in datasets),
    ):
        print(f"warning: {warning}", file=sys.stderr)

    rows = evaluate_test_series(table, datasets)
    manifest = _write_manifest(
        out_dir,
        "evaluate",
        {
            "ref": table.label,
            "tests": len(datasets),
            "rows": len(rows),
            "out": out_dir.name,
        },
    )
    prov = _provenance("evaluate", manifest)
    write_eval_rows(rows, out_dir / "eval_long.csv", extra_header=prov)

    for threshold in (25, 35):
        lines = csvio.header_block({**prov, "threshold": threshold})
        lines.append("original_cal_date,CalDate,Mean,Median")
        fractions = performance_curves(rows, threshold)
        by_date: dict[float, dict[str, float]] = {}
        for date, family, frac in fractions:
            by_date.setdefault(date, {})[family] = frac
        for date in sorted(by_date):
            f = by_date[date]
            lines.append(
                f"{csvio.fmt(date)},{csvio.fmt(f['CalDate'])},"
                f"{csvio.fmt(f['Mean'])},{csvio.fmt(f['Median'])}"
            )
        csvio.write_lines(out_dir / f"performance_{threshold}.csv", lines)

    per_date, full_span = average_deviation_analysis(rows)
    lines = csvio.header_block(prov)
    lines.append("original_cal_date," + ",".join(INDICATOR_NAMES))
    dates = sorted({date for date, _ in per_date})
    for date in dates:
        cells = [csvio.fmt(date)]
        for name in INDICATOR_NAMES:
            cells.append(csvio.fmt(per_date.get((date, name))))
        lines.append(",".join(cells))
    lines.append(
        "full_span," + ",".join(csvio.fmt(full_span[name]) for name in INDICATOR_NAMES)
    )
    csvio.write_lines(out_dir / "avg_deviation.csv", lines)

    lines = csvio.header_block(prov)
    lines.append(
        "original_cal_date,n_ages,ages_statistic,ages_p_value,"
        "n_matched_dates,matched_dates_statistic"
    )
    for item in interval_normality(table, datasets):
        lines.append(
            ",".join(
                csvio.fmt(v)
                for v in (
                    item.original_date,
                    item.n_ages,
                    item.ages_statistic,
                    item.ages_p_value,
                    item.n_matched_dates,
                    item.matched_dates_statistic,
                )
            )
        )
    csvio.write_lines(out_dir / "normality_by_interval.csv", lines)

    results = mpd_report(rows)
    lines = csvio.header_block(prov)
    if results:
        overall_mean, overall_median = overall_aggregate(results)
        lines += csvio.header_block(
            {"overall_mean": overall_mean, "overall_median": overall_median}
        )
    lines.append(
        "data_id,original_cal_date,indicator,value,tolerance,match_count,"
        "under_min,mpd,range,delta"
    )
    # mpd_report walks the rows in order, skipping valueless ones
    it = iter(results)
    for row in rows:
        if row.value is None:
            continue
        res = next(it)
        lines.append(
            ",".join(
                csvio.fmt(v)
                for v in (
                    row.data_id,
                    row.original_date,
                    res.indicator,
                    res.value,
                    res.tolerance,
                    res.match_count,
                    res.under_min,
                    res.mpd,
                    res.value_range,
                    res.delta,
                )
            )
        )
    csvio.write_lines(out_dir / "mpd_report.csv", lines)

    print(f"wrote evaluation artifacts to {out_dir} ({len(rows)} rows)")
    return 0


def _cmd_lookup(args, config) -> int:
    action = getattr(args, "action", None)
    if action == "build":
        rows = read_eval_rows(_require(_effective(args, config, "eval", attr="eval_file"), "eval"))
        width = float(_effective(args, config, "bucket-width", 5.0))
        out = Path(_require(_effective(args, config, "out"), "out"))
        table = build_lookup(rows, bucket_width=width)
        manifest = _write_manifest(
            out,
            "lookup-build",
            {"bucket_width": width, "buckets": len(table.bucket_lefts), "out": out.name},
        )
        write_lookup(table, out, extra_header=_provenance("lookup-build", manifest))
        print(f"wrote {out} ({len(table.bucket_lefts)} buckets)")
        return 0
    if action == "query":
        table = read_lookup(_require(_effective(args, config, "table"), "table"))
        indicator = normalize_indicator(
            str(_require(_effective(args, config, "indicator"), "indicator"))
        )
        value = _require(_effective(args, config, "value"), "value")
        left, count, frac12, frac25 = query_lookup(table, indicator, float(value))
        right = left + table.bucket_width
        print(f"indicator: {indicator}")
        print(f"bucket: [{left:g}, {right:g})")
        print(f"total_count: {count}")
        print(f"frac12: {'' if frac12 is None else f'{frac12:.0f}%'}")
        print(f"frac25: {'' if frac25 is None else f'{frac25:.0f}%'}")
        return 0
    raise CliError(EXIT_USAGE, "usage: lookup needs an action: build or query")


def _column_values(path, column: str) -> list[float]:
    """Numeric values of a CSV column; an indicator name selects the
    matching rows of an evaluation file instead."""
    _, columns, rows = csvio.read_commented_csv(path)
    try:
        name = normalize_indicator(column)
    except ValueError:
        name = None
    if name is not None and "indicator" in columns and "value" in columns:
        ii = columns.index("indicator")
        vi = columns.index("value")
        values = [
            float(cells[vi]) for cells in rows if cells[ii] == name and cells[vi]
        ]
        if not values:
            raise ValueError(f"no rows for indicator {name} in {path}")
        return values
    if column not in columns:
        raise ValueError(f"no column {column!r} in {path}; columns are {columns}")
    ci = columns.index(column)
    values = [float(cells[ci]) for cells in rows if cells[ci]]
    if not values:
        raise ValueError(f"column {column!r} in {path} has no numeric values")
    return values


def _cmd_hist(args, config) -> int:
    infile = _require(_effective(args, config, "in", attr="infile"), "in")
    column = str(_require(_effective(args, config, "col"), "col"))
    out = Path(_require(_effective(args, config, "out"), "out"))
    bins = _effective(args, config, "bins")
    values = _column_values(infile, column)
    edges, counts = histogram(values, bins=int(bins) if bins is not None else None)
    manifest = _write_manifest(
        out, "hist", {"in": Path(str(infile)).name, "col": column, "bins": len(counts)}
    )
    lines = csvio.header_block({**_provenance("hist", manifest), "n": len(values)})
    lines.append("bin_left,bin_right,count")
    for i, count in enumerate(counts):
        lines.append(f"{csvio.fmt(edges[i])},{csvio.fmt(edges[i + 1])},{int(count)}")
    csvio.write_lines(out, lines)
    print(f"wrote {out} ({len(counts)} bins, n={len(values)})")
    return 0


def _cmd_scatter(args, config) -> int:
    infile = _require(_effective(args, config, "in", attr="infile"), "in")
    xcol = str(_require(_effective(args, config, "x", attr="xcol"), "x"))
    ycol = str(_require(_effective(args, config, "y", attr="ycol"), "y"))
    out = Path(_require(_effective(args, config, "out"), "out"))
    _, columns, rows = csvio.read_commented_csv(infile)

    def pick(colname: str) -> list[float]:
        try:
            name = normalize_indicator(colname)
        except ValueError:
            name = None
        if name is not None and "indicator" in columns:
            ii, vi = columns.index("indicator"), columns.index("value")
            return [float(c[vi]) for c in rows if c[ii] == name and c[vi]]
        if colname not in columns:
            raise ValueError(f"no column {colname!r} in {infile}; columns are {columns}")
        ci = columns.index(colname)
        if "indicator" in columns and (ycol not in columns or xcol not in columns):
            # pair the plain column with indicator-filtered rows
            other = ycol if colname == xcol else xcol
            try:
                other_name = normalize_indicator(other)
            except ValueError:
                other_name = None
            if other_name is not None:
                ii = columns.index("indicator")
                return [float(c[ci]) for c in rows if c[ii] == other_name and c[ci]]
        return [float(c[ci]) for c in rows if c[ci]]

    xs, ys = pick(xcol), pick(ycol)
    if len(xs) != len(ys):
        raise ValueError(f"x and y selections differ in length: {len(xs)} vs {len(ys)}")
    manifest = _write_manifest(
        out, "scatter", {"in": Path(str(infile)).name, "x": xcol, "y": ycol, "points": len(xs)}
    )
    lines = csvio.header_block(_provenance("scatter", manifest))
    lines.append(f"{xcol},{ycol}")
    for x, y in zip(xs, ys):
        lines.append(f"{csvio.fmt(x)},{csvio.fmt(y)}")
    csvio.write_lines(out, lines)
    print(f"wrote {out} ({len(xs)} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
