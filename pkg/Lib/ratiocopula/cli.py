"""Command line interface.

    ratiocopula [--grid N] [--tol T] [--workers W] [--seed S] [-v|-q] COMMAND

Commands:

    analyze SPEC          conditions, G extrema, theta-intervals and validity
    table1                the B1/B2/A3/B3/B4 verdict matrix of the catalog
    counterexample        figure data for the cubic pair and h_1.2
    sample SPEC           draw pairs from a model
    threshold F [G]       parameter value where a condition starts failing

Exit status is 0 on success, 2 when a verdict fails (invalid model, table
mismatch, refused sampling) and 1 on usage or input errors.
"""

import argparse
import json
import logging
import os
import sys
from collections import OrderedDict
from contextlib import contextmanager
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from fontTools.misc.cliTools import makeOutputFileName
from fontTools.misc.loggingTools import Timer, configLogger

from ratiocopula.analysis import (
    closed_form_interval,
    diagonal_G,
    dump_field_csv,
    extremize_G,
    search_feasible_theta,
    theta_interval,
)
from ratiocopula.conditions import (
    check_pair,
    classify_pair,
    find_threshold,
)
from ratiocopula.constants import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_VERDICT,
    TABLE1_COLUMNS,
    TABLE1_EXPECTED,
    TABLE1_ROWS,
    Condition,
)
from ratiocopula.copula import CopulaModel, check_validity, sample
from ratiocopula.errors import DegenerateFieldError, Error, PreconditionError
from ratiocopula.generators import GeneratorSpec, make_generator
from ratiocopula.gridSearch import makeAxis
from ratiocopula.scanSettings import ScanSettings
from ratiocopula.util import _openOutput, formatNumber, writeCSV

logger = logging.getLogger(__name__)

timer = Timer(logging.getLogger("ratiocopula.timer"), level=logging.DEBUG)

CUBIC = "reflected_power(n=3)"
COUNTEREXAMPLE_THETA = -30.0
ENVELOPE_M = 1.2


class UsageError(Error):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors exit with EXIT_ERROR, not argparse's 2
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _flag(value):
    return "T" if value else "F"


@dataclass(frozen=True)
class ReportRow:
    row_id: str
    f_spec: GeneratorSpec
    g_spec: GeneratorSpec
    param_note: str
    verdicts: Mapping[Condition, bool] = field(default_factory=OrderedDict)

    def __post_init__(self):
        if tuple(self.verdicts) != TABLE1_COLUMNS:
            raise ValueError(
                f"verdicts must be keyed by {[str(c) for c in TABLE1_COLUMNS]}"
            )

    def verdictString(self):
        return "".join(_flag(self.verdicts[c]) for c in TABLE1_COLUMNS)

    def mismatches(self, expected):
        return [c for c in TABLE1_COLUMNS if self.verdicts[c] != expected[c]]

    def cells(self):
        return [
            self.row_id,
            str(self.f_spec),
            str(self.g_spec),
            self.param_note,
            *(_flag(self.verdicts[c]) for c in TABLE1_COLUMNS),
        ]


TABLE1_HEADER = ["row", "f", "g", "regime", *(str(c) for c in TABLE1_COLUMNS)]


def evaluate_table1_row(row, s):
    rowId, fText, gText, note, _ = row
    f = make_generator(fText)
    g = f if gText is None else make_generator(gText)
    with timer(f"table row {rowId}"):
        results = check_pair(f, g, s)
    return ReportRow(
        rowId,
        f.spec,
        g.spec,
        note,
        OrderedDict((c, results[c].holds) for c in TABLE1_COLUMNS),
    )


def evaluate_table1(s, rows=TABLE1_ROWS):
    if s.workers > 1:
        # rows in parallel, scans within a row serial
        inner = s.replace(workers=1)
        with ThreadPoolExecutor(max_workers=s.workers) as executor:
            return list(executor.map(lambda r: evaluate_table1_row(r, inner), rows))
    return [evaluate_table1_row(row, s) for row in rows]


def _writeMarkdown(path, header, rows):
    with _openOutput(path) as stream:
        stream.write("| " + " | ".join(header) + " |\n")
        stream.write("|" + "---|" * len(header) + "\n")
        for row in rows:
            stream.write("| " + " | ".join(row) + " |\n")


# -- commands ------------------------------------------------------------------


def cmd_table1(options, s):
    rows = evaluate_table1(s)
    cells = [row.cells() for row in rows]
    if options.format == "markdown":
        _writeMarkdown(options.out, TABLE1_HEADER, cells)
    else:
        writeCSV(options.out, TABLE1_HEADER, cells)
    if options.out not in (None, "-"):
        logger.info("Written on %s", options.out)
    if not options.diff:
        return EXIT_OK
    status = EXIT_OK
    for row in rows:
        bad = row.mismatches(TABLE1_EXPECTED[row.row_id])
        if bad:
            status = EXIT_VERDICT
            logger.error(
                "%s: got %s, expected %s (differs in %s)",
                row.row_id,
                row.verdictString(),
                "".join(_flag(TABLE1_EXPECTED[row.row_id][c]) for c in TABLE1_COLUMNS),
                ", ".join(str(c) for c in bad),
            )
    if status == EXIT_OK:
        logger.info("all %d rows match the expected verdicts", len(rows))
    return status


def analyze_model(model, s):
    """The report of the 'analyze' command as a dict."""
    f, g = model.f, model.g
    results = check_pair(f, g, s)
    report = OrderedDict()
    report["model"] = model.toDict()
    report["resolution"] = s.grid_n
    report["conditions"] = OrderedDict((str(c), r.toDict()) for c, r in results.items())
    report["classification"] = classify_pair(f, g, s, results)
    extrema = extremize_G(f, g, s)
    report["extrema"] = extrema.toDict()
    try:
        report["interval"] = theta_interval(f, g, s, extrema).toDict()
    except DegenerateFieldError as e:
        report["interval"] = None
        report["interval_error"] = str(e)
    if report["classification"] == "iff":
        report["closed_form_interval"] = closed_form_interval(f, g, s).toDict()
    if model.theta is not None:
        validity = check_validity(model, s)
        report["validity"] = validity.toDict()
        if model.theta == 0:
            report["validity"]["note"] += "; independence, density constant 1"
    return report


def _flatten(data, prefix=""):
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            yield from _flatten(value, name + ".")
        elif isinstance(value, (list, tuple)):
            yield name, " ".join(
                x if isinstance(x, str) else formatNumber(x) for x in value
            )
        elif isinstance(value, bool):
            yield name, _flag(value)
        else:
            yield name, value


def cmd_analyze(options, s):
    model = CopulaModel.fromFile(options.spec)
    report = analyze_model(model, s)
    if options.csv:
        writeCSV(options.out, ["quantity", "value"], _flatten(report))
    else:
        with _openOutput(options.out) as stream:
            json.dump(report, stream, indent=2)
            stream.write("\n")
    validity = report.get("validity")
    if validity is not None and not validity["holds"]:
        logger.error(
            "theta=%r is not valid: %s, witness %s",
            model.theta,
            validity.get("note"),
            validity["witness"],
        )
        return EXIT_VERDICT
    return EXIT_OK


def cmd_counterexample(options, s):
    outDir = options.out
    os.makedirs(outDir, exist_ok=True)
    n = options.surface_grid
    f = make_generator(CUBIC)
    written = []

    def path(name):
        written.append(os.path.join(outDir, name))
        return written[-1]

    extrema = extremize_G(f, f, s)

    us = np.union1d(np.linspace(0.0, 1.0, n), [4.0 / 7.0])
    writeCSV(path("cubic_G_diagonal.csv"), ["u", "G"], zip(us, diagonal_G(f, f, us)))

    dump_field_csv(
        path("cubic_L_surface.csv"), f, f, "L", n=n, theta=COUNTEREXAMPLE_THETA
    )

    search = search_feasible_theta(f, f, -1, s, extrema)
    validity = check_validity(CopulaModel(f, f, COUNTEREXAMPLE_THETA), s)
    thetaMin = search.toDict()
    thetaMin.update(
        alpha1=extrema.alpha1,
        inv_alpha1=1.0 / extrema.alpha1,
        alpha2=extrema.alpha2,
        resolution=s.grid_n,
    )
    with open(path("cubic_theta_min.json"), "w", encoding="utf-8") as fp:
        json.dump(thetaMin, fp, indent=2)

    h = make_generator(f"piecewise_hM(M={ENVELOPE_M!r})")
    axis = makeAxis(n, h.kinks)
    values = diagonal_G(h, h, axis.points, axis.sides)
    writeCSV(
        path("hM_G_diagonal.csv"),
        ["u", "side", "G", "boundary_max"],
        (
            (u, int(side), value, ENVELOPE_M)
            for u, side, value in zip(axis.points, axis.sides, values)
        ),
    )
    k = int(np.argmax(values))
    envelopeExtrema = extremize_G(h, h, s)

    summary = OrderedDict(
        cubic=OrderedDict(
            generator=CUBIC,
            alpha1=extrema.alpha1,
            argmin=list(extrema.argmin),
            inv_alpha1=1.0 / extrema.alpha1,
            alpha2=extrema.alpha2,
            theta_min=search.theta,
            bracket=list(search.bracket),
            theta=COUNTEREXAMPLE_THETA,
            valid_at_theta=validity.holds,
            validity_margin=validity.margin,
        ),
        envelope=OrderedDict(
            M=ENVELOPE_M,
            diagonal_max=float(values[k]),
            diagonal_argmax=float(axis.points[k]),
            alpha2=envelopeExtrema.alpha2,
            boundary_max_G=envelopeExtrema.boundary.boundary_max_G,
            interior_max_exceeds_boundary=(
                envelopeExtrema.interior_max_exceeds_boundary
            ),
        ),
        resolution=s.grid_n,
        files=[os.path.basename(p) for p in written],
    )
    with open(path("summary.json"), "w", encoding="utf-8") as fp:
        json.dump(summary, fp, indent=2)
    for p in written:
        logger.info("Written on %s", p)
    return EXIT_OK


def cmd_sample(options, s):
    model = CopulaModel.fromFile(options.spec)
    if model.theta is None:
        raise UsageError(f"{options.spec}: the model has no theta to sample from")
    out = options.out or makeOutputFileName(
        options.spec, suffix="_sample", extension=".csv"
    )
    try:
        batch = sample(model, options.n, s.seed, s)
    except PreconditionError as e:
        logger.error("refusing to sample: %s", e)
        return EXIT_VERDICT
    batch.toCSV(out)
    if out != "-":
        logger.info("Written on %s", out)
    return EXIT_OK


def _withParam(spec, name, value):
    params = dict(spec.params)
    params[name] = value
    return make_generator(GeneratorSpec(spec.family, params))


def cmd_threshold(options, s):
    fSpec = make_generator(options.f).spec
    gSpec = make_generator(options.g).spec if options.g else None
    name, vary = options.param, options.vary

    def make(value):
        if gSpec is None:
            f = _withParam(fSpec, name, value)
            return f, f
        f = _withParam(fSpec, name, value) if vary != "g" else make_generator(fSpec)
        g = _withParam(gSpec, name, value) if vary != "f" else make_generator(gSpec)
        return f, g

    condition = Condition(options.condition)
    crossover = find_threshold(make, condition, options.lo, options.hi, s)
    with _openOutput(options.out) as stream:
        json.dump(
            OrderedDict(
                condition=str(condition),
                param=options.param,
                crossover=crossover,
                width=s.threshold_width,
                lo=options.lo,
                hi=options.hi,
                resolution=s.grid_n,
            ),
            stream,
            indent=2,
        )
        stream.write("\n")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--grid",
        type=int,
        metavar="N",
        default=argparse.SUPPRESS,
        help="grid points per axis (default: $RATIO_COPULA_GRID or 1001)",
    )
    common.add_argument(
        "--tol",
        type=float,
        metavar="TOL",
        default=argparse.SUPPRESS,
        help="verdict tolerance (default: 1e-9)",
    )
    common.add_argument(
        "--workers",
        type=int,
        default=argparse.SUPPRESS,
        help="threads for grid scans and table rows",
    )
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="random seed"
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS
    )
    verbosity.add_argument(
        "-q", "--quiet", action="store_true", default=argparse.SUPPRESS
    )
    return common


def build_parser():
    common = _common()
    parser = _ArgumentParser(
        prog="ratiocopula",
        description="Analyze Separate Ratio-Type Copulas",
        parents=[common],
    )
    commands = parser.add_subparsers(
        dest="command", metavar="COMMAND", parser_class=_ArgumentParser
    )
    commands.required = True

    analyze = commands.add_parser(
        "analyze", parents=[common], help="analyze a model spec"
    )
    analyze.add_argument("spec", metavar="SPEC", help="model spec JSON file")
    fmt = analyze.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV report")
    analyze.add_argument("--out", "-o", metavar="OUTPUT", help="output file name")
    analyze.set_defaults(func=cmd_analyze)

    table1 = commands.add_parser(
        "table1", parents=[common], help="verdict matrix of the catalog"
    )
    table1.add_argument("--out", "-o", metavar="OUTPUT", help="output file name")
    table1.add_argument("--format", choices=("csv", "markdown"), default="csv")
    table1.add_argument(
        "--diff",
        action="store_true",
        help="compare with the expected verdicts, exit 2 on mismatch",
    )
    table1.set_defaults(func=cmd_table1)

    counter = commands.add_parser(
        "counterexample", parents=[common], help="cubic pair and h_M figure data"
    )
    counter.add_argument(
        "--out", "-o", metavar="DIR", default="counterexample", help="output folder"
    )
    counter.add_argument(
        "--surface-grid",
        type=int,
        default=201,
        metavar="N",
        help="points per axis of the exported surfaces",
    )
    counter.set_defaults(func=cmd_counterexample)

    sampler = commands.add_parser(
        "sample", parents=[common], help="sample pairs from a model"
    )
    sampler.add_argument("spec", metavar="SPEC", help="model spec JSON file")
    sampler.add_argument("--n", type=int, default=1000, help="number of pairs")
    sampler.add_argument("--out", "-o", metavar="OUTPUT", help="output CSV file")
    sampler.set_defaults(func=cmd_sample)

    threshold = commands.add_parser(
        "threshold", parents=[common], help="locate a condition's crossover"
    )
    threshold.add_argument("f", metavar="F", help="generator f")
    threshold.add_argument(
        "g", metavar="G", nargs="?", help="generator g (default: g = f)"
    )
    threshold.add_argument("--param", required=True, help="parameter to vary")
    threshold.add_argument(
        "--vary", choices=("f", "g", "both"), default="both", help="which to vary"
    )
    threshold.add_argument("--lo", type=float, required=True)
    threshold.add_argument("--hi", type=float, required=True)
    threshold.add_argument(
        "--condition",
        default="A3",
        choices=[str(c) for c in (*TABLE1_COLUMNS, Condition.A1, Condition.A2)],
    )
    threshold.add_argument("--out", "-o", metavar="OUTPUT", help="output file name")
    threshold.set_defaults(func=cmd_threshold)
    return parser


def settingsFromOptions(options, environ=None):
    kwargs = {}
    for option, name in (
        ("grid", "grid_n"),
        ("tol", "tol_condition"),
        ("workers", "workers"),
        ("seed", "seed"),
    ):
        if hasattr(options, option):
            kwargs[name] = getattr(options, option)
    return ScanSettings.fromEnvironment(environ, **kwargs)


@contextmanager
def _loggingConfigured(level):
    # the package logger is restored on exit, main() may be called repeatedly
    log = logging.getLogger("ratiocopula")
    saved = (list(log.handlers), log.level, log.propagate)
    configLogger(logger=log, level=level)
    try:
        yield
    finally:
        log.handlers[:] = saved[0]
        log.setLevel(saved[1])
        log.propagate = saved[2]


def main(args=None):
    try:
        options = build_parser().parse_args(args)
        if getattr(options, "verbose", False):
            level = "DEBUG"
        elif getattr(options, "quiet", False):
            level = "WARNING"
        else:
            level = "INFO"
        s = settingsFromOptions(options)
        with _loggingConfigured(level):
            return _run(options, s)
    except (Error, OSError, ValueError) as e:
        print(f"ratiocopula: error: {e}", file=sys.stderr)
        return EXIT_ERROR


def _run(options, s):
    try:
        return options.func(options, s)
    except PreconditionError as e:
        logger.error("%s", e)
        return EXIT_VERDICT
    except (Error, OSError, ValueError) as e:
        print(f"ratiocopula: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
