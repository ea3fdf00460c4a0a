"""Command-line front end.

Thin client over the core package: subcommands parse flags, call the
library, and render reports. Every randomized subcommand either takes
--seed or generates one and announces it on stderr; reports themselves
contain no timestamps, so identical flags and seeds yield byte-identical
output.

Exit codes: 0 success, 1 usage or precondition violation, 2 the run
completed and exposed a finding (lost tasks, invalid hull), 3 hull
construction failure.
"""

from __future__ import annotations

import json
import secrets
import sys
from fractions import Fraction
from typing import Optional

import click

from .formats import PointParseError, parse_points_text
from .geometry.hull import (
    DegenerateInputError,
    HullFailure,
    incremental_hull,
    validate_hull,
)
from .geometry.predicates import (
    Point3,
    orient_base,
    orient_exact,
    orient_majority_detail,
)
from .geometry.search import (
    OrientSearchConfig,
    report_to_json as search_report_to_json,
    search_disagreement,
)
from .geometry.smt import COORD_NAMES, emit_smt
from .rebalance.core import (
    PreconditionError,
    TaskDistribution,
    exact_share_bounds,
    rebalance_float,
    rebalance_int,
    rebalance_rational,
)
from .rebalance.fuzz import (
    FuzzConfig,
    differential_fuzz,
    differential_report_to_json,
    find_float_counterexamples,
    report_to_csv,
    report_to_json as fuzz_report_to_json,
)

SCHEMA_VERSION = 1

_PREDICATE_MAP = {"float": "float_single", "majority": "majority", "exact": "exact"}
_MODE_MAP = {"single": "single_base", "majority": "majority"}


@click.group()
@click.version_option()
def cli() -> None:
    """Stress-test a task rebalancer and a 3D orientation predicate against
    exact arithmetic."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w") as handle:
            handle.write(text)


def _ensure_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    generated = secrets.randbits(64)
    click.echo(f"seed: {generated} (generated; pass --seed to reproduce)", err=True)
    return generated


def _parse_tasks(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        _fail(f"--tasks expects comma-separated integers, got {text!r}")


def _load_points(source: str) -> list[Point3]:
    """Accept a file path, '-' for stdin, or an inline semicolon-separated
    point list like '0,0,0; 1,0,0; 0,1,0; 0,0,1'."""
    if source == "-":
        text = sys.stdin.read()
    elif ";" in source or "\n" in source:
        text = source.replace(";", "\n")
    else:
        try:
            with open(source) as handle:
                text = handle.read()
        except OSError as exc:
            _fail(f"cannot read points from {source!r}: {exc}")
    try:
        coords = parse_points_text(text)
    except PointParseError as exc:
        _fail(str(exc))
    return [Point3(*c) for c in coords]


@cli.command("rebalance")
@click.option("--algo", type=click.Choice(["float", "int", "rational"]), required=True)
@click.option("--tasks", "tasks_text", required=True, help="Comma-separated task counts.")
@click.option("--new-total", type=int, required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
def cmd_rebalance(algo: str, tasks_text: str, new_total: int, fmt: str) -> None:
    """Run one rebalancing step under the chosen semantics."""
    tasks = _parse_tasks(tasks_text)
    try:
        dist = TaskDistribution(tasks)
        if algo == "float":
            out = rebalance_float(dist, new_total)
        elif algo == "int":
            out = rebalance_int(dist, new_total)
        else:
            out = rebalance_rational(dist, new_total)
    except PreconditionError as exc:
        _fail(f"precondition violated: {exc}")

    lost = new_total - out.total
    sum_ok = lost == 0
    bounds = [exact_share_bounds(t, dist.total, new_total) for t in dist.tasks]
    bounds_ok = all(lo <= v <= hi for v, (lo, hi) in zip(out.new_tasks, bounds))
    if isinstance(out.final_rest, Fraction):
        rest_rendered = str(out.final_rest)
    else:
        rest_rendered = out.final_rest.hex()

    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "algo": algo,
            "tasks": list(tasks),
            "new_total": new_total,
            "new_tasks": list(out.new_tasks),
            "sum": out.total,
            "final_rest": rest_rendered,
            "lost": lost,
            "checks": {"sum_ok": sum_ok, "bounds_ok": bounds_ok},
        }
        if not isinstance(out.final_rest, Fraction):
            doc["final_rest_dec"] = repr(out.final_rest)
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo("new_tasks;sum;final_rest;lost;sum_ok;bounds_ok")
        click.echo(
            ";".join(
                (
                    ",".join(str(t) for t in out.new_tasks),
                    str(out.total),
                    rest_rendered,
                    str(lost),
                    str(sum_ok).lower(),
                    str(bounds_ok).lower(),
                )
            )
        )
    if algo == "float" and lost != 0:
        sys.exit(2)


@cli.command("fuzz-rebalance")
@click.option("--seed", type=int, default=None)
@click.option("--iters", type=int, default=1_000_000, show_default=True)
@click.option("--emax", type=int, default=40, show_default=True)
@click.option("--delta", type=int, default=100, show_default=True)
@click.option("--nodes", type=int, default=2, show_default=True)
@click.option("--time-budget", type=float, default=None, help="Seconds.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.option("--jobs", type=int, default=1, envvar="NUMGUARD_JOBS", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option(
    "--differential",
    is_flag=True,
    help="Check the integer rebalancer's contract instead of hunting "
    "floating-point counterexamples.",
)
def cmd_fuzz_rebalance(
    seed, iters, emax, delta, nodes, time_budget, out, jobs, fmt, differential
) -> None:
    """Fuzz the rebalancer over the 2^e + delta input lattice."""
    try:
        config = FuzzConfig(
            seed=_ensure_seed(seed),
            iterations=iters,
            exponent_max=emax,
            delta_bound=delta,
            node_count=nodes,
            time_budget=time_budget,
        )
    except ValueError as exc:
        _fail(str(exc))
    if differential:
        report = differential_fuzz(config, jobs=jobs)
        text = differential_report_to_json(report)
        summary = (
            f"checked {report.iterations_done} inputs, "
            f"{report.violation_count} violations"
        )
    else:
        report = find_float_counterexamples(config, jobs=jobs)
        text = report_to_csv(report) if fmt == "csv" else fuzz_report_to_json(report)
        summary = (
            f"checked {report.iterations_done} inputs, "
            f"{report.found} counterexamples ({report.surplus_count} surplus)"
        )
    _write_output(text, out)
    click.echo(summary, err=True)


@cli.command("orient")
@click.option(
    "--predicate", type=click.Choice(["float", "majority", "exact"]), required=True
)
@click.option("--base", type=click.IntRange(1, 3), default=1, show_default=True)
@click.option("--width", type=click.Choice(["32", "64"]), default="64", show_default=True)
@click.option(
    "--points",
    "points_spec",
    required=True,
    help="Points file, '-' for stdin, or inline 'x,y,z; x,y,z; x,y,z; x,y,z' "
    "(decimal or hex-float fields).",
)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_orient(predicate: str, base: int, width: str, points_spec: str, fmt: str) -> None:
    """Classify the fourth point against the plane of the first three."""
    pts = _load_points(points_spec)
    if len(pts) != 4:
        _fail(f"orient needs exactly 4 points, got {len(pts)}")
    a, b, c, d = pts
    w = int(width)
    exact = orient_exact(a, b, c, d)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "predicate": predicate,
        "float_width": w,
        "exact_sign": exact.value,
    }
    if predicate == "exact":
        sign = exact
    elif predicate == "float":
        sign = orient_base(a, b, c, d, base, w)
        doc["base"] = base
    else:
        detail = orient_majority_detail(a, b, c, d, w)
        sign = detail.sign
        doc["per_base"] = [s.value for s in detail.per_base]
        doc["tie"] = detail.tie
    doc["sign"] = sign.value
    doc["agrees_exact"] = sign == exact

    if fmt == "json":
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo(f"sign: {sign.value}")
        if predicate == "majority":
            click.echo(
                "per-base: "
                + " ".join(s for s in doc["per_base"])
                + (" (tie)" if doc["tie"] else "")
            )
        if predicate != "exact":
            note = "agrees" if sign == exact else "DISAGREES"
            click.echo(f"exact: {exact.value} ({note})")


@cli.command("hull")
@click.option(
    "--predicate", type=click.Choice(["float", "majority", "exact"]), required=True
)
@click.option("--input", "input_spec", required=True, help="Points file or '-' for stdin.")
@click.option(
    "--validate/--no-validate",
    "do_validate",
    default=True,
    show_default=True,
    help="Judge the built hull with the exact-arithmetic checks.",
)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
def cmd_hull(predicate: str, input_spec: str, do_validate: bool, fmt: str) -> None:
    """Build a hull with the chosen predicate; exact validation decides the
    exit code (0 valid, 2 invalid, 3 construction failure)."""
    pts = _load_points(input_spec)
    try:
        outcome = incremental_hull(pts, predicate=_PREDICATE_MAP[predicate])
    except DegenerateInputError as exc:
        _fail(f"degenerate input: {exc}")
    except ValueError as exc:
        _fail(str(exc))

    if isinstance(outcome, HullFailure):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "predicate": predicate,
            "built": False,
            "failure": outcome.to_dict(),
        }
        click.echo(json.dumps(doc, indent=2))
        sys.exit(3)

    doc = {
        "schema_version": SCHEMA_VERSION,
        "predicate": predicate,
        "built": True,
        "vertex_count": len(outcome.vertices),
        "facet_count": len(outcome.facets),
        "facets": [list(f) for f in outcome.facets],
    }
    exit_code = 0
    if do_validate:
        report = validate_hull(pts, outcome)
        doc["validity"] = report.to_dict()
        exit_code = 0 if report.valid else 2
    if fmt == "json":
        click.echo(json.dumps(doc, indent=2))
    else:
        for f in outcome.facets:
            click.echo(f"{f[0]} {f[1]} {f[2]}")
        if do_validate:
            click.echo(f"valid: {doc['validity']['valid']}")
    sys.exit(exit_code)


@cli.command("search-orient")
@click.option(
    "--mode", type=click.Choice(["single", "majority"]), default="single", show_default=True
)
@click.option("--width", type=click.Choice(["32", "64"]), default="64", show_default=True)
@click.option("--emin", type=int, default=0, show_default=True)
@click.option("--emax", type=int, default=0, show_default=True)
@click.option("--ulp-radius", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--iters", type=int, default=100_000, show_default=True)
@click.option("--time-budget", type=float, default=None, help="Seconds.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.option("--jobs", type=int, default=1, envvar="NUMGUARD_JOBS", show_default=True)
@click.option("--max-records", type=int, default=1000, show_default=True)
def cmd_search_orient(
    mode, width, emin, emax, ulp_radius, seed, iters, time_budget, out, jobs, max_records
) -> None:
    """Hunt near-coplanar inputs where floating-point orientation errs."""
    try:
        config = OrientSearchConfig(
            seed=_ensure_seed(seed),
            iterations=iters,
            float_width=int(width),
            e_min=emin,
            e_max=emax,
            ulp_radius=ulp_radius,
            time_budget=time_budget,
            mode=_MODE_MAP[mode],
            max_records=max_records,
        )
    except ValueError as exc:
        _fail(str(exc))
    report = search_disagreement(config, jobs=jobs)
    _write_output(search_report_to_json(report), out)
    s = report.stats
    click.echo(
        f"samples={s.samples} base_errors={s.base_errors} "
        f"one_base_err={s.one_base_err} two_base_err={s.two_base_err} "
        f"majority_err={s.majority_err} found={s.found_total}",
        err=True,
    )


@cli.command("emit-smt")
@click.option("--width", type=click.Choice(["32", "64"]), default="64", show_default=True)
@click.option(
    "--mode", type=click.Choice(["single", "majority"]), default="majority", show_default=True
)
@click.option("--emin", type=int, default=0, show_default=True)
@click.option("--emax", type=int, default=0, show_default=True)
@click.option(
    "--fix",
    "fixes",
    multiple=True,
    help="Pin a coordinate, e.g. --fix ax=1.0 or --fix dz=0x1.8p0 (repeatable).",
)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def cmd_emit_smt(width, mode, emin, emax, fixes, out) -> None:
    """Write the SMT-LIB2 disagreement query for an external solver."""
    fixed = {}
    for item in fixes:
        name, _, value = item.partition("=")
        if not value or name not in COORD_NAMES:
            _fail(f"--fix expects NAME=VALUE with NAME one of {', '.join(COORD_NAMES)}")
        try:
            fixed[name] = float.fromhex(value) if "0x" in value.lower() else float(value)
        except ValueError:
            _fail(f"bad --fix value {value!r}")
    try:
        config = OrientSearchConfig(
            seed=0,
            float_width=int(width),
            e_min=emin,
            e_max=emax,
            mode=_MODE_MAP[mode],
        )
        script = emit_smt(config, fixed=fixed)
    except ValueError as exc:
        _fail(str(exc))
    _write_output(script, out)


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
