"""conformal-qm CLI entry point."""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import numpy as np
from click.core import ParameterSource
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from conformal_qm import __version__
from conformal_qm.core.result import CSV_DIGITS, SuiteConfig, ToleranceSet, VerificationReport
from conformal_qm.core.units import (
    UNITS_ENV_VAR,
    PhysicalConstants,
    System,
    derive_scales,
    read_key_value_file,
    resolve_units,
)
from conformal_qm.errors import InvalidInputError

console = Console()
err_console = Console(stderr=True)

SYSTEM_CHOICES = ["hydrogen", "oscillator", "all"]
CONFIG_KEYS = ("system", "n", "points", "seed", "tol_analytic", "tol_fd", "units", "format")
# config keys whose option stores under another name
CONFIG_PARAMS = {"format": "fmt"}


@contextmanager
def _usage_errors(param_hint: str | None = None) -> Iterator[None]:
    """Turn invalid input raised by the library into a click usage error (exit 2)."""
    try:
        yield
    except InvalidInputError as exc:
        raise click.BadParameter(str(exc), param_hint=param_hint) from exc


def _configure_logging(verbose: bool) -> None:
    logger = logging.getLogger("conformal_qm")
    logger.handlers = [RichHandler(console=err_console, show_path=False)]
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _constants(ctx: click.Context, units: str | None = None) -> PhysicalConstants:
    spec = ctx.find_root().params["units"] if units is None else units
    with _usage_errors("--units"):
        return resolve_units(spec)


def _parse_triple(value: str, kind: type, option: str) -> tuple[Any, Any, Any]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise click.BadParameter(f"expected three comma-separated values, got {value!r}",
                                 param_hint=option)
    try:
        return kind(parts[0]), kind(parts[1]), kind(parts[2])
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse {value!r}: {exc}", param_hint=option) from exc


def _format_real(value: float) -> str:
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _format_complex(value: complex) -> str:
    sign = "-" if value.imag < 0 else "+"
    return f"{_format_real(value.real)}{sign}{_format_real(abs(value.imag))}i"


def _write(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    try:
        output.write_text(text)
    except OSError as exc:
        raise click.BadParameter(f"cannot write {output}: {exc}", param_hint="--output") from exc


@click.group()
@click.version_option(version=__version__, prog_name="conformal-qm")
@click.option("--units", envvar=UNITS_ENV_VAR, default="atomic", show_default=True,
              help="Unit system: atomic, si or file:<path>")
@click.option("--verbose", "-v", is_flag=True, help="Log every check at DEBUG level")
def main(units: str, verbose: bool) -> None:
    """conformal-qm: numerical verification of isometric conformal maps in quantum mechanics."""
    _configure_logging(verbose)


def _apply_config_file(ctx: click.Context, path: Path, values: dict[str, Any]) -> None:
    """Fill options left at their defaults from a key=value file."""
    with _usage_errors("--config"):
        entries = read_key_value_file(path)
    unknown = sorted(set(entries) - set(CONFIG_KEYS))
    if unknown:
        raise click.BadParameter(f"unknown key(s) {', '.join(unknown)}; allowed: {', '.join(CONFIG_KEYS)}",
                                 param_hint="--config")
    for key, raw in entries.items():
        owner = ctx.find_root() if key == "units" else ctx
        name = CONFIG_PARAMS.get(key, key)
        if owner.get_parameter_source(name) is not ParameterSource.DEFAULT:
            continue
        param = next(p for p in owner.command.params if p.name == name)
        values[key] = param.type_cast_value(owner, raw)


def _requested_states(
    system: str, n: int | None, states: tuple[str, ...],
) -> tuple[list[tuple[int, int, int]], list[tuple[int, int, int]]] | None:
    """Hydrogen and oscillator quantum numbers, or None for the suite defaults."""
    from conformal_qm.core.eigenstates import (
        QuantumNumbers,
        hydrogen_quantum_numbers,
        oscillator_quantum_numbers,
    )

    selected = [System.HYDROGEN, System.OSCILLATOR] if system == "all" else [System(system)]
    if states:
        if len(selected) != 1:
            raise click.UsageError("--state needs --system hydrogen or --system oscillator")
        parsed = [QuantumNumbers(*_parse_triple(s, int, "--state")) for s in states]
        for qn in parsed:
            with _usage_errors("--state"):
                qn.validate(selected[0])
        chosen = [qn.as_tuple() for qn in parsed]
        return (chosen, []) if selected[0] is System.HYDROGEN else ([], chosen)
    if n is None:
        return None
    hydrogen: list[tuple[int, int, int]] = []
    oscillator: list[tuple[int, int, int]] = []
    if System.HYDROGEN in selected:
        if n < 1:
            raise click.BadParameter(f"hydrogen needs principal quantum number n >= 1, got {n}",
                                     param_hint="--n")
        hydrogen = [qn.as_tuple() for qn in hydrogen_quantum_numbers(n)]
    if System.OSCILLATOR in selected:
        if n < 0:
            raise click.BadParameter(f"oscillator needs level 2n_r + l >= 0, got {n}",
                                     param_hint="--n")
        oscillator = [qn.as_tuple() for qn in oscillator_quantum_numbers(n)]
    return hydrogen, oscillator


def _print_report(report: VerificationReport) -> None:
    """Pretty-print a verification report."""
    table = Table(title=f"conformal-qm report: {report.suite}", show_lines=False)
    table.add_column("Check", style="cyan")
    table.add_column("Points", justify="right")
    table.add_column("max_rel", justify="right")
    table.add_column("tol", justify="right")
    table.add_column("Status")

    for check in report.checks:
        status = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.name, str(check.n_points), f"{check.max_rel:.3e}",
                      f"{check.tol:.0e}", status)
    console.print(table)
    style = "green" if report.overall_pass else "red"
    console.print(Panel(f"[bold]{report.summary}[/bold]", style=style))


@main.command()
@click.option("--system", "-s", type=click.Choice(SYSTEM_CHOICES), default="all", show_default=True,
              help="System to verify")
@click.option("--n", "n", type=int, default=None,
              help="Highest hydrogen n, or highest oscillator level 2n_r + l")
@click.option("--state", "states", multiple=True, help="Explicit quantum numbers n,l,k (repeatable)")
@click.option("--points", "-p", type=int, default=200, show_default=True,
              help="Sample points per check")
@click.option("--seed", type=int, default=42, show_default=True, help="Sample cloud seed")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True, help="Report format")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Report file (stdout when omitted)")
@click.option("--tol-analytic", type=float, default=ToleranceSet().analytic, show_default=True,
              help="Tolerance for analytic residuals")
@click.option("--tol-fd", type=float, default=ToleranceSet().fd, show_default=True,
              help="Tolerance for finite-difference cross-checks")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="key=value file with defaults for these options")
@click.option("--corrupt-energy", type=float, default=1.0, hidden=True)
@click.pass_context
def verify(
    ctx: click.Context, system: str, n: int | None, states: tuple[str, ...], points: int,
    seed: int, fmt: str, output: Path | None, tol_analytic: float, tol_fd: float,
    config_path: Path | None, corrupt_energy: float,
) -> None:
    """Run the verification suite and write a JSON or CSV report."""
    from conformal_qm.core.engine import VerificationEngine

    values: dict[str, Any] = {"system": system, "n": n, "points": points, "seed": seed,
                              "format": fmt, "tol_analytic": tol_analytic, "tol_fd": tol_fd,
                              "units": ctx.find_root().params["units"]}
    if config_path is not None:
        _apply_config_file(ctx, config_path, values)

    constants = _constants(ctx, values["units"])
    if values["points"] < 1:
        raise click.BadParameter(f"must be at least 1, got {values['points']}", param_hint="--points")
    requested = _requested_states(values["system"], values["n"], states)
    overrides: dict[str, Any] = {}
    if requested is not None:
        overrides["hydrogen"], overrides["oscillator"] = requested
    elif values["system"] == "hydrogen":
        overrides["oscillator"] = []
    elif values["system"] == "oscillator":
        overrides["hydrogen"] = []

    try:
        tolerances = ToleranceSet(analytic=values["tol_analytic"], fd=values["tol_fd"])
    except ValidationError as exc:
        raise click.BadParameter(str(exc), param_hint="--tol-analytic/--tol-fd") from exc
    config = SuiteConfig(
        name=values["system"], units=values["units"], constants=constants,
        n_points=values["points"], seed=values["seed"], tolerances=tolerances,
        energy_scale=corrupt_energy, **overrides,
    )

    report = VerificationEngine().run_suite(config)
    text = report.to_json() if values["format"] == "json" else report.to_csv()
    _write(text, output)
    if output is not None:
        _print_report(report)
    else:
        err_console.print(f"[bold]{report.summary}[/bold]")
    ctx.exit(0 if report.overall_pass else 1)


@main.command(name="map")
@click.option("--x", "x", default="1,0,0", show_default=True, help="Position x,y,z")
@click.option("--t", "t", type=float, default=0.0, show_default=True, help="Time")
@click.option("--E", "energy", type=float, required=True, help="Map energy E (nonzero)")
@click.option("--b", "b", type=float, default=1.0, show_default=True, help="Length scale b")
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True, help="Map index λ")
@click.pass_context
def map_command(ctx: click.Context, x: str, t: float, energy: float, b: float, lam: float) -> None:
    """Map one spacetime point to (z, s) and back."""
    from conformal_qm.core.conformal import MapParams, map_forward, map_inverse

    position = np.array(_parse_triple(x, float, "--x"))
    hbar = _constants(ctx).hbar
    with _usage_errors():
        p = MapParams(E=energy, b=b, lam=lam, hbar=hbar)
    event = map_forward(position, t, p)
    conjugate = map_forward(position, t, p, conjugate=True)
    back_x, back_t = map_inverse(event, p)
    error = max(float(np.max(np.abs(back_x - position))), abs(back_t - t))
    click.echo(json.dumps({
        "z": list(event.z),
        "s": _format_complex(event.s),
        "s_conjugate": _format_complex(conjugate.s),
        "roundtrip_error": error,
    }, indent=2))


@main.command()
@click.option("--lambda", "lam", default="1", show_default=True, help="Map index λ (e.g. 1, 2, 3/2)")
@click.option("--b", "b", type=float, default=None, help="Length scale b (the system's own by default)")
@click.option("--system", "-s", type=click.Choice(["hydrogen", "oscillator"]), default="hydrogen",
              show_default=True, help="System whose ħ and μ are used")
@click.pass_context
def decompose(ctx: click.Context, lam: str, b: float | None, system: str) -> None:
    """Split the relation for index λ into V(r) and E₀ when it separates."""
    from conformal_qm.checks.ev_relation import decompose_lambda

    with _usage_errors():
        scales = derive_scales(_constants(ctx), system)
    with _usage_errors("--lambda/--b"):
        report = decompose_lambda(lam, scales.b if b is None else b, scales)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a table")
@click.pass_context
def constants(ctx: click.Context, as_json: bool) -> None:
    """Show the selected constants and the derived scales of both systems."""
    values = _constants(ctx)
    with _usage_errors():
        scales = {system: derive_scales(values, system) for system in System}

    if as_json:
        payload: dict[str, Any] = {"constants": values.model_dump(mode="json")}
        for system, derived in scales.items():
            payload[system.value] = derived.model_dump(mode="json", by_alias=True)
        click.echo(json.dumps(payload, indent=2))
        return

    table = Table(title=f"Constants: {values.name}", show_lines=True)
    table.add_column("Name", style="cyan")
    table.add_column("Value", style="green")
    for name, value in values.model_dump().items():
        if name != "name" and value is not None:
            table.add_row(name, f"{value:.10g}")
    console.print(table)

    derived_table = Table(title="Derived scales", show_lines=True)
    derived_table.add_column("Quantity", style="cyan")
    for system in scales:
        derived_table.add_column(system.value, style="green")
    for field in ("alpha0", "b", "lam", "E_ground", "omega"):
        cells = [getattr(derived, field) for derived in scales.values()]
        derived_table.add_row(field, *("-" if c is None else f"{c:.10g}" for c in cells))
    console.print(derived_table)


@main.command(name="plot-data")
@click.option("--system", "-s", type=click.Choice(["hydrogen", "oscillator"]), default="hydrogen",
              show_default=True)
@click.option("--state", default="1,0,0", show_default=True, help="Quantum numbers n,l,k")
@click.option("--r-min", type=float, default=None, help="Grid start (0.01 b by default)")
@click.option("--r-max", type=float, default=None, help="Grid end (12 n b by default)")
@click.option("--points", "-p", type=int, default=200, show_default=True, help="Grid size")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="CSV file (stdout when omitted)")
@click.pass_context
def plot_data(
    ctx: click.Context, system: str, state: str, r_min: float | None, r_max: float | None,
    points: int, output: Path | None,
) -> None:
    """Write R, the transformed radial factor and the radial residual on a uniform grid."""
    from conformal_qm.core.eigenstates import (
        QuantumNumbers,
        make_state,
        radial_residual,
        radial_value,
        transformed_radial,
    )

    qn = QuantumNumbers(*_parse_triple(state, int, "--state"))
    with _usage_errors("--state"):
        scales = derive_scales(_constants(ctx), system)
        eigenstate = make_state(scales, qn)
    lo = 0.01 * scales.b if r_min is None else r_min
    hi = 12.0 * max(qn.n, 1) * scales.b if r_max is None else r_max
    if not 0 < lo < hi:
        raise click.BadParameter(f"grid needs 0 < r-min < r-max, got [{lo}, {hi}]",
                                 param_hint="--r-min/--r-max")
    if points < 2:
        raise click.BadParameter(f"must be at least 2, got {points}", param_hint="--points")

    r = np.linspace(lo, hi, points)
    columns = (r, radial_value(eigenstate, r), transformed_radial(eigenstate, r),
               np.abs(radial_residual(eigenstate, r)))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["r", "R", "R_tilde", "residual"])
    for row in zip(*columns):
        writer.writerow([f"{float(v):.{CSV_DIGITS}g}" for v in row])
    _write(buffer.getvalue(), output)


if __name__ == "__main__":
    main()
