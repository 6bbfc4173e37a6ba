"""Command line for Bol-Moufang Lab.

Exit codes: 0 success or identity holds, 1 definite negative answer,
2 usage or input error, 3 search budget exhausted without a decision.
"""

import functools
import json
import logging
import re
from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import ValidationError
from rich.console import Console

from src.core.catalog import UnknownLabel, catalog, catalog_json, parastrophe_identity, resolve_identity
from src.core.config import THREADS_ENV, ConfigManager
from src.core.evaluator import EvaluationError, classify, satisfies
from src.core.fixtures import FixtureError
from src.core.quasigroup import QuasigroupError, load_table
from src.core.report import render_table1, reproduce_table1, write_report
from src.core.search import (
    BudgetExhausted,
    OrderTooLarge,
    Predicate,
    SearchError,
    SearchMode,
    SearchQuery,
    find,
)
from src.core.terms import IdentityError, format_identity, identity_type

logger = logging.getLogger(__name__)

console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

INPUT_ERRORS = (
    QuasigroupError,
    IdentityError,
    EvaluationError,
    FixtureError,
    UnknownLabel,
    OrderTooLarge,
    ValidationError,
    ValueError,
    OSError,
)

_ORDERS = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$")


def handle_errors(command):
    """Map library errors to exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BudgetExhausted as e:
            err_console.print(f"[yellow]{e}[/yellow]")
            raise SystemExit(EXIT_BUDGET)
        except INPUT_ERRORS as e:
            logger.debug(f"Input error: {e!r}")
            err_console.print(f"[red]Error:[/red] {e}", markup=True)
            raise SystemExit(EXIT_INPUT)
        except SearchError as e:
            err_console.print(f"[red]Search failed:[/red] {e}")
            raise SystemExit(EXIT_INPUT)

    return wrapper


def parse_orders(ctx, param, value: Optional[str]) -> Optional[Tuple[int, int]]:
    if value is None:
        return None
    match = _ORDERS.match(value)
    if not match:
        raise click.BadParameter("expected N or A..B")
    low = int(match.group(1))
    high = int(match.group(2) or low)
    if low < 1 or low > high:
        raise click.BadParameter(f"empty or invalid range {value!r}")
    return low, high


def emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


@click.group()
@click.option("--config", "config_path", default="config.json", show_default=True, help="Configuration file")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on the console")
@click.pass_context
def main(ctx, config_path, verbose):
    """Bol-Moufang Lab: quasigroup identities, Cayley tables and the unit classification."""
    manager = ConfigManager(config_path, setup_logging=False)
    manager.setup_logging(verbose=verbose)
    ctx.obj = manager


@main.command()
@click.argument("table_path", type=click.Path())
@click.argument("identity_spec")
@click.option("--json", "as_json", is_flag=True, help="JSON output")
@handle_errors
def check(table_path, identity_spec, as_json):
    """Check IDENTITY_SPEC (label like F7 or inline text) on a Cayley table file."""
    table = load_table(table_path)
    identity = resolve_identity(identity_spec)
    report = satisfies(table, identity)

    if as_json:
        emit_json({
            "identity": identity.label or format_identity(identity),
            "order": table.order,
            **report.model_dump(),
        })
    elif report.holds:
        console.print(f"{identity.label or format_identity(identity)}: holds on order {table.order} "
                      f"({report.assignments_checked} assignments)")
    else:
        values = ", ".join(f"{k}={v}" for k, v in report.failing_assignment.items())
        console.print(f"{identity.label or format_identity(identity)}: fails at {values} "
                      f"(assignment {report.assignments_checked})")
    raise SystemExit(EXIT_OK if report.holds else EXIT_NEGATIVE)


@main.command()
@click.argument("table_path", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="JSON output")
@handle_errors
def units(table_path, as_json):
    """Units, idempotents, loop and group flags of a Cayley table file."""
    profile = classify(load_table(table_path))
    if as_json:
        click.echo(profile.model_dump_json(indent=2))
        return
    console.print(profile.describe())
    if profile.middle_unit is not None:
        console.print(f"middle unit: {profile.middle_unit}")
    console.print(f"idempotents: {profile.idempotents or 'none'}")
    if profile.associativity_witness is not None:
        x, y, z = profile.associativity_witness
        console.print(f"not associative at x={x}, y={y}, z={z}")


@main.command()
@click.option("--identity", "identity_spec", default=None, help="Catalog label or inline identity")
@click.option("--require", "predicate", default="always", show_default=True,
              type=click.Choice([p.value for p in Predicate] + [p.value.replace("_", "-") for p in Predicate]),
              help="Structural predicate the table must meet")
@click.option("--orders", callback=parse_orders, default="1..4", show_default=True, help="Order range A..B")
@click.option("--budget", type=int, default=None, help="Node-expansion limit")
@click.option("--mode", type=click.Choice([m.value for m in SearchMode]), default=SearchMode.FIRST_WITNESS.value,
              show_default=True)
@click.option("--threads", type=int, default=None, envvar=THREADS_ENV, help="Worker processes")
@click.option("--canonical", is_flag=True, help="Keep only relabeling-canonical tables")
@click.option("--out", type=click.Path(), default=None, help="Write the witness table here")
@click.option("--json", "as_json", is_flag=True, help="JSON output")
@click.pass_obj
@handle_errors
def search(manager, identity_spec, predicate, orders, budget, mode, threads, canonical, out, as_json):
    """Find a Cayley table satisfying an identity and a predicate."""
    settings = manager.config.search
    query = SearchQuery(
        identity=identity_spec,
        predicate=predicate,
        min_order=orders[0],
        max_order=orders[1],
        budget=budget or settings.budget,
        mode=mode,
    )
    if query.identity is not None:
        query.resolve()
    result = find(
        query,
        threads=manager.resolve_threads(threads),
        incremental=settings.incremental,
        canonical_filter=canonical or settings.canonical_filter,
        cap=settings.max_order,
    )

    if out and result.witness is not None:
        Path(out).write_text(result.witness.to_text())

    if as_json:
        payload = result.witness.certificate_json() if result.witness is not None else {
            "identity": query.identity,
            "predicate": query.predicate.value,
            "witness": None,
            "outcome": result.outcome,
            "exhaustive_orders": result.exhaustive_orders,
            "nodes_expanded": result.nodes_expanded,
        }
        if query.mode != SearchMode.FIRST_WITNESS:
            payload["counts"] = result.counts
        emit_json(payload)
    elif result.witness is not None:
        console.print(f"witness of order {result.witness.order} ({result.nodes_expanded} nodes)")
        console.print(result.witness.to_text().rstrip())
    else:
        if query.mode != SearchMode.FIRST_WITNESS:
            for order, count in result.counts.items():
                console.print(f"order {order}: {count}")
        console.print(result.outcome)

    if result.budget_exhausted and result.witness is None:
        raise SystemExit(EXIT_BUDGET)
    if query.mode == SearchMode.FIRST_WITNESS and result.witness is None:
        raise SystemExit(EXIT_NEGATIVE)


@main.command()
@click.option("--max-order", type=int, default=None, help="Exhaustive order for '+' cells (1..5)")
@click.option("--witness-cap", type=int, default=None, help="Largest order searched for '-' cells")
@click.option("--spot/--no-spot", default=False, help="Also check the spot rows at the spot order")
@click.option("--out", type=click.Path(), default=None, help="Write the JSON report here")
@click.option("--threads", type=int, default=None, envvar=THREADS_ENV, help="Worker processes")
@click.option("--json", "as_json", is_flag=True, help="JSON output")
@click.pass_obj
@handle_errors
def table1(manager, max_order, witness_cap, spot, out, threads, as_json):
    """Recompute the unit classification of F1-F60 and diff it against the printed table."""
    settings = manager.config.report
    report = reproduce_table1(
        max_exhaustive_order=max_order or settings.max_exhaustive_order,
        witness_order_cap=witness_cap or settings.witness_order_cap,
        spot_rows=settings.spot_rows if spot else (),
        spot_order=settings.spot_order,
        budget=manager.config.search.budget,
        threads=manager.resolve_threads(threads),
        fixture_dir=manager.config.paths.fixtures,
    )
    if out:
        write_report(report, out)

    if as_json:
        click.echo(report.model_dump_json(indent=2))
    else:
        console.print(render_table1(report))
        for discrepancy in report.discrepancies:
            console.print(f"{discrepancy.label} {discrepancy.kind}: {discrepancy.detail}", markup=False)
        console.print(report.summary())

    if report.of_kind("budget"):
        raise SystemExit(EXIT_BUDGET)
    if report.cell_discrepancies:
        raise SystemExit(EXIT_NEGATIVE)


@main.command()
@click.option("--parse", "text", default=None, help="Inline identity")
@click.option("--label", default=None, help="Catalog label, e.g. F17")
@click.option("--type", "show_type", is_flag=True, help="Show the execution-order type")
@click.option("--parastrophe", "show_parastrophe", is_flag=True, help="Show the (12)-parastrophic identity")
@click.option("--json", "as_json", is_flag=True, help="JSON output")
@handle_errors
def identity(text, label, show_type, show_parastrophe, as_json):
    """Analyze one identity given by --parse or --label."""
    if (text is None) == (label is None):
        raise click.UsageError("give exactly one of --parse or --label")
    parsed = resolve_identity(label if label is not None else text)
    if not show_type and not show_parastrophe:
        show_type = show_parastrophe = True

    kind = identity_type(parsed)
    mirrored = parastrophe_identity(parsed)
    name = parsed.label or format_identity(parsed)

    if as_json:
        payload = {"identity": format_identity(parsed), "label": parsed.label}
        if show_type:
            payload["type"] = kind.model_dump()
        if show_parastrophe:
            payload["parastrophe"] = {"identity": format_identity(mirrored), "label": mirrored.label}
        emit_json(payload)
        return

    if show_type:
        console.print(kind.describe())
    if show_parastrophe:
        if mirrored.label is not None and mirrored.label == parsed.label:
            console.print(f"{mirrored.label} (self-dual)")
        elif mirrored.label is not None:
            console.print(f"({name})* = {mirrored.label}: {format_identity(mirrored)}")
        else:
            console.print(f"({name})* = {format_identity(mirrored)}")


@main.command(name="catalog")
@click.option("--json", "as_json", is_flag=True, help="JSON output")
def catalog_command(as_json):
    """List F1-F60."""
    if as_json:
        click.echo(catalog_json())
        return
    for entry in catalog():
        suffix = f"  ({entry.abbrev})" if entry.abbrev else ""
        console.print(f"{entry.label:>4}  {entry.text}{suffix}")


@main.command()
@click.option("--host", default=None, help="Bind address")
@click.option("--port", type=int, default=None, help="Port")
@click.pass_obj
def serve(manager, host, port):
    """Serve the HTTP API with uvicorn."""
    from src.api.server import main as run_server

    run_server(host=host, port=port, config=manager.config)


if __name__ == "__main__":
    main()
