"""Recompute the unit classification of F1-F60 and diff it against the printed table."""

import logging
import multiprocessing
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, model_validator
from rich.table import Table

from .catalog import (
    PARASTROPHE_PAIRS,
    TABLE1_ROWS,
    catalog,
    lookup,
    normalize_label,
    parastrophe_identity,
    parastrophe_partner,
    printed_type,
)
from .evaluator import classify, satisfies
from .fixtures import witness_pool
from .quasigroup import CayleyTable
from .search import DEFAULT_BUDGET, Column, SearchQuery, find, survey
from .terms import cycle_notation, identity_type

logger = logging.getLogger(__name__)

PLUS = "+"
MINUS = "-"
CELL_PATTERN = r"^[+-]$"


class Cells(BaseModel):
    f: str = Field(pattern=CELL_PATTERN)
    e: str = Field(pattern=CELL_PATTERN)
    loop: str = Field(pattern=CELL_PATTERN)
    group: str = Field(pattern=CELL_PATTERN)

    def get(self, column: Column) -> str:
        return getattr(self, column.value)

    def monotone(self) -> bool:
        """group + implies loop + implies f + and e +."""
        if self.group == PLUS and self.loop != PLUS:
            return False
        if self.loop == PLUS and (self.f != PLUS or self.e != PLUS):
            return False
        return True

    def render(self) -> str:
        return " ".join(self.get(column) for column in Column)


class ExpectedRow(BaseModel):
    """One printed row of the classification table."""

    label: str
    abbrev: Optional[str] = None
    identity: str
    cells: Cells
    type: str
    slots: Tuple[int, int]

    @model_validator(mode="after")
    def check_monotone(self) -> "ExpectedRow":
        if not self.cells.monotone():
            raise ValueError(f"{self.label}: printed cells {self.cells.render()} break group => loop => units")
        return self


def expected_rows() -> List[ExpectedRow]:
    """Printed rows in printed order."""
    rows = []
    for label, abbrev, text, f, e, loop, group, kind, slots in TABLE1_ROWS:
        rows.append(ExpectedRow(
            label=label,
            abbrev=abbrev or None,
            identity=text,
            cells=Cells(f=f, e=e, loop=loop, group=group),
            type=kind,
            slots=slots,
        ))
    return rows


class WitnessRef(BaseModel):
    column: Column
    source: str
    order: int
    table: List[List[int]]


class ParastropheCheck(BaseModel):
    expected: str
    computed: Optional[str] = None
    match: bool


class PairCheck(BaseModel):
    first: str
    second: str
    computed: Optional[str] = None
    match: bool


class Discrepancy(BaseModel):
    label: str
    kind: str = Field(description="cell, type, slots, parastrophe, monotonicity or budget")
    detail: str


class RowReport(BaseModel):
    label: str
    identity: str
    abbrev: Optional[str] = None
    expected: Cells
    computed: Cells
    witness: Optional[WitnessRef] = None
    witnesses: Dict[str, WitnessRef] = Field(default_factory=dict)
    exhaustive_orders: List[int] = Field(default_factory=list)
    satisfying_counts: Dict[int, int] = Field(default_factory=dict)
    printed_type: str
    computed_type: str
    type_match: bool
    slot_match: bool
    parastrophe: ParastropheCheck
    budget_exhausted: bool = False


class Table1Report(BaseModel):
    max_exhaustive_order: int
    witness_order_cap: int
    spot_rows: List[str] = Field(default_factory=list)
    spot_order: Optional[int] = None
    rows: List[RowReport] = Field(default_factory=list)
    parastrophe_pairs: List[PairCheck] = Field(default_factory=list)
    discrepancies: List[Discrepancy] = Field(default_factory=list)

    def of_kind(self, *kinds: str) -> List[Discrepancy]:
        return [d for d in self.discrepancies if d.kind in kinds]

    @property
    def cell_discrepancies(self) -> List[Discrepancy]:
        return self.of_kind("cell", "monotonicity", "budget")

    def row(self, label: str) -> RowReport:
        label = normalize_label(label)
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)

    def summary(self) -> str:
        types = sum(row.type_match for row in self.rows)
        slots = sum(row.slot_match for row in self.rows)
        pairs = sum(pair.match for pair in self.parastrophe_pairs)
        return (
            f"{len(self.rows)} rows, {len(self.cell_discrepancies)} unit/loop/group discrepancies, "
            f"types {types}/{len(self.rows)}, slots {slots}/{len(self.rows)}, "
            f"parastrophe pairs {pairs}/{len(self.parastrophe_pairs)}"
        )


def _witness_for(
    label: str,
    column: Column,
    pool: Sequence[Tuple[str, CayleyTable]],
) -> Optional[WitnessRef]:
    identity = lookup(label).identity
    for source, table in pool:
        if not satisfies(table, identity).holds:
            logger.warning(f"{source} table for {label} does not satisfy the identity")
            continue
        if column.counterexample.holds(classify(table)):
            return WitnessRef(column=column, source=source, order=table.order, table=table.rows())
    return None


def verify_row(
    label: str,
    max_exhaustive_order: int = 4,
    witness_order_cap: int = 6,
    extra_orders: Iterable[int] = (),
    budget: int = DEFAULT_BUDGET,
    fixture_dir: Union[str, Path, None] = None,
) -> Tuple[RowReport, List[Discrepancy]]:
    """Recompute one row: witnesses for '-' cells, exhaustive search for '+' cells."""
    entry = lookup(label)
    label = entry.label
    expected = next(row for row in expected_rows() if row.label == label)
    pool = witness_pool(fixture_dir).get(label, [])
    discrepancies: List[Discrepancy] = []

    orders = sorted(set(range(1, max_exhaustive_order + 1)) | set(extra_orders))
    checked = survey(entry.identity, orders, budget=budget)
    if checked.budget_exhausted:
        discrepancies.append(Discrepancy(label=label, kind="budget", detail=f"exhaustive check stopped, orders {checked.exhaustive_orders}"))

    computed: Dict[str, str] = {}
    witnesses: Dict[str, WitnessRef] = {}
    for column in Column:
        witness = _witness_for(label, column, pool)
        if witness is None and checked.refuted(column):
            table = checked.first_counterexample[column]
            witness = WitnessRef(column=column, source="exhaustive", order=table.order, table=table.rows())
        if witness is None and expected.cells.get(column) == MINUS and witness_order_cap > max(orders):
            result = find(SearchQuery(
                identity=label,
                predicate=column.counterexample,
                min_order=max(orders) + 1,
                max_order=witness_order_cap,
                budget=budget,
            ))
            if result.witness is not None and not result.witness.reverify():
                logger.error(f"Search witness for {label} / {column.value} failed re-verification")
            elif result.witness is not None:
                witness = WitnessRef(column=column, source="search", order=result.witness.order, table=result.witness.table)
            elif result.budget_exhausted:
                discrepancies.append(Discrepancy(label=label, kind="budget", detail=f"{column.value} witness search stopped"))
        if witness is not None:
            witnesses[column.value] = witness
        computed[column.value] = MINUS if witness is not None else PLUS
        if computed[column.value] != expected.cells.get(column):
            discrepancies.append(Discrepancy(
                label=label,
                kind="cell",
                detail=f"{column.value}: printed {expected.cells.get(column)}, computed {computed[column.value]}",
            ))

    cells = Cells(**computed)
    if not cells.monotone():
        discrepancies.append(Discrepancy(label=label, kind="monotonicity", detail=f"computed {cells.render()}"))

    kind = identity_type(entry.identity)
    printed = printed_type(label)
    type_match = kind.perms == printed.perms
    slot_match = kind.double_slots == printed.double_slots
    if not type_match:
        discrepancies.append(Discrepancy(label=label, kind="type", detail=f"printed {printed.describe()}, computed {kind.describe()}"))
    if not slot_match:
        discrepancies.append(Discrepancy(
            label=label,
            kind="slots",
            detail=f"printed {set(printed.double_slots)}, computed {set(kind.double_slots)} from {entry.text}",
        ))

    partner = parastrophe_partner(label)
    mirrored = parastrophe_identity(entry.identity).label
    row = RowReport(
        label=label,
        identity=entry.text,
        abbrev=entry.abbrev,
        expected=expected.cells,
        computed=cells,
        witness=next(iter(witnesses.values()), None),
        witnesses=witnesses,
        exhaustive_orders=checked.exhaustive_orders,
        satisfying_counts={o.order: o.satisfying for o in checked.orders},
        printed_type=f"{expected.type} {{{expected.slots[0]},{expected.slots[1]}}}",
        computed_type=f"{cycle_notation(kind.lhs_perm)}={cycle_notation(kind.rhs_perm)} "
                      f"{{{kind.double_slots[0]},{kind.double_slots[1]}}}",
        type_match=type_match,
        slot_match=slot_match,
        parastrophe=ParastropheCheck(expected=partner, computed=mirrored, match=mirrored == partner),
        budget_exhausted=checked.budget_exhausted,
    )
    return row, discrepancies


def _verify_row_task(args: Tuple) -> Tuple[RowReport, List[Discrepancy]]:
    return verify_row(*args)


def check_parastrophe_pairs() -> List[PairCheck]:
    checks = []
    for first, second in PARASTROPHE_PAIRS:
        computed = parastrophe_identity(lookup(first).identity).label
        checks.append(PairCheck(first=first, second=second, computed=computed, match=computed == second))
    return checks


def reproduce_table1(
    max_exhaustive_order: int = 4,
    witness_order_cap: int = 6,
    spot_rows: Iterable[str] = (),
    spot_order: int = 5,
    budget: int = DEFAULT_BUDGET,
    labels: Optional[Iterable[str]] = None,
    threads: int = 1,
    fixture_dir: Union[str, Path, None] = None,
) -> Table1Report:
    """Recompute every requested row and diff it against the printed table.

    Args:
        max_exhaustive_order: '+' cells are checked on every table up to this order (1..5)
        witness_order_cap: Largest order the model finder tries for '-' cells
        spot_rows: Labels additionally checked exhaustively at spot_order
        spot_order: Order for the spot rows
        budget: Node budget for each search
        labels: Restrict to these rows (all 60 by default)
        threads: Worker processes for row verification

    Returns:
        Table1Report: Rows ordered by label, the 32 parastrophe pairs and all discrepancies
    """
    if not 1 <= max_exhaustive_order <= 5:
        raise ValueError(f"max_exhaustive_order must be in 1..5, got {max_exhaustive_order}")
    spot = [normalize_label(label) for label in spot_rows]
    wanted = [normalize_label(label) for label in labels] if labels is not None else [e.label for e in catalog()]
    wanted.sort(key=lambda label: lookup(label).number)

    tasks = [
        (
            label,
            max_exhaustive_order,
            witness_order_cap,
            (spot_order,) if label in spot and spot_order > max_exhaustive_order else (),
            budget,
            fixture_dir,
        )
        for label in wanted
    ]
    if threads > 1:
        with multiprocessing.Pool(processes=threads) as pool:
            results = pool.map(_verify_row_task, tasks)
    else:
        results = [_verify_row_task(task) for task in tasks]

    report = Table1Report(
        max_exhaustive_order=max_exhaustive_order,
        witness_order_cap=witness_order_cap,
        spot_rows=spot,
        spot_order=spot_order if spot else None,
    )
    for row, discrepancies in results:
        report.rows.append(row)
        report.discrepancies.extend(discrepancies)
        logger.debug(f"{row.label}: computed {row.computed.render()}")

    report.parastrophe_pairs = check_parastrophe_pairs()
    for pair in report.parastrophe_pairs:
        if not pair.match:
            report.discrepancies.append(Discrepancy(
                label=pair.first,
                kind="parastrophe",
                detail=f"({pair.first})* printed {pair.second}, computed {pair.computed}",
            ))

    for discrepancy in report.discrepancies:
        logger.warning(f"{discrepancy.label} {discrepancy.kind}: {discrepancy.detail}")
    logger.info(f"Classification reproduced: {report.summary()}")
    return report


def render_table1(report: Table1Report) -> Table:
    """Rich table in the printed row order with '+'/'-' cells."""
    table = Table(title="Units in quasigroups with Bol-Moufang identities")
    for header in ("Label", "Identity", "Abbrev", "f", "e", "Lo.", "Gr.", "Type", "Witnesses", "Notes"):
        table.add_column(header, no_wrap=header in ("Label", "Identity", "Type"))

    by_label = {row.label: row for row in report.rows}
    flagged: Dict[str, List[str]] = {}
    for discrepancy in report.discrepancies:
        flagged.setdefault(discrepancy.label, []).append(discrepancy.kind)

    for label, *_ in TABLE1_ROWS:
        row = by_label.get(label)
        if row is None:
            continue
        cells = []
        for column in Column:
            printed, computed = row.expected.get(column), row.computed.get(column)
            cells.append(computed if printed == computed else f"[red]{computed}≠{printed}[/red]")
        sources = sorted({f"{w.source}@{w.order}" for w in row.witnesses.values()})
        table.add_row(
            row.label,
            row.identity,
            row.abbrev or "-",
            *cells,
            row.computed_type,
            ", ".join(sources),
            ", ".join(flagged.get(label, [])),
        )
    return table


def write_report(report: Table1Report, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2))
    logger.info(f"Report written to {path}")
    return path
