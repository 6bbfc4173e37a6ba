"""Latin-square model finder.

Cells are filled row-major with values in ascending order, so the first
completed table of an order is its lexicographically smallest one; a seeded
random value order turns the same search into a sampler. Row and column
candidates are kept as bitmasks. With an identity attached, every ground
instance whose lookups are all decided is checked after each placement
(incremental mode) or only on completed tables.
"""

import itertools
import logging
import multiprocessing
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .catalog import resolve_identity
from .evaluator import SatReport, UNKNOWN, classify, partial_conflict, satisfies, satisfies_all
from .quasigroup import CayleyTable, UnitProfile, format_table, validate
from .terms import Identity, format_identity

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 8
ORDER_CAP = 7
CACHE_ORDER = 4


class SearchError(Exception):
    """Base exception for model-finder errors."""
    pass


class OrderTooLarge(SearchError):
    def __init__(self, order: int, cap: int):
        super().__init__(f"Order {order} exceeds the enumeration cap {cap}")
        self.order = order
        self.cap = cap


class BudgetExhausted(SearchError):
    def __init__(self, budget: int, order: Optional[int] = None, exhaustive_orders: Iterable[int] = ()):
        where = f" at order {order}" if order is not None else ""
        super().__init__(f"Search budget of {budget} node expansions exhausted{where}")
        self.budget = budget
        self.order = order
        self.exhaustive_orders = list(exhaustive_orders)


class Predicate(str, Enum):
    NO_LEFT_UNIT = "no_left_unit"
    NO_RIGHT_UNIT = "no_right_unit"
    NO_UNIT_EITHER_SIDE = "no_unit_either_side"
    NOT_LOOP = "not_loop"
    NOT_ASSOCIATIVE = "not_associative"
    HAS_LEFT_UNIT = "has_left_unit"
    HAS_RIGHT_UNIT = "has_right_unit"
    ALWAYS = "always"

    @classmethod
    def parse(cls, text: Union[str, "Predicate"]) -> "Predicate":
        if isinstance(text, Predicate):
            return text
        key = text.strip().lower().replace("-", "_")
        if key in ("always(true)", "true"):
            key = "always"
        return cls(key)

    def holds(self, profile: UnitProfile) -> bool:
        checks = {
            Predicate.NO_LEFT_UNIT: not profile.has_left_unit,
            Predicate.NO_RIGHT_UNIT: not profile.has_right_unit,
            Predicate.NO_UNIT_EITHER_SIDE: not profile.has_left_unit and not profile.has_right_unit,
            Predicate.NOT_LOOP: not profile.is_loop,
            Predicate.NOT_ASSOCIATIVE: not profile.is_group,
            Predicate.HAS_LEFT_UNIT: profile.has_left_unit,
            Predicate.HAS_RIGHT_UNIT: profile.has_right_unit,
            Predicate.ALWAYS: True,
        }
        return checks[self]


class Column(str, Enum):
    """Classification columns: left unit, right unit, loop, group."""

    F = "f"
    E = "e"
    LOOP = "loop"
    GROUP = "group"

    @property
    def counterexample(self) -> Predicate:
        return {
            Column.F: Predicate.NO_LEFT_UNIT,
            Column.E: Predicate.NO_RIGHT_UNIT,
            Column.LOOP: Predicate.NOT_LOOP,
            Column.GROUP: Predicate.NOT_ASSOCIATIVE,
        }[self]

    @classmethod
    def parse(cls, text: Union[str, "Column"]) -> "Column":
        if isinstance(text, Column):
            return text
        key = text.strip().lower()
        return {"lo": cls.LOOP, "lo.": cls.LOOP, "gr": cls.GROUP, "gr.": cls.GROUP}.get(key) or cls(key)


class SearchMode(str, Enum):
    FIRST_WITNESS = "first_witness"
    COUNT_ALL = "count_all"
    ENUMERATE_ALL = "enumerate_all"


class SearchQuery(BaseModel):
    identity: Optional[str] = Field(default=None, description="Catalog label or inline identity; none searches plain Latin squares")
    predicate: Predicate = Predicate.ALWAYS
    min_order: int = Field(default=1, ge=1)
    max_order: int = Field(default=ORDER_CAP, ge=1)
    budget: int = Field(default=DEFAULT_BUDGET, gt=0)
    mode: SearchMode = SearchMode.FIRST_WITNESS

    @field_validator("identity", mode="before")
    @classmethod
    def identity_text(cls, value):
        if isinstance(value, Identity):
            return value.label or format_identity(value)
        return value

    @field_validator("predicate", mode="before")
    @classmethod
    def parse_predicate(cls, value):
        return Predicate.parse(value)

    @model_validator(mode="after")
    def check_range(self) -> "SearchQuery":
        if self.min_order > self.max_order:
            raise ValueError(f"empty order range {self.min_order}..{self.max_order}")
        return self

    @property
    def orders(self) -> range:
        return range(self.min_order, self.max_order + 1)

    def resolve(self) -> Optional[Identity]:
        return resolve_identity(self.identity) if self.identity else None


class Certificate(BaseModel):
    sat: Optional[SatReport] = None
    profile: UnitProfile


class Witness(BaseModel):
    """A found table together with what it was found for and its certificate."""

    identity: Optional[str]
    predicate: Predicate
    order: int
    table: List[List[int]]
    certificate: Certificate
    nodes_expanded: int = 0
    exhaustive_orders: List[int] = Field(default_factory=list)
    source: str = "search"

    @classmethod
    def build(cls, table: CayleyTable, identity: Optional[Identity], predicate: Predicate, **extra) -> "Witness":
        sat = satisfies(table, identity) if identity is not None else None
        return cls(
            identity=(identity.label or format_identity(identity)) if identity is not None else None,
            predicate=predicate,
            order=table.order,
            table=table.rows(),
            certificate=Certificate(sat=sat, profile=classify(table)),
            **extra,
        )

    @property
    def cayley(self) -> CayleyTable:
        return validate(self.table)

    def reverify(self) -> bool:
        """Recompute the certificate from the raw table."""
        table = self.cayley
        if self.identity is not None and not satisfies(table, resolve_identity(self.identity)).holds:
            return False
        return self.predicate.holds(classify(table))

    def certificate_json(self) -> Dict:
        profile = self.certificate.profile
        return {
            "identity": self.identity,
            "predicate": self.predicate.value,
            "order": self.order,
            "table": self.table,
            "left_unit": profile.left_unit,
            "right_unit": profile.right_unit,
            "is_group": profile.is_group,
            "nodes_expanded": self.nodes_expanded,
            "exhaustive_orders": self.exhaustive_orders,
        }

    def to_text(self) -> str:
        comment = f"{self.identity or 'latin square'}, {self.predicate.value}, {self.certificate.profile.describe()}"
        return format_table(self.cayley, comment)


class SearchResult(BaseModel):
    query: SearchQuery
    witness: Optional[Witness] = None
    counts: Dict[int, int] = Field(default_factory=dict)
    tables: List[List[List[int]]] = Field(default_factory=list)
    exhaustive_orders: List[int] = Field(default_factory=list)
    nodes_expanded: int = 0
    budget_exhausted: bool = False

    @property
    def found(self) -> bool:
        return self.witness is not None

    @property
    def outcome(self) -> str:
        if self.witness is not None:
            return f"witness of order {self.witness.order}"
        if self.budget_exhausted:
            return "none (budget)"
        return "none (exhaustive)"

    def raise_for_budget(self) -> None:
        if self.budget_exhausted:
            raise BudgetExhausted(self.query.budget, exhaustive_orders=self.exhaustive_orders)


class LatinSquareSearch:
    """Backtracking over one order; iterate to get completed tables.

    Args:
        order: Table order
        identity: Optional identity every yielded table satisfies
        budget: Node-expansion limit (None for unlimited)
        incremental: Prune on partially filled tables
        first_value: Restrict cell (0, 0) to one value
        rng: Try candidate values in random order instead of ascending
    """

    def __init__(
        self,
        order: int,
        identity: Optional[Identity] = None,
        budget: Optional[int] = DEFAULT_BUDGET,
        incremental: bool = True,
        first_value: Optional[int] = None,
        cap: int = ORDER_CAP,
        rng: Optional[np.random.Generator] = None,
    ):
        if order < 1:
            raise ValueError("order must be positive")
        if order > cap:
            raise OrderTooLarge(order, cap)
        self.order = order
        self.identity = identity
        self.budget = budget
        self.incremental = incremental and identity is not None
        self.first_value = first_value
        self.rng = rng
        self.nodes_expanded = 0

    def __iter__(self) -> Iterator[CayleyTable]:
        n = self.order
        self._cells = np.full((n, n), UNKNOWN, dtype=np.int64)
        self._rows = [0] * n
        self._cols = [0] * n
        self._full = (1 << n) - 1
        yield from self._extend(0)

    def _expand(self) -> None:
        if self.budget is not None and self.nodes_expanded >= self.budget:
            raise BudgetExhausted(self.budget, self.order)
        self.nodes_expanded += 1

    def _candidates(self, row: int, col: int) -> int:
        free = self._full & ~(self._rows[row] | self._cols[col])
        if row == 0 and col == 0 and self.first_value is not None:
            free &= 1 << self.first_value
        return free

    def _values(self, free: int) -> List[int]:
        values = []
        while free:
            rest = free & (free - 1)
            values.append((free - rest).bit_length() - 1)
            free = rest
        if self.rng is not None:
            self.rng.shuffle(values)
        return values

    def _extend(self, index: int) -> Iterator[CayleyTable]:
        n = self.order
        if index == n * n:
            if self.identity is not None and not self.incremental:
                if not satisfies(CayleyTable(self._cells), self.identity).holds:
                    return
            yield CayleyTable(self._cells)
            return

        row, col = divmod(index, n)
        for value in self._values(self._candidates(row, col)):
            bit = 1 << value
            self._expand()
            self._cells[row, col] = value
            self._rows[row] |= bit
            self._cols[col] |= bit
            if not self.incremental or not partial_conflict(self.identity, self._cells):
                yield from self._extend(index + 1)
            self._cells[row, col] = UNKNOWN
            self._rows[row] &= ~bit
            self._cols[col] &= ~bit


def random_latin_square(order: int, seed: int, cap: int = ORDER_CAP) -> CayleyTable:
    """First table of a search that tries candidate values in a seeded random order."""
    search = LatinSquareSearch(order, budget=None, cap=cap, rng=np.random.default_rng(seed))
    return next(iter(search))


def enumerate_latin_squares(order: int, cap: int = ORDER_CAP) -> Iterator[CayleyTable]:
    """All Latin squares of an order in row-major lexicographic order."""
    return iter(LatinSquareSearch(order, budget=None, cap=cap))


def naive_latin_squares(order: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Row-by-row generate-and-test over permutations; the independent oracle for small orders."""
    rows = list(itertools.permutations(range(order)))
    squares: List[Tuple[Tuple[int, ...], ...]] = []

    def extend(prefix: List[Tuple[int, ...]]) -> None:
        if len(prefix) == order:
            squares.append(tuple(prefix))
            return
        for row in rows:
            if all(row[c] != other[c] for other in prefix for c in range(order)):
                extend(prefix + [row])

    extend([])
    return squares


@lru_cache(maxsize=None)
def latin_square_stack(order: int) -> np.ndarray:
    """Every Latin square of a small order as one read-only (m, n, n) array."""
    if order > CACHE_ORDER:
        raise OrderTooLarge(order, CACHE_ORDER)
    stack = np.array([table.cells for table in enumerate_latin_squares(order)], dtype=np.int64)
    stack.setflags(write=False)
    logger.debug(f"Cached {len(stack)} Latin squares of order {order}")
    return stack


def latin_squares(order: int) -> List[CayleyTable]:
    return [CayleyTable(cells) for cells in latin_square_stack(order)]


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    differ = np.flatnonzero(a != b)
    return bool(differ.size) and a[differ[0]] < b[differ[0]]


def is_relabeling_canonical(table: CayleyTable) -> bool:
    """True if no renaming of the elements gives a lexicographically smaller table."""
    cells = table.cells
    flat = cells.ravel()
    for perm in itertools.permutations(range(table.order)):
        p = np.array(perm)
        inverse = np.argsort(p)
        relabeled = p[cells[np.ix_(inverse, inverse)]]
        if _lex_less(relabeled.ravel(), flat):
            return False
    return True


@dataclass
class _OrderScan:
    order: int
    first: Optional[List[List[int]]] = None
    count: int = 0
    tables: List[List[List[int]]] = field(default_factory=list)
    nodes: int = 0
    exhausted: bool = False


def _scan_order(
    order: int,
    identity: Optional[Identity],
    predicate: Predicate,
    mode: SearchMode,
    budget: int,
    incremental: bool,
    canonical_filter: bool,
    first_value: Optional[int] = None,
) -> _OrderScan:
    scan = _OrderScan(order)
    search = LatinSquareSearch(order, identity, budget=budget, incremental=incremental, first_value=first_value)
    try:
        for table in search:
            if canonical_filter and not is_relabeling_canonical(table):
                continue
            if not predicate.holds(classify(table)):
                continue
            scan.count += 1
            if scan.first is None:
                scan.first = table.rows()
            if mode == SearchMode.ENUMERATE_ALL:
                scan.tables.append(table.rows())
            if mode == SearchMode.FIRST_WITNESS:
                break
    except BudgetExhausted:
        scan.exhausted = True
    scan.nodes = search.nodes_expanded
    return scan


def _scan_branch(args: Tuple) -> _OrderScan:
    return _scan_order(*args)


def _scan_parallel(order, identity, predicate, mode, budget, incremental, canonical_filter, threads) -> _OrderScan:
    """Split on the value of cell (0, 0) and merge the branches in serial order.

    A serial scan visits the branches one after another, so branch i finishes
    within the budget iff the nodes of branches 0..i add up to at most the
    budget. The merge replays that rule; nodes spent by workers on branches
    the serial scan never reaches are discarded.
    """
    tasks = [(order, identity, predicate, mode, budget, incremental, canonical_filter, value) for value in range(order)]
    with multiprocessing.Pool(processes=min(threads, order)) as pool:
        branches = pool.map(_scan_branch, tasks)

    merged = _OrderScan(order)
    for branch in branches:
        if branch.exhausted or merged.nodes + branch.nodes > budget:
            merged.nodes = budget
            merged.exhausted = True
            break
        merged.nodes += branch.nodes
        merged.count += branch.count
        merged.tables.extend(branch.tables)
        if merged.first is None:
            merged.first = branch.first
        if mode == SearchMode.FIRST_WITNESS and merged.first is not None:
            break
    return merged


def find(
    query: SearchQuery,
    threads: int = 1,
    incremental: bool = True,
    canonical_filter: bool = False,
    cap: int = ORDER_CAP,
) -> SearchResult:
    """Run a search query over its order range.

    In first_witness mode the result holds the lexicographically smallest
    table of the smallest order meeting identity and predicate. Budget
    exhaustion is recorded on the result, never raised; use
    `SearchResult.raise_for_budget` to turn it into BudgetExhausted.
    """
    if query.max_order > cap:
        raise OrderTooLarge(query.max_order, cap)
    identity = query.resolve()
    result = SearchResult(query=query)
    remaining = query.budget

    for order in query.orders:
        args = (order, identity, query.predicate, query.mode, remaining, incremental, canonical_filter)
        if threads > 1 and order > 1:
            scan = _scan_parallel(*args, threads)
        else:
            scan = _scan_order(*args)
        result.nodes_expanded += scan.nodes
        remaining = max(remaining - scan.nodes, 0)

        if query.mode == SearchMode.FIRST_WITNESS and scan.first is not None:
            result.witness = Witness.build(
                validate(scan.first),
                identity,
                query.predicate,
                nodes_expanded=result.nodes_expanded,
                exhaustive_orders=list(result.exhaustive_orders),
            )
            logger.info(f"Witness for {query.identity or 'latin squares'} / {query.predicate.value} at order {order}")
            break
        if scan.exhausted:
            result.budget_exhausted = True
            logger.warning(f"Budget of {query.budget} exhausted at order {order}")
            break
        result.counts[order] = scan.count
        result.tables.extend(scan.tables)
        result.exhaustive_orders.append(order)
        logger.debug(f"Order {order}: {scan.count} matches, {scan.nodes} nodes")

    return result


class OrderSurvey(BaseModel):
    order: int
    satisfying: int = 0
    counterexamples: Dict[Column, int] = Field(default_factory=dict)
    exhaustive: bool = True
    nodes_expanded: int = 0


@dataclass
class Survey:
    """Every satisfying table of each order, classified once for all four columns."""

    identity: Identity
    orders: List[OrderSurvey] = field(default_factory=list)
    first_counterexample: Dict[Column, CayleyTable] = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def exhaustive_orders(self) -> List[int]:
        return [entry.order for entry in self.orders if entry.exhaustive]

    def refuted(self, column: Column) -> bool:
        return column in self.first_counterexample


def _classify_into(entry: OrderSurvey, survey: Survey, table: CayleyTable) -> None:
    profile = classify(table)
    entry.satisfying += 1
    for column in Column:
        if column.counterexample.holds(profile):
            entry.counterexamples[column] = entry.counterexamples.get(column, 0) + 1
            survey.first_counterexample.setdefault(column, table)


def survey(
    identity: Identity,
    orders: Iterable[int],
    budget: int = DEFAULT_BUDGET,
    incremental: bool = True,
) -> Survey:
    """Enumerate every satisfying table of the given orders and classify it."""
    result = Survey(identity)
    remaining = budget
    for order in orders:
        entry = OrderSurvey(order=order)
        if order <= CACHE_ORDER:
            stack = latin_square_stack(order)
            for index in np.flatnonzero(satisfies_all(stack, identity)):
                _classify_into(entry, result, CayleyTable(stack[index]))
        else:
            search = LatinSquareSearch(order, identity, budget=remaining, incremental=incremental)
            try:
                for table in search:
                    _classify_into(entry, result, table)
            except BudgetExhausted:
                entry.exhaustive = False
                result.budget_exhausted = True
            entry.nodes_expanded = search.nodes_expanded
            remaining = max(remaining - search.nodes_expanded, 0)
        result.orders.append(entry)
        logger.debug(f"{identity.label or format_identity(identity)} order {order}: {entry.satisfying} satisfying")
        if result.budget_exhausted:
            logger.warning(f"Survey of {identity.label or format_identity(identity)} stopped at order {order}")
            break
    return result


class PlusCellReport(BaseModel):
    identity: str
    column: Column
    max_order: int
    budget: int = DEFAULT_BUDGET
    satisfying_counts: Dict[int, int] = Field(default_factory=dict)
    exhaustive_orders: List[int] = Field(default_factory=list)
    counterexample: Optional[List[List[int]]] = None
    budget_exhausted: bool = False

    @property
    def holds(self) -> bool:
        return self.counterexample is None and not self.budget_exhausted

    def raise_for_budget(self) -> None:
        if self.budget_exhausted:
            raise BudgetExhausted(self.budget, exhaustive_orders=self.exhaustive_orders)


def verify_plus_cell(
    identity: Union[str, Identity],
    column: Union[str, Column],
    max_order: int,
    budget: int = DEFAULT_BUDGET,
    incremental: bool = True,
) -> PlusCellReport:
    """Look for a counterexample to a claimed '+' at every order up to max_order."""
    if isinstance(identity, str):
        identity = resolve_identity(identity)
    column = Column.parse(column)
    if max_order > ORDER_CAP:
        raise OrderTooLarge(max_order, ORDER_CAP)

    result = survey(identity, range(1, max_order + 1), budget=budget, incremental=incremental)
    counterexample = result.first_counterexample.get(column)
    return PlusCellReport(
        identity=identity.label or format_identity(identity),
        column=column,
        max_order=max_order,
        budget=budget,
        satisfying_counts={entry.order: entry.satisfying for entry in result.orders},
        exhaustive_orders=result.exhaustive_orders,
        counterexample=counterexample.rows() if counterexample is not None else None,
        budget_exhausted=result.budget_exhausted,
    )
