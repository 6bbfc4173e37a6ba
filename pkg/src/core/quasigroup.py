"""Cayley-table quasigroups for Bol-Moufang Lab."""

import logging
import re
from functools import cached_property
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger(__name__)

Grid = Union[Sequence[Sequence[int]], np.ndarray]


class QuasigroupError(Exception):
    """Base exception for Cayley table errors."""
    pass


class NotSquare(QuasigroupError):
    """Grid is empty or its rows differ in length from the row count."""

    def __init__(self, detail: str):
        super().__init__(f"Grid is not square: {detail}")
        self.detail = detail


class EntryOutOfRange(QuasigroupError):
    def __init__(self, row: int, col: int, value: int, order: int):
        super().__init__(f"Entry {value} at ({row}, {col}) is outside 0..{order - 1}")
        self.row = row
        self.col = col
        self.value = value


class RowNotPermutation(QuasigroupError):
    def __init__(self, row: int):
        super().__init__(f"Row {row} is not a permutation")
        self.row = row


class ColumnNotPermutation(QuasigroupError):
    def __init__(self, col: int):
        super().__init__(f"Column {col} is not a permutation")
        self.col = col


class TableFormatError(QuasigroupError):
    """Cayley-table text could not be read."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"Line {line}: {reason}")
        self.line = line
        self.reason = reason


class CayleyTable:
    """Validated Latin square over {0..n-1}.

    Instances are immutable; build them through `validate` or
    `CayleyTable.from_grid`.
    """

    def __init__(self, cells: np.ndarray):
        cells = np.array(cells, dtype=np.int64, copy=True)
        cells.setflags(write=False)
        self._cells = cells

    @classmethod
    def from_grid(cls, grid: Grid) -> "CayleyTable":
        return validate(grid)

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def order(self) -> int:
        return int(self._cells.shape[0])

    def mul(self, x: int, y: int) -> int:
        return int(self._cells[x, y])

    def rows(self) -> List[List[int]]:
        return self._cells.tolist()

    def flat(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self._cells.ravel())

    @cached_property
    def left_division_table(self) -> np.ndarray:
        """ldiv[x, y] = x \\ y, precomputed for hot loops."""
        table = np.argsort(self._cells, axis=1)
        table.setflags(write=False)
        return table

    @cached_property
    def right_division_table(self) -> np.ndarray:
        """rdiv[y, x] = y / x, precomputed for hot loops."""
        table = np.argsort(self._cells, axis=0)
        table.setflags(write=False)
        return table

    def to_text(self, comment: Optional[str] = None) -> str:
        return format_table(self, comment)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CayleyTable):
            return NotImplemented
        return self._cells.shape == other._cells.shape and bool(np.array_equal(self._cells, other._cells))

    def __hash__(self) -> int:
        return hash((self.order, self._cells.tobytes()))

    def __lt__(self, other: "CayleyTable") -> bool:
        return (self.order, self.flat()) < (other.order, other.flat())

    def __repr__(self) -> str:
        return f"CayleyTable({self.rows()})"


class UnitProfile(BaseModel):
    """Unit elements and structural flags computed from a Cayley table."""

    order: int = Field(gt=0)
    left_unit: Optional[int] = None
    right_unit: Optional[int] = None
    middle_unit: Optional[int] = None
    idempotents: List[int] = Field(default_factory=list)
    is_loop: bool = False
    is_group: bool = False
    associativity_witness: Optional[Tuple[int, int, int]] = None

    @model_validator(mode="after")
    def check_flags(self) -> "UnitProfile":
        both = self.left_unit is not None and self.right_unit is not None
        if self.is_loop != both:
            raise ValueError("is_loop must hold exactly when both units are present")
        if self.is_group and not self.is_loop:
            raise ValueError("a group must be a loop")
        if self.is_group == (self.associativity_witness is not None):
            raise ValueError("associativity witness must be present exactly for non-groups")
        return self

    @property
    def has_left_unit(self) -> bool:
        return self.left_unit is not None

    @property
    def has_right_unit(self) -> bool:
        return self.right_unit is not None

    def describe(self) -> str:
        def show(value: Optional[int]) -> str:
            return "none" if value is None else str(value)

        return (
            f"left: {show(self.left_unit)}, right: {show(self.right_unit)}, "
            f"loop: {'yes' if self.is_loop else 'no'}, group: {'yes' if self.is_group else 'no'}"
        )


def _entry(value, row: int, col: int, order: int) -> int:
    if isinstance(value, bool):
        raise EntryOutOfRange(row, col, value, order)
    try:
        number = int(value)
    except (TypeError, ValueError, OverflowError):
        raise EntryOutOfRange(row, col, value, order)
    if number != value or not 0 <= number < order:
        raise EntryOutOfRange(row, col, value, order)
    return number


def validate(grid: Grid) -> CayleyTable:
    """Validate an n x n grid as a Latin square.

    Args:
        grid: Rows of element indices

    Returns:
        CayleyTable: The validated table

    Raises:
        NotSquare, EntryOutOfRange, RowNotPermutation, ColumnNotPermutation
    """
    try:
        rows = [list(row) for row in grid]
    except TypeError as e:
        raise NotSquare(f"rows must be sequences ({e})")
    n = len(rows)
    if n == 0:
        raise NotSquare("no rows")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise NotSquare(f"row {r} has {len(row)} entries, expected {n}")
    rows = [[_entry(value, r, c, n) for c, value in enumerate(row)] for r, row in enumerate(rows)]

    cells = np.array(rows, dtype=np.int64)
    expected = np.arange(n)
    for r in range(n):
        if not np.array_equal(np.sort(cells[r]), expected):
            raise RowNotPermutation(r)
    for c in range(n):
        if not np.array_equal(np.sort(cells[:, c]), expected):
            raise ColumnNotPermutation(c)
    return CayleyTable(cells)


def is_latin(grid: Grid) -> bool:
    try:
        validate(grid)
        return True
    except QuasigroupError:
        return False


def mul(table: CayleyTable, x: int, y: int) -> int:
    return table.mul(x, y)


def left_divide(table: CayleyTable, x: int, y: int) -> int:
    """x \\ y: the unique z with x * z = y (row scan)."""
    return int(np.flatnonzero(table.cells[x] == y)[0])


def right_divide(table: CayleyTable, y: int, x: int) -> int:
    """y / x: the unique z with z * x = y (column scan)."""
    return int(np.flatnonzero(table.cells[:, x] == y)[0])


def parastrophe12(table: CayleyTable) -> CayleyTable:
    """(12)-parastrophe x * y = y . x, i.e. the transpose."""
    return CayleyTable(table.cells.T)


def local_units(table: CayleyTable, y: int) -> Tuple[int, int]:
    """Return (f_y, e_y) with f_y * y = y and y * e_y = y."""
    return right_divide(table, y, y), left_divide(table, y, y)


def associativity_failure(table: CayleyTable) -> Optional[Tuple[int, int, int]]:
    """First triple (x, y, z) in lexicographic order with x(yz) != (xy)z."""
    cells = table.cells
    x, y, z = np.indices((table.order,) * 3)
    mismatch = cells[cells[x, y], z] != cells[x, cells[y, z]]
    if not mismatch.any():
        return None
    a, b, c = np.argwhere(mismatch)[0]
    return int(a), int(b), int(c)


def units(table: CayleyTable) -> UnitProfile:
    """Compute units, idempotents and the loop/group flags."""
    cells = table.cells
    n = table.order
    identity = np.arange(n)

    left = np.flatnonzero((cells == identity).all(axis=1))
    right = np.flatnonzero((cells.T == identity).all(axis=1))
    diagonal = np.diagonal(cells)

    left_unit = int(left[0]) if left.size else None
    right_unit = int(right[0]) if right.size else None
    middle_unit = int(diagonal[0]) if (diagonal == diagonal[0]).all() else None
    failure = associativity_failure(table)

    return UnitProfile(
        order=n,
        left_unit=left_unit,
        right_unit=right_unit,
        middle_unit=middle_unit,
        idempotents=[int(i) for i in np.flatnonzero(diagonal == identity)],
        is_loop=left_unit is not None and right_unit is not None,
        is_group=failure is None,
        associativity_witness=failure,
    )


def cyclic_group(n: int) -> CayleyTable:
    """Z_n under addition mod n."""
    if n < 1:
        raise ValueError("order must be positive")
    i, j = np.indices((n, n))
    return CayleyTable((i + j) % n)


def isotope(table: CayleyTable, rows: Sequence[int], cols: Sequence[int], symbols: Sequence[int]) -> CayleyTable:
    """Permute rows, columns and symbols; the result is again a Latin square."""
    cells = table.cells[np.asarray(rows)][:, np.asarray(cols)]
    return CayleyTable(np.asarray(symbols)[cells])


_COMMENT = re.compile(r"#.*$")


def parse_table(text: str) -> CayleyTable:
    """Read the Cayley-table text format.

    First non-comment line is `order n`, followed by n lines of n integers.
    Anything after `#` is ignored.
    """
    lines: List[Tuple[int, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = _COMMENT.sub("", raw).strip()
        if stripped:
            lines.append((number, stripped))
    if not lines:
        raise TableFormatError(0, "empty table file")

    number, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "order" or not parts[1].isdigit():
        raise TableFormatError(number, f"expected 'order n', got {header!r}")
    n = int(parts[1])
    if n < 1:
        raise TableFormatError(number, "order must be positive")
    body = lines[1:]
    if len(body) != n:
        raise TableFormatError(number, f"expected {n} rows, found {len(body)}")

    grid: List[List[int]] = []
    for number, line in body:
        try:
            grid.append([int(token) for token in line.split()])
        except ValueError:
            raise TableFormatError(number, f"non-integer entry in {line!r}")
    return validate(grid)


def load_table(path: Union[str, Path]) -> CayleyTable:
    path = Path(path)
    logger.debug(f"Loading Cayley table from {path}")
    return parse_table(path.read_text())


def format_table(table: CayleyTable, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"order {table.order}")
    width = len(str(table.order - 1))
    lines.extend(" ".join(str(v).rjust(width) for v in row) for row in table.rows())
    return "\n".join(lines) + "\n"


def save_table(table: CayleyTable, path: Union[str, Path], comment: Optional[str] = None) -> None:
    Path(path).write_text(format_table(table, comment))
