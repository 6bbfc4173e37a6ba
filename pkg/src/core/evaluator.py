"""Semantic checks of identities on Cayley tables.

Every check evaluates both sides of an identity over all n^k assignments at
once with numpy fancy indexing. Assignments run in alphabetical variable
order, so for catalog identities x is outermost and z innermost; the first
failure reported is the lexicographically smallest one.
"""

import logging
from functools import lru_cache
from typing import Callable, Dict, Iterator, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .quasigroup import CayleyTable, UnitProfile, units
from .terms import Identity, Term, Var

logger = logging.getLogger(__name__)

Assignment = Dict[str, int]
Lookup = Callable[[np.ndarray, np.ndarray], np.ndarray]

UNKNOWN = -1


class EvaluationError(Exception):
    """Base exception for semantic evaluation errors."""
    pass


class UnboundVariable(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"Variable {name!r} has no value in the assignment")
        self.name = name


class InconsistentClassification(EvaluationError):
    pass


class SatReport(BaseModel):
    """Outcome of checking one identity on one table."""

    holds: bool
    failing_assignment: Optional[Dict[str, int]] = None
    assignments_checked: int = Field(ge=0)

    @model_validator(mode="after")
    def check_failure(self) -> "SatReport":
        if self.holds == (self.failing_assignment is not None):
            raise ValueError("failing_assignment must be present exactly when the identity fails")
        return self

    def describe(self) -> str:
        if self.holds:
            return f"holds ({self.assignments_checked} assignments)"
        values = ", ".join(f"{name}={value}" for name, value in self.failing_assignment.items())
        return f"fails at {values}"


def eval_term(term: Term, table: CayleyTable, assignment: Assignment) -> int:
    """Evaluate a term at one assignment by repeated table lookup."""
    if isinstance(term, Var):
        if term.name not in assignment:
            raise UnboundVariable(term.name)
        return int(assignment[term.name])
    return table.mul(eval_term(term.left, table, assignment), eval_term(term.right, table, assignment))


def evaluate(term: Term, lookup: Lookup, env: Dict[str, np.ndarray]) -> np.ndarray:
    """Evaluate a term over arrays of assignments through `lookup`."""
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariable(term.name)
        return env[term.name]
    return lookup(evaluate(term.left, lookup, env), evaluate(term.right, lookup, env))


@lru_cache(maxsize=64)
def assignment_grid(order: int, arity: int) -> np.ndarray:
    """indices((n,)*k), read-only; axis i holds the value of the i-th variable."""
    grid = np.indices((order,) * arity)
    grid.setflags(write=False)
    return grid


def _environment(identity: Identity, order: int) -> Dict[str, np.ndarray]:
    names = identity.variables
    grid = assignment_grid(order, len(names))
    return {name: grid[i] for i, name in enumerate(names)}


def table_lookup(cells: np.ndarray) -> Lookup:
    return lambda a, b: cells[a, b]


def partial_lookup(cells: np.ndarray) -> Lookup:
    """Lookup on a partially filled table; UNKNOWN propagates."""

    def lookup(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        unknown = (a < 0) | (b < 0)
        values = cells[np.where(unknown, 0, a), np.where(unknown, 0, b)]
        return np.where(unknown, UNKNOWN, values)

    return lookup


def mismatches(identity: Identity, cells: np.ndarray) -> np.ndarray:
    """Boolean array over all assignments, True where the sides differ."""
    env = _environment(identity, cells.shape[0])
    lookup = table_lookup(cells)
    return evaluate(identity.lhs, lookup, env) != evaluate(identity.rhs, lookup, env)


def partial_conflict(identity: Identity, cells: np.ndarray) -> bool:
    """True if some ground instance has both sides decided and different."""
    env = _environment(identity, cells.shape[0])
    lookup = partial_lookup(cells)
    lhs = evaluate(identity.lhs, lookup, env)
    rhs = evaluate(identity.rhs, lookup, env)
    return bool(((lhs >= 0) & (rhs >= 0) & (lhs != rhs)).any())


def satisfies(table: CayleyTable, identity: Identity) -> SatReport:
    """Check all n^k assignments; report the first failure in lexicographic order."""
    mismatch = mismatches(identity, table.cells)
    total = int(mismatch.size)
    if not mismatch.any():
        return SatReport(holds=True, assignments_checked=total)

    first = np.argwhere(mismatch)[0]
    failing = {name: int(value) for name, value in zip(identity.variables, first)}
    checked = int(np.ravel_multi_index(tuple(first), mismatch.shape)) + 1
    return SatReport(holds=False, failing_assignment=failing, assignments_checked=checked)


def satisfies_all(stack: np.ndarray, identity: Identity) -> np.ndarray:
    """Vectorized over a stack of tables shaped (m, n, n); returns a boolean mask of length m."""
    m, n = stack.shape[0], stack.shape[1]
    names = identity.variables
    k = np.arange(m).reshape((m,) + (1,) * len(names))
    grid = assignment_grid(n, len(names))
    env = {name: np.broadcast_to(grid[i], (m,) + grid[i].shape) for i, name in enumerate(names)}

    def lookup(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return stack[k, a, b]

    mismatch = evaluate(identity.lhs, lookup, env) != evaluate(identity.rhs, lookup, env)
    return ~mismatch.reshape(m, -1).any(axis=1)


def classify(table: CayleyTable) -> UnitProfile:
    """Units and structure flags, with the loop/group implications cross-checked."""
    profile = units(table)
    identity = np.arange(table.order)
    if profile.has_left_unit and not np.array_equal(table.cells[profile.left_unit], identity):
        raise InconsistentClassification(f"row {profile.left_unit} is not the identity permutation")
    if profile.has_right_unit and not np.array_equal(table.cells[:, profile.right_unit], identity):
        raise InconsistentClassification(f"column {profile.right_unit} is not the identity permutation")
    if profile.is_loop and profile.left_unit != profile.right_unit:
        raise InconsistentClassification("left and right units of a loop differ")
    if profile.is_group and not profile.is_loop:
        raise InconsistentClassification("associative quasigroup without a two-sided unit")
    return profile


def satisfying_quasigroups(identity: Identity, order: int) -> Iterator[CayleyTable]:
    """All Latin squares of the given order satisfying the identity, lexicographically."""
    from .search import latin_square_stack, enumerate_latin_squares, CACHE_ORDER

    if order <= CACHE_ORDER:
        stack = latin_square_stack(order)
        for index in np.flatnonzero(satisfies_all(stack, identity)):
            yield CayleyTable(stack[index])
        return
    for table in enumerate_latin_squares(order):
        if satisfies(table, identity).holds:
            yield table
