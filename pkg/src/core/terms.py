"""Term language for classical Bol-Moufang identities.

Grammar (whitespace ignored)::

    identity := expr '=' expr
    expr     := juxt ('.' juxt)*        # low precedence product, left to right
    juxt     := atom atom*              # adjacency, binds tighter, left to right
    atom     := 'x' | 'y' | 'z' | '(' expr ')'

`*` and `·` are accepted as spellings of `.`.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, field_serializer, field_validator

logger = logging.getLogger(__name__)

VARIABLES = ("x", "y", "z")


class IdentityError(Exception):
    """Base exception for identity parsing and analysis errors."""
    pass


class IdentitySyntaxError(IdentityError):
    def __init__(self, position: int, message: str):
        super().__init__(f"Syntax error at position {position}: {message}")
        self.position = position
        self.message = message


class NotBolMoufang(IdentityError):
    def __init__(self, reason: str):
        super().__init__(f"Not a classical Bol-Moufang identity: {reason}")
        self.reason = reason


class MalformedSide(IdentityError):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Product:
    left: "Term"
    right: "Term"


Term = Union[Var, Product]


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    label: Optional[str] = field(default=None, compare=False)

    @property
    def word(self) -> Tuple[str, ...]:
        return leaves(self.lhs)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted(set(leaves(self.lhs)) | set(leaves(self.rhs))))

    def with_label(self, label: Optional[str]) -> "Identity":
        return Identity(self.lhs, self.rhs, label)

    def swapped(self) -> "Identity":
        return Identity(self.rhs, self.lhs, self.label)

    def __str__(self) -> str:
        return format_identity(self)


# Permutations of S3 as image tuples (s(1), s(2), s(3)).
Permutation = Tuple[int, int, int]

CYCLE_NAMES: Dict[Permutation, str] = {
    (1, 2, 3): "ε",
    (2, 1, 3): "(12)",
    (1, 3, 2): "(23)",
    (3, 2, 1): "(13)",
    (3, 1, 2): "(132)",
    (2, 3, 1): "(123)",
}
_CYCLE_LOOKUP = {name: perm for perm, name in CYCLE_NAMES.items()}
_CYCLE_LOOKUP.update({"e": (1, 2, 3), "eps": (1, 2, 3), "epsilon": (1, 2, 3), "()": (1, 2, 3)})


def cycle_notation(perm: Sequence[int]) -> str:
    return CYCLE_NAMES[tuple(perm)]


def perm_from_cycle(text: str) -> Permutation:
    key = text.replace(" ", "")
    if key not in _CYCLE_LOOKUP:
        raise ValueError(f"Unknown permutation {text!r}")
    return _CYCLE_LOOKUP[key]


def _coerce_perm(value) -> Permutation:
    if isinstance(value, str):
        return perm_from_cycle(value)
    perm = tuple(int(v) for v in value)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"{value!r} is not a permutation of 1..3")
    return perm


class IdentityType(BaseModel):
    """Execution-order permutations of both sides and the doubled-variable slots."""

    model_config = {"frozen": True}

    lhs_perm: Permutation
    rhs_perm: Permutation
    double_slots: Tuple[int, int]

    @field_validator("lhs_perm", "rhs_perm", mode="before")
    @classmethod
    def parse_perm(cls, value):
        return _coerce_perm(value)

    @field_validator("double_slots", mode="before")
    @classmethod
    def sort_slots(cls, value):
        slots = tuple(sorted(int(v) for v in value))
        if len(slots) != 2 or len(set(slots)) != 2 or not all(1 <= s <= 4 for s in slots):
            raise ValueError(f"double_slots must be two distinct positions in 1..4, got {value!r}")
        return slots

    @field_serializer("lhs_perm", "rhs_perm")
    def dump_perm(self, perm: Permutation) -> str:
        return cycle_notation(perm)

    @property
    def perms(self) -> Tuple[Permutation, Permutation]:
        return self.lhs_perm, self.rhs_perm

    def describe(self) -> str:
        slots = ",".join(str(s) for s in self.double_slots)
        return f"{cycle_notation(self.lhs_perm)} = {cycle_notation(self.rhs_perm)}, slots {{{slots}}}"


# --- parsing -----------------------------------------------------------------

_DOT = {".", "*", "·"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = [(i, ch) for i, ch in enumerate(text) if not ch.isspace()]
        self.index = 0

    def peek(self) -> Optional[str]:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return None

    def position(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return len(self.text)

    def advance(self) -> str:
        ch = self.tokens[self.index][1]
        self.index += 1
        return ch

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek()
            raise IdentitySyntaxError(
                self.position(), f"expected {ch!r}, found {'end of input' if found is None else repr(found)}"
            )
        self.advance()

    def identity(self) -> Tuple[Term, Term]:
        lhs = self.expr()
        self.expect("=")
        rhs = self.expr()
        if self.peek() is not None:
            raise IdentitySyntaxError(self.position(), f"unexpected {self.peek()!r}")
        return lhs, rhs

    def term(self) -> Term:
        result = self.expr()
        if self.peek() is not None:
            raise IdentitySyntaxError(self.position(), f"unexpected {self.peek()!r}")
        return result

    def expr(self) -> Term:
        result = self.juxt()
        while self.peek() in _DOT:
            self.advance()
            result = Product(result, self.juxt())
        return result

    def juxt(self) -> Term:
        result = self.atom()
        while self.peek() is not None and (self.peek() in VARIABLES or self.peek() == "("):
            result = Product(result, self.atom())
        return result

    def atom(self) -> Term:
        ch = self.peek()
        if ch is None:
            raise IdentitySyntaxError(self.position(), "unexpected end of input")
        if ch in VARIABLES:
            self.advance()
            return Var(ch)
        if ch == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise IdentitySyntaxError(self.position(), f"unexpected {ch!r}")


def parse_term(text: str) -> Term:
    return _Parser(text).term()


def parse_identity(text: str, label: Optional[str] = None) -> Identity:
    """Parse and shape-check a classical Bol-Moufang identity.

    Raises:
        IdentitySyntaxError: Malformed text
        NotBolMoufang: Well-formed text of the wrong shape
    """
    lhs, rhs = _Parser(text).identity()
    identity = Identity(lhs, rhs, label)
    check_bol_moufang(identity)
    return identity


def leaves(term: Term) -> Tuple[str, ...]:
    if isinstance(term, Var):
        return (term.name,)
    return leaves(term.left) + leaves(term.right)


def check_side(term: Term) -> None:
    word = leaves(term)
    if len(word) != 4:
        raise NotBolMoufang(f"side has {len(word)} leaves, expected 4")
    counts = sorted(Counter(word).values())
    if counts != [1, 1, 2]:
        raise NotBolMoufang(f"side {''.join(word)!r} must use three letters with exactly one doubled")


def check_bol_moufang(identity: Identity) -> None:
    check_side(identity.lhs)
    check_side(identity.rhs)
    left, right = leaves(identity.lhs), leaves(identity.rhs)
    if set(left) != set(right):
        raise NotBolMoufang("letters differ across sides")
    if left != right:
        raise NotBolMoufang(f"letter order differs: {''.join(left)} vs {''.join(right)}")


# --- printing ----------------------------------------------------------------

def _is_pair(term: Term) -> bool:
    return isinstance(term, Product) and isinstance(term.left, Var) and isinstance(term.right, Var)


def _piece(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if _is_pair(term):
        return term.left.name + term.right.name
    return f"({format_term(term)})"


def format_term(term: Term) -> str:
    """Print in the xy.zx style; parse_term(format_term(t)) == t."""
    if isinstance(term, Var):
        return term.name
    left, right = _piece(term.left), _piece(term.right)
    simple_left, simple_right = isinstance(term.left, Var), isinstance(term.right, Var)
    if simple_left and simple_right:
        return left + right
    # a parenthesized piece next to a single letter reads unambiguously
    if (simple_left and right.startswith("(")) or (simple_right and left.startswith("(")):
        return left + right
    if left.startswith("(") and right.startswith("("):
        return left + right
    return f"{left}.{right}"


def format_identity(identity: Identity) -> str:
    return f"{format_term(identity.lhs)} = {format_term(identity.rhs)}"


# --- transforms --------------------------------------------------------------

def rename(term: Term, mapping: Dict[str, str]) -> Term:
    if isinstance(term, Var):
        return Var(mapping[term.name])
    return Product(rename(term.left, mapping), rename(term.right, mapping))


def canonicalize(identity: Identity) -> Identity:
    """Rename variables to x, y, z by first appearance in the LHS word."""
    mapping: Dict[str, str] = {}
    for name in leaves(identity.lhs):
        if name not in mapping:
            mapping[name] = VARIABLES[len(mapping)]
    for name in leaves(identity.rhs):
        if name not in mapping:
            mapping[name] = VARIABLES[len(mapping)]
    return Identity(rename(identity.lhs, mapping), rename(identity.rhs, mapping), identity.label)


def mirror(term: Term) -> Term:
    if isinstance(term, Var):
        return term
    return Product(mirror(term.right), mirror(term.left))


def mirror_identity(identity: Identity) -> Identity:
    """Syntactic (12)-parastrophe: swap every product, then canonicalize."""
    return canonicalize(Identity(mirror(identity.lhs), mirror(identity.rhs)))


# --- type calculus -----------------------------------------------------------

def _execution(term: Term, offset: int, order: List[int]) -> int:
    if isinstance(term, Var):
        return 1
    left_count = _execution(term.left, offset, order)
    right_count = _execution(term.right, offset + left_count, order)
    order.append(offset + left_count)
    return left_count + right_count


def execution_perm(side: Term) -> Permutation:
    """Map operator position (left to right) to execution step (innermost first).

    ((ab)c)d -> ε, (a(bc))d -> (12), (ab)(cd) -> (23), a((bc)d) -> (132), a(b(cd)) -> (13)
    """
    order: List[int] = []
    leaf_count = _execution(side, 0, order)
    if leaf_count != 4 or len(order) != 3:
        raise MalformedSide(f"side {format_term(side)!r} has {len(order)} products, expected 3")
    images = [0, 0, 0]
    for step, position in enumerate(order, start=1):
        images[position - 1] = step
    return tuple(images)


def double_slots(side: Term) -> Tuple[int, int]:
    word = leaves(side)
    doubled = [name for name, count in Counter(word).items() if count == 2]
    if len(doubled) != 1:
        raise MalformedSide(f"side {''.join(word)!r} has no single doubled letter")
    return tuple(i for i, name in enumerate(word, start=1) if name == doubled[0])


def identity_type(identity: Identity) -> IdentityType:
    return IdentityType(
        lhs_perm=execution_perm(identity.lhs),
        rhs_perm=execution_perm(identity.rhs),
        double_slots=double_slots(identity.lhs),
    )
