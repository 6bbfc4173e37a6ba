"""The sixty classical Bol-Moufang identities F1-F60.

Rows are transcribed once from the classification table, in its printed row
order (F4 is printed before F2). Each row carries the identity, the
abbreviation, the f / e / Lo. / Gr. cells and the printed type.
"""

import json
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .terms import (
    Identity,
    IdentityType,
    canonicalize,
    format_identity,
    identity_type,
    mirror_identity,
    parse_identity,
)

logger = logging.getLogger(__name__)

PLUS = "+"
MINUS = "-"

# label, abbreviation, identity, f, e, Lo., Gr., printed type, printed slots
TABLE1_ROWS: List[Tuple[str, str, str, str, str, str, str, str, Tuple[int, int]]] = [
    ("F1", "", "xy.zx = (xy.z)x", "+", "+", "+", "+", "(23)=ε", (1, 4)),
    ("F3", "", "xy.zx = x(y.zx)", "+", "+", "+", "+", "(23)=(13)", (1, 4)),
    ("F5", "", "(xy.z)x = (x.yz)x", "+", "+", "+", "+", "ε=(12)", (1, 4)),
    ("F10", "", "x(y.zx) = x(yz.x)", "+", "+", "+", "+", "(13)=(132)", (1, 4)),
    ("F11", "", "xy.xz = (xy.x)z", "+", "+", "+", "+", "(23)=ε", (1, 3)),
    ("F12", "", "xy.xz = (x.yx)z", "+", "+", "+", "+", "(23)=(12)", (1, 3)),
    ("F14", "", "xy.xz = x(y.xz)", "+", "+", "+", "+", "(23)=(13)", (1, 3)),
    ("F18", "", "(x.yx)z = x(yx.z)", "+", "+", "+", "+", "(12)=(132)", (1, 3)),
    ("F20", "", "x(yx.z) = x(y.xz)", "+", "+", "+", "+", "(132)=(13)", (1, 3)),
    ("F21", "", "yx.zx = (yx.z)x", "+", "+", "+", "+", "(23)=ε", (2, 4)),
    ("F23", "", "yx.zx = y(xz.x)", "+", "+", "+", "+", "(23)=(132)", (2, 4)),
    ("F24", "", "yx.zx = y(x.zx)", "+", "+", "+", "+", "(23)=(13)", (2, 4)),
    ("F25", "", "(yx.z)x = (y.xz)x", "+", "+", "+", "+", "ε=(12)", (2, 4)),
    ("F28", "", "(y.xz)x = y(xz.x)", "+", "+", "+", "+", "(12)=(132)", (2, 4)),
    ("F31", "", "yx.xz = (yx.x)z", "+", "+", "+", "+", "(23)=ε", (2, 3)),
    ("F32", "", "yx.xz = (y.xx)z", "+", "+", "+", "+", "(23)=(12)", (2, 3)),
    ("F33", "", "yx.xz = y(xx.z)", "+", "+", "+", "+", "(23)=(132)", (2, 3)),
    ("F34", "", "yx.xz = y(x.xz)", "+", "+", "+", "+", "(23)=(13)", (2, 3)),
    ("F47", "", "(x.xy)z = x(xy.z)", "+", "+", "+", "+", "(12)=(132)", (1, 2)),
    ("F50", "", "x(x.yz) = x(xy.z)", "+", "+", "+", "+", "(13)=(132)", (1, 2)),
    ("F55", "", "(yz.x)x = (y.zx)x", "+", "+", "+", "+", "ε=(12)", (3, 4)),
    ("F58", "", "(y.zx)x = y(zx.x)", "+", "+", "+", "+", "(12)=(132)", (3, 4)),
    ("F4", "middle Moufang", "xy.zx = x(yz.x)", "+", "+", "+", "-", "(23)=(132)", (3, 4)),
    ("F2", "middle Moufang", "xy.zx = (x.yz)x", "+", "+", "+", "-", "(23)=(12)", (3, 4)),
    ("F6", "extra identity", "(xy.z)x = x(y.zx)", "+", "+", "+", "-", "ε=(13)", (1, 4)),
    ("F13", "extra identity", "xy.xz = x(yx.z)", "+", "+", "+", "-", "(23)=(132)", (1, 3)),
    ("F17", "left Moufang", "(xy.x)z = x(y.xz)", "+", "+", "+", "-", "ε=(13)", (1, 3)),
    ("F22", "extra identity", "yx.zx = (y.xz)x", "+", "+", "+", "-", "(23)=(12)", (2, 4)),
    ("F27", "right Moufang", "(yx.z)x = y(x.zx)", "+", "+", "+", "-", "ε=(13)", (2, 4)),
    ("F38", "", "(y.xx)z = y(xx.z)", "+", "+", "+", "-", "(12)=(132)", (2, 3)),
    ("F41", "LC identity", "xx.yz = (x.xy)z", "+", "+", "+", "-", "(23)=(12)", (1, 2)),
    ("F53", "RC identity", "yz.xx = y(zx.x)", "+", "+", "+", "-", "(23)=(132)", (3, 4)),
    ("F7", "", "(xy.z)x = x(yz.x)", "+", "-", "-", "-", "ε=(132)", (1, 4)),
    ("F16", "", "(xy.x)z = x(yx.z)", "+", "-", "-", "-", "ε=(132)", (1, 3)),
    ("F26", "right Bol", "(yx.z)x = y(xz.x)", "+", "-", "-", "-", "ε=(132)", (2, 4)),
    ("F36", "RC identity", "(yx.x)z = y(xx.z)", "+", "-", "-", "-", "ε=(132)", (2, 3)),
    ("F40", "", "y(xx.z) = y(x.xz)", "+", "-", "-", "-", "(132)=(13)", (1, 2)),
    ("F42", "", "xx.yz = (xx.y)z", "+", "-", "-", "-", "(23)=ε", (1, 2)),
    ("F43", "", "xx.yz = x(x.yz)", "+", "-", "-", "-", "(23)=(13)", (1, 2)),
    ("F44", "", "xx.yz = x(xy.z)", "+", "-", "-", "-", "(23)=(132)", (1, 2)),
    ("F45", "", "(x.xy)z = (xx.y)z", "+", "-", "-", "-", "(12)=ε", (1, 2)),
    ("F48", "LC identity", "(xx.y)z = x(x.yz)", "+", "-", "-", "-", "ε=(13)", (1, 2)),
    ("F49", "", "(xx.y)z = x(xy.z)", "+", "-", "-", "-", "ε=(132)", (1, 2)),
    ("F8", "", "(x.yz)x = x(y.zx)", "-", "+", "-", "-", "(12)=(13)", (1, 4)),
    ("F19", "left Bol", "(x.yx)z = x(y.xz)", "-", "+", "-", "-", "(12)=(13)", (1, 3)),
    ("F29", "", "(y.xz)x = y(x.zx)", "-", "+", "-", "-", "(12)=(13)", (2, 4)),
    ("F35", "", "(yx.x)z = (y.xx)z", "-", "+", "-", "-", "ε=(12)", (2, 3)),
    ("F39", "LC identity", "(y.xx)z = y(x.xz)", "-", "+", "-", "-", "(12)=(13)", (2, 3)),
    ("F51", "", "yz.xx = (yz.x)x", "-", "+", "-", "-", "(23)=ε", (3, 4)),
    ("F52", "", "yz.xx = (y.zx)x", "-", "+", "-", "-", "(23)=(12)", (3, 4)),
    ("F54", "", "yz.xx = y(z.xx)", "-", "+", "-", "-", "(23)=(13)", (3, 4)),
    ("F57", "RC identity", "(yz.x)x = y(z.xx)", "-", "+", "-", "-", "ε=(13)", (3, 4)),
    ("F59", "", "(y.zx)x = y(z.xx)", "-", "+", "-", "-", "(12)=(13)", (3, 4)),
    ("F60", "", "y(zx.x) = y(z.xx)", "-", "+", "-", "-", "(132)=(13)", (3, 4)),
    ("F9", "", "(x.yz)x = x(yz.x)", "-", "-", "-", "-", "(12)=(132)", (1, 4)),
    ("F15", "", "(xy.x)z = (x.yx)z", "-", "-", "-", "-", "ε=(12)", (1, 3)),
    ("F30", "", "y(xz.x) = y(x.zx)", "-", "-", "-", "-", "(132)=(13)", (2, 4)),
    ("F37", "C identity", "(yx.x)z = y(x.xz)", "-", "-", "-", "-", "ε=(13)", (2, 3)),
    ("F46", "LC identity", "(x.xy)z = x(x.yz)", "-", "-", "-", "-", "(12)=(13)", (1, 2)),
    ("F56", "RC identity", "(yz.x)x = y(zx.x)", "-", "-", "-", "-", "ε=(132)", (3, 4)),
]

# (F)* = G as listed for the (12)-parastrophe; the relation is symmetric.
PARASTROPHE_PAIRS: List[Tuple[str, str]] = [
    ("F1", "F3"), ("F2", "F4"), ("F5", "F10"), ("F6", "F6"), ("F7", "F8"),
    ("F9", "F9"), ("F11", "F24"), ("F12", "F23"), ("F13", "F22"),
    ("F14", "F21"), ("F15", "F30"), ("F16", "F29"), ("F17", "F27"), ("F18", "F28"),
    ("F19", "F26"), ("F20", "F25"), ("F31", "F34"), ("F32", "F33"), ("F35", "F40"),
    ("F36", "F39"), ("F37", "F37"), ("F38", "F38"), ("F41", "F53"), ("F42", "F54"),
    ("F43", "F51"), ("F44", "F52"), ("F45", "F60"), ("F46", "F56"), ("F47", "F58"),
    ("F48", "F57"), ("F49", "F59"), ("F50", "F55"),
]

_LABEL = re.compile(r"^[Ff](\d{1,2})$")


class UnknownLabel(KeyError):
    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"No catalog identity named {self.label!r}"


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    abbrev: Optional[str]
    text: str
    identity: Identity

    @property
    def number(self) -> int:
        return label_number(self.label)


def label_number(label: str) -> int:
    match = _LABEL.match(label)
    if not match:
        raise UnknownLabel(label)
    return int(match.group(1))


def normalize_label(label: str) -> str:
    number = label_number(label.strip())
    if not 1 <= number <= 60:
        raise UnknownLabel(label)
    return f"F{number}"


def is_label(text: str) -> bool:
    return bool(_LABEL.match(text.strip()))


@lru_cache(maxsize=1)
def _entries() -> Dict[str, CatalogEntry]:
    entries = {}
    for label, abbrev, text, *_ in TABLE1_ROWS:
        entries[label] = CatalogEntry(
            label=label,
            abbrev=abbrev or None,
            text=text,
            identity=parse_identity(text, label=label),
        )
    return dict(sorted(entries.items(), key=lambda item: label_number(item[0])))


def catalog() -> List[CatalogEntry]:
    """All sixty entries in label order F1..F60."""
    return list(_entries().values())


def lookup(label: str) -> CatalogEntry:
    try:
        return _entries()[normalize_label(label)]
    except KeyError:
        raise UnknownLabel(label)


def get_identity(label: str) -> Identity:
    return lookup(label).identity


def resolve_identity(spec: str) -> Identity:
    """Accept a catalog label (F17) or an inline identity string."""
    if is_label(spec):
        return get_identity(spec)
    identity = parse_identity(spec)
    return identity.with_label(identify(identity))


def _key(identity: Identity) -> Tuple:
    canonical = canonicalize(identity)
    return canonical.lhs, canonical.rhs


@lru_cache(maxsize=1)
def _index() -> Dict[Tuple, str]:
    index: Dict[Tuple, str] = {}
    for entry in catalog():
        index[_key(entry.identity)] = entry.label
    for entry in catalog():
        index.setdefault(_key(entry.identity.swapped()), entry.label)
    return index


def identify(identity: Identity) -> Optional[str]:
    """Catalog label of an identity up to variable renaming and side order."""
    return _index().get(_key(identity))


def parastrophe_identity(identity: Identity) -> Identity:
    """(12)-parastrophic identity; catalog entries come back as catalog entries."""
    transformed = mirror_identity(identity)
    label = identify(transformed)
    if label is None:
        return transformed
    logger.debug(f"Parastrophe of {identity.label or format_identity(identity)} is {label}")
    return get_identity(label)


def parastrophe_partner(label: str) -> str:
    """Partner according to the printed lemma list."""
    label = normalize_label(label)
    for first, second in PARASTROPHE_PAIRS:
        if label == first:
            return second
        if label == second:
            return first
    raise UnknownLabel(label)


def printed_type(label: str) -> IdentityType:
    """The type column exactly as printed."""
    label = normalize_label(label)
    for row_label, *_, printed, slots in TABLE1_ROWS:
        if row_label == label:
            lhs, rhs = printed.split("=")
            return IdentityType(lhs_perm=lhs, rhs_perm=rhs, double_slots=slots)
    raise UnknownLabel(label)


def catalog_records() -> List[Dict[str, object]]:
    """One record per entry: label, text, abbrev, lhs_perm, rhs_perm, double_slots."""
    records = []
    for entry in catalog():
        kind = identity_type(entry.identity).model_dump()
        records.append({
            "label": entry.label,
            "text": entry.text,
            "abbrev": entry.abbrev,
            "lhs_perm": kind["lhs_perm"],
            "rhs_perm": kind["rhs_perm"],
            "double_slots": list(kind["double_slots"]),
        })
    return records


def catalog_json(indent: Optional[int] = 2) -> str:
    return json.dumps(catalog_records(), indent=indent, ensure_ascii=False)
