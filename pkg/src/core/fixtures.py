"""Published counterexample tables and the witnesses derived from them."""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from .catalog import get_identity, normalize_label, parastrophe_partner
from .evaluator import SatReport, classify, satisfies
from .quasigroup import CayleyTable, QuasigroupError, UnitProfile, load_table, parastrophe12, units

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"

# Rows whose group cell is '-' only because non-associative Moufang or extra loops exist.
MOUFANG_LABELS = ("F2", "F4", "F6", "F13", "F17", "F22", "F27")


class FixtureError(Exception):
    """Base exception for fixture loading and verification."""
    pass


class FixtureInvalid(FixtureError):
    def __init__(self, label: str, reason: str):
        super().__init__(f"Fixture {label} is invalid: {reason}")
        self.label = label
        self.reason = reason


class FixtureContradictsClaim(FixtureError):
    def __init__(self, label: str, detail: str):
        super().__init__(f"Fixture {label} contradicts its theorem: {detail}")
        self.label = label
        self.detail = detail


class UnknownFixture(FixtureError):
    def __init__(self, label: str):
        super().__init__(f"No fixture for {label}")
        self.label = label


class FixtureClaim(BaseModel):
    """Unit facts a theorem states about its table; None means not stated."""

    left_unit: Optional[bool] = None
    right_unit: Optional[bool] = None
    loop: Optional[bool] = None
    group: Optional[bool] = None

    def mismatches(self, profile: UnitProfile) -> List[str]:
        observed = {
            "left_unit": profile.has_left_unit,
            "right_unit": profile.has_right_unit,
            "loop": profile.is_loop,
            "group": profile.is_group,
        }
        problems = []
        for name, stated in self.model_dump().items():
            if stated is not None and stated != observed[name]:
                problems.append(f"{name} stated {stated}, found {observed[name]}")
        return problems

    def mirrored(self) -> "FixtureClaim":
        return FixtureClaim(left_unit=self.right_unit, right_unit=self.left_unit, loop=self.loop, group=self.group)


class FixtureEntry(BaseModel):
    label: str
    file: str
    statement: str = Field(description="Identity as written in the owning theorem")
    claim: FixtureClaim


class Manifest(BaseModel):
    fixtures: List[FixtureEntry]
    extras: Dict[str, str] = Field(default_factory=dict)

    def entry(self, label: str) -> FixtureEntry:
        label = normalize_label(label)
        for entry in self.fixtures:
            if entry.label == label:
                return entry
        raise UnknownFixture(label)


class FixtureCertificate(BaseModel):
    label: str
    order: int
    source: str = "published"
    sat: SatReport
    profile: UnitProfile
    claim: FixtureClaim


def load_manifest(directory: Union[str, Path, None] = None) -> Manifest:
    path = Path(directory or FIXTURE_DIR) / "manifest.json"
    try:
        with open(path) as f:
            return Manifest(**json.load(f))
    except FileNotFoundError:
        raise FixtureError(f"Fixture manifest not found at {path}")


def _read(label: str, path: Path) -> CayleyTable:
    try:
        return load_table(path)
    except FileNotFoundError:
        raise FixtureInvalid(label, f"missing file {path.name}")
    except QuasigroupError as e:
        raise FixtureInvalid(label, str(e))


def load_fixtures(directory: Union[str, Path, None] = None) -> Dict[str, List[CayleyTable]]:
    """Map each owning label to its validated tables; shared files are read once."""
    directory = Path(directory or FIXTURE_DIR)
    manifest = load_manifest(directory)
    cache: Dict[str, CayleyTable] = {}
    fixtures: Dict[str, List[CayleyTable]] = {}
    for entry in manifest.fixtures:
        if entry.file not in cache:
            cache[entry.file] = _read(entry.label, directory / entry.file)
        fixtures.setdefault(entry.label, []).append(cache[entry.file])
    logger.debug(f"Loaded {len(cache)} fixture tables for {len(fixtures)} labels")
    return fixtures


def load_extra(name: str, directory: Union[str, Path, None] = None) -> CayleyTable:
    directory = Path(directory or FIXTURE_DIR)
    manifest = load_manifest(directory)
    if name not in manifest.extras:
        raise UnknownFixture(name)
    return _read(name, directory / manifest.extras[name])


def _certify(label: str, table: CayleyTable, claim: FixtureClaim, source: str) -> FixtureCertificate:
    sat = satisfies(table, get_identity(label))
    if not sat.holds:
        raise FixtureContradictsClaim(label, f"identity {sat.describe()}")
    profile = classify(table)
    problems = claim.mismatches(profile)
    if problems:
        raise FixtureContradictsClaim(label, "; ".join(problems))
    return FixtureCertificate(label=label, order=table.order, source=source, sat=sat, profile=profile, claim=claim)


def verify_fixture(label: str, directory: Union[str, Path, None] = None) -> FixtureCertificate:
    """Check a published table against its owning identity and the theorem's unit claims.

    Raises:
        UnknownFixture: No published table for the label
        FixtureContradictsClaim: The table fails the identity or a stated unit fact
    """
    label = normalize_label(label)
    entry = load_manifest(directory).entry(label)
    table = load_fixtures(directory)[label][0]
    certificate = _certify(label, table, entry.claim, "published")
    logger.debug(f"Fixture {label} verified: {certificate.profile.describe()}")
    return certificate


def derived_fixtures(directory: Union[str, Path, None] = None) -> Dict[str, List[CayleyTable]]:
    """Transposes of published tables, filed under the (12)-parastrophic label.

    Only labels without a published table of their own are filled in.
    """
    own = load_fixtures(directory)
    derived: Dict[str, List[CayleyTable]] = {}
    for label, tables in own.items():
        partner = parastrophe_partner(label)
        if partner in own or partner in derived:
            continue
        derived[partner] = [parastrophe12(table) for table in tables]
    return derived


def verify_derived(label: str, directory: Union[str, Path, None] = None) -> FixtureCertificate:
    label = normalize_label(label)
    derived = derived_fixtures(directory)
    if label not in derived:
        raise UnknownFixture(label)
    claim = load_manifest(directory).entry(parastrophe_partner(label)).claim.mirrored()
    return _certify(label, derived[label][0], claim, "parastrophe")


def dihedral_group(m: int = 4) -> CayleyTable:
    """Dihedral group of order 2m; element k + m*e stands for r^k s^e."""
    if m < 1:
        raise ValueError("m must be positive")
    index = np.arange(2 * m)
    k, e = index % m, index // m
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    e1, e2 = np.meshgrid(e, e, indexing="ij")
    rotation = (k1 + np.where(e1 == 1, -k2, k2)) % m
    return CayleyTable(rotation + m * (e1 ^ e2))


def chein_loop(group: CayleyTable) -> CayleyTable:
    """Chein's Moufang loop M(G, 2) on G and Gu, doubling the order.

    g.h = gh, g.(hu) = (hg)u, (gu).h = (gh^-1)u, (gu).(hu) = h^-1 g.
    """
    profile = units(group)
    if not profile.is_group:
        raise ValueError("Chein's construction needs a group")
    n = group.order
    cells = group.cells
    inverse = np.argmax(cells == profile.left_unit, axis=0)
    # inverse[h] is the g with g.h = unit
    g, h = np.indices((n, n))
    table = np.block([
        [cells[g, h], cells[h, g] + n],
        [cells[g, inverse[h]] + n, cells[inverse[h], g]],
    ])
    return CayleyTable(table)


@lru_cache(maxsize=1)
def literature_witness() -> CayleyTable:
    """Non-associative Moufang loop of order 16 whose squares are central, so also extra."""
    return chein_loop(dihedral_group(4))


def literature_witnesses() -> Dict[str, List[CayleyTable]]:
    return {label: [literature_witness()] for label in MOUFANG_LABELS}


def witness_pool(directory: Union[str, Path, None] = None) -> Dict[str, List[Tuple[str, CayleyTable]]]:
    """Every known table per label, tagged by source, published tables first."""
    pool: Dict[str, List[Tuple[str, CayleyTable]]] = {}
    for source, tables in (
        ("published", load_fixtures(directory)),
        ("parastrophe", derived_fixtures(directory)),
        ("literature", literature_witnesses()),
    ):
        for label, found in tables.items():
            pool.setdefault(label, []).extend((source, table) for table in found)
    return pool
