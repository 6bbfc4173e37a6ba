"""Tests for the published counterexample tables and derived witnesses."""

import json

import pytest

from src.core.catalog import get_identity, parastrophe_partner
from src.core.evaluator import classify, satisfies
from src.core.fixtures import (
    MOUFANG_LABELS,
    FixtureContradictsClaim,
    FixtureInvalid,
    UnknownFixture,
    chein_loop,
    derived_fixtures,
    dihedral_group,
    literature_witness,
    load_extra,
    load_fixtures,
    load_manifest,
    verify_derived,
    verify_fixture,
    witness_pool,
)
from src.core.quasigroup import cyclic_group

PUBLISHED_LABELS = [
    "F7", "F9", "F15", "F16", "F19", "F35", "F36", "F37", "F38",
    "F41", "F42", "F43", "F44", "F45", "F46", "F48", "F49",
]


def test_manifest_covers_every_published_table():
    manifest = load_manifest()
    assert [entry.label for entry in manifest.fixtures] == PUBLISHED_LABELS
    assert manifest.entry("f38").claim.loop is True


@pytest.mark.parametrize("label", PUBLISHED_LABELS)
def test_published_tables_verify(label):
    certificate = verify_fixture(label)
    assert certificate.sat.holds
    assert certificate.source == "published"
    assert not certificate.claim.mismatches(certificate.profile)


def test_orders_of_published_tables():
    orders = {label: tables[0].order for label, tables in load_fixtures().items()}
    assert orders["F7"] == orders["F9"] == orders["F19"] == 3
    assert orders["F38"] == orders["F48"] == 5
    assert orders["F35"] == orders["F41"] == orders["F43"] == 6


def test_shared_tables_are_loaded_once():
    fixtures = load_fixtures()
    shared = fixtures["F7"][0]
    for label in ("F16", "F36", "F42", "F44", "F49"):
        assert fixtures[label][0] is shared
    assert fixtures["F43"][0] is fixtures["F45"][0]


def test_specific_unit_claims():
    assert verify_fixture("F7").profile.left_unit == 1
    assert verify_fixture("F19").profile.right_unit == 1
    assert verify_fixture("F48").profile.left_unit == 2
    f41 = verify_fixture("F41").profile
    assert f41.is_loop and not f41.is_group


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        verify_fixture("F1")


def test_contradicting_fixture_is_reported(tmp_path):
    manifest = {
        "fixtures": [
            {"label": "F7", "file": "f7.qg", "statement": "(xy.z)x = x(yz.x)",
             "claim": {"left_unit": False, "right_unit": False}},
        ],
    }
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    (tmp_path / "f7.qg").write_text("order 3\n1 2 0\n0 1 2\n2 0 1\n")
    with pytest.raises(FixtureContradictsClaim) as exc:
        verify_fixture("F7", tmp_path)
    assert "left_unit" in exc.value.detail


def test_fixture_failing_its_identity(tmp_path):
    manifest = {
        "fixtures": [
            {"label": "F7", "file": "f9.qg", "statement": "(xy.z)x = x(yz.x)", "claim": {}},
        ],
    }
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    (tmp_path / "f9.qg").write_text("order 3\n1 0 2\n0 2 1\n2 1 0\n")
    with pytest.raises(FixtureContradictsClaim):
        verify_fixture("F7", tmp_path)


def test_invalid_fixture_file(tmp_path):
    manifest = {"fixtures": [{"label": "F7", "file": "bad.qg", "statement": "", "claim": {}}]}
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    (tmp_path / "bad.qg").write_text("order 2\n0 0\n1 1\n")
    with pytest.raises(FixtureInvalid):
        load_fixtures(tmp_path)


def test_z3_extra():
    assert load_extra("Z3") == cyclic_group(3)
    with pytest.raises(UnknownFixture):
        load_extra("Z5")


def test_derived_fixtures_fill_partner_labels():
    derived = derived_fixtures()
    assert "F8" in derived
    assert "F26" in derived
    assert "F38" not in derived
    for label in derived:
        assert parastrophe_partner(label) in load_fixtures()


@pytest.mark.parametrize("label", ["F8", "F26", "F39", "F40", "F57"])
def test_derived_witnesses_verify(label):
    certificate = verify_derived(label)
    assert certificate.source == "parastrophe"
    assert certificate.sat.holds


def test_derived_unit_sides_are_swapped():
    assert verify_derived("F8").profile.right_unit == 1
    assert verify_derived("F8").profile.left_unit is None


def test_dihedral_group():
    group = dihedral_group(4)
    profile = classify(group)
    assert group.order == 8
    assert profile.is_group
    assert profile.left_unit == 0
    assert group.mul(1, 4) != group.mul(4, 1)


def test_chein_loop_needs_a_group(f7_table):
    with pytest.raises(ValueError):
        chein_loop(f7_table)


def test_literature_witness_is_a_non_associative_loop():
    loop = literature_witness()
    profile = classify(loop)
    assert loop.order == 16
    assert profile.is_loop
    assert not profile.is_group


@pytest.mark.parametrize("label", MOUFANG_LABELS)
def test_literature_witness_satisfies_moufang_rows(label):
    assert satisfies(literature_witness(), get_identity(label)).holds


def test_witness_pool_sources():
    pool = witness_pool()
    assert pool["F7"][0][0] == "published"
    assert pool["F8"][0][0] == "parastrophe"
    assert pool["F17"][0][0] == "literature"
