"""Tests for the bm-lab command line."""

import json

import pytest
from click.testing import CliRunner

from src.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from src.core.quasigroup import load_table


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"paths": {"logs": str(tmp_path / "logs")}}))
    return str(path)


@pytest.fixture
def invoke(runner, config_file):
    def run(*args):
        return runner.invoke(main, ["--config", config_file, *args])
    return run


def test_check_holds(invoke, fixture_dir):
    result = invoke("check", str(fixture_dir / "f7.qg"), "F7")
    assert result.exit_code == EXIT_OK
    assert "F7: holds on order 3 (27 assignments)" in result.stdout


def test_check_fails(invoke, fixture_dir):
    result = invoke("check", str(fixture_dir / "f7.qg"), "F1")
    assert result.exit_code == EXIT_NEGATIVE
    assert "F1: fails at x=" in result.stdout


def test_check_inline_identity_json(invoke, fixture_dir):
    result = invoke("check", str(fixture_dir / "z3.qg"), "xy.zx = x(y.zx)", "--json")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["identity"] == "F3"
    assert data["holds"] is True
    assert data["assignments_checked"] == 27


def test_check_rejects_non_latin_table(invoke, tmp_path):
    bad = tmp_path / "bad.qg"
    bad.write_text("order 2\n0 0\n1 1\n")
    result = invoke("check", str(bad), "F1")
    assert result.exit_code == EXIT_INPUT
    assert "Row 0 is not a permutation" in result.stderr


@pytest.mark.parametrize("identity", ["F99", "xy.zw = (xy.z)w", "xy = yx"])
def test_check_rejects_bad_identity(invoke, fixture_dir, identity):
    result = invoke("check", str(fixture_dir / "z3.qg"), identity)
    assert result.exit_code == EXIT_INPUT


def test_check_missing_file(invoke, tmp_path):
    result = invoke("check", str(tmp_path / "missing.qg"), "F1")
    assert result.exit_code == EXIT_INPUT


def test_units_plain(invoke, fixture_dir):
    result = invoke("units", str(fixture_dir / "z3.qg"))
    assert result.exit_code == EXIT_OK
    assert "left: 0, right: 0, loop: yes, group: yes" in result.stdout
    assert "idempotents: [0]" in result.stdout


def test_units_json(invoke, fixture_dir):
    result = invoke("units", str(fixture_dir / "f38.qg"), "--json")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["is_loop"] is True
    assert data["is_group"] is False
    assert len(data["associativity_witness"]) == 3


def test_search_finds_witness(invoke, tmp_path):
    out = tmp_path / "witness.qg"
    result = invoke("search", "--identity", "F7", "--require", "no-right-unit", "--orders", "3..3", "--out", str(out))
    assert result.exit_code == EXIT_OK
    assert "witness of order 3" in result.stdout
    table = load_table(out)
    assert table.order == 3


def test_search_json_certificate(invoke):
    result = invoke("search", "--identity", "F36", "--require", "no_right_unit", "--orders", "1..3", "--json")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["identity"] == "F36"
    assert data["order"] == 3
    assert data["right_unit"] is None
    assert data["exhaustive_orders"] == [1, 2]


def test_search_exhaustive_negative(invoke):
    result = invoke("search", "--identity", "F1", "--require", "no-left-unit", "--orders", "1..3")
    assert result.exit_code == EXIT_NEGATIVE
    assert "none (exhaustive)" in result.stdout


def test_search_count_all(invoke):
    result = invoke("search", "--orders", "1..3", "--mode", "count_all")
    assert result.exit_code == EXIT_OK
    assert "order 3: 12" in result.stdout


def test_search_budget(invoke):
    result = invoke("search", "--orders", "4", "--mode", "count_all", "--budget", "10")
    assert result.exit_code == EXIT_BUDGET
    assert "none (budget)" in result.stdout


@pytest.mark.parametrize("orders", ["3..2", "0..2", "two"])
def test_search_bad_orders(invoke, orders):
    result = invoke("search", "--orders", orders)
    assert result.exit_code == EXIT_INPUT


def test_search_order_cap(invoke):
    result = invoke("search", "--orders", "8..8")
    assert result.exit_code == EXIT_INPUT
    assert "exceeds the enumeration cap" in result.stderr


def test_search_threads_from_environment(runner, config_file):
    result = runner.invoke(
        main,
        ["--config", config_file, "search", "--identity", "F7", "--require", "no-right-unit", "--orders", "1..3"],
        env={"BM_LAB_THREADS": "2"},
    )
    assert result.exit_code == EXIT_OK
    assert "witness of order 3" in result.stdout


def test_identity_type(invoke):
    result = invoke("identity", "--parse", "xy.zx = (xy.z)x", "--type")
    assert result.exit_code == EXIT_OK
    assert "(23) = ε, slots {1,4}" in result.stdout


def test_identity_parastrophe(invoke):
    result = invoke("identity", "--label", "F4", "--parastrophe")
    assert result.exit_code == EXIT_OK
    assert "(F4)* = F2: xy.zx = (x.yz)x" in result.stdout


def test_identity_self_dual(invoke):
    result = invoke("identity", "--label", "f6", "--parastrophe")
    assert "F6 (self-dual)" in result.stdout


def test_identity_json(invoke):
    result = invoke("identity", "--label", "F35", "--json")
    data = json.loads(result.stdout)
    assert data["label"] == "F35"
    assert data["type"]["lhs_perm"] == "ε"
    assert data["type"]["rhs_perm"] == "(12)"
    assert data["parastrophe"]["label"] == "F40"


@pytest.mark.parametrize("args", [[], ["--parse", "xy.zx = (xy.z)x", "--label", "F1"]])
def test_identity_needs_one_source(invoke, args):
    result = invoke("identity", *args)
    assert result.exit_code == EXIT_INPUT


def test_identity_parse_error(invoke):
    result = invoke("identity", "--parse", "xy.zx = (xy.z")
    assert result.exit_code == EXIT_INPUT
    assert "Syntax error at position" in result.stderr


def test_catalog(invoke):
    result = invoke("catalog")
    assert result.exit_code == EXIT_OK
    assert "left Moufang" in result.stdout
    assert len(json.loads(invoke("catalog", "--json").stdout)) == 60


def test_table1_small_run(invoke, tmp_path):
    out = tmp_path / "reports" / "table1.json"
    result = invoke("table1", "--max-order", "2", "--witness-cap", "2", "--out", str(out), "--json")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert len(data["rows"]) == 60
    assert json.loads(out.read_text())["max_exhaustive_order"] == 2


def test_table1_rejects_large_max_order(invoke):
    result = invoke("table1", "--max-order", "6")
    assert result.exit_code == EXIT_INPUT
