"""Tests for the Latin-square model finder."""

import pytest

from src.core.catalog import get_identity
from src.core.evaluator import classify, satisfies
from src.core.quasigroup import is_latin, parse_table
from src.core.search import (
    BudgetExhausted,
    Column,
    LatinSquareSearch,
    OrderTooLarge,
    Predicate,
    SearchMode,
    SearchQuery,
    enumerate_latin_squares,
    find,
    is_relabeling_canonical,
    latin_square_stack,
    naive_latin_squares,
    random_latin_square,
    survey,
    verify_plus_cell,
)


def as_tuples(table):
    return tuple(tuple(row) for row in table.rows())


@pytest.mark.parametrize("order, count", [(1, 1), (2, 2), (3, 12), (4, 576)])
def test_enumeration_matches_naive_oracle(order, count):
    found = [as_tuples(t) for t in enumerate_latin_squares(order)]
    oracle = naive_latin_squares(order)
    assert len(found) == count
    assert len(oracle) == count
    assert set(found) == set(oracle)
    assert found == sorted(found)


def test_stack_is_cached_and_read_only():
    stack = latin_square_stack(3)
    assert stack.shape == (12, 3, 3)
    assert latin_square_stack(3) is stack
    with pytest.raises(ValueError):
        stack[0, 0, 0] = 1


def test_count_all_small_orders():
    result = find(SearchQuery(min_order=1, max_order=4, mode="count_all"))
    assert result.counts == {1: 1, 2: 2, 3: 12, 4: 576}
    assert result.exhaustive_orders == [1, 2, 3, 4]
    assert result.witness is None


@pytest.mark.slow
def test_count_all_order_five():
    result = find(SearchQuery(min_order=5, max_order=5, mode="count_all"))
    assert result.counts == {5: 161280}


def test_f7_witness_without_right_unit():
    query = SearchQuery(identity="F7", predicate="no_right_unit", min_order=3, max_order=3)
    result = find(query)
    witness = result.witness
    assert witness is not None
    assert witness.order == 3
    assert witness.certificate.sat.holds
    assert witness.certificate.profile.left_unit is not None
    assert witness.certificate.profile.right_unit is None
    assert witness.reverify()
    assert result.outcome == "witness of order 3"


def test_f7_witness_is_smallest_over_the_range():
    result = find(SearchQuery(identity="F7", predicate="no_right_unit", min_order=1, max_order=4))
    assert result.witness.order == 3
    assert result.witness.exhaustive_orders == [1, 2]


def test_f36_witness_at_order_three():
    result = find(SearchQuery(identity="F36", predicate="no-right-unit", min_order=3, max_order=3))
    assert result.found
    assert satisfies(result.witness.cayley, get_identity("F36")).holds


def test_f1_has_no_left_unit_counterexample():
    result = find(SearchQuery(identity="F1", predicate="no_left_unit", min_order=1, max_order=4))
    assert result.witness is None
    assert not result.budget_exhausted
    assert result.exhaustive_orders == [1, 2, 3, 4]
    assert result.outcome == "none (exhaustive)"


@pytest.mark.slow
def test_f35_witness_without_left_unit():
    result = find(SearchQuery(identity="F35", predicate="no_left_unit", min_order=1, max_order=6))
    assert result.found
    assert result.witness.order <= 6
    assert result.witness.reverify()


def test_search_is_deterministic():
    query = SearchQuery(identity="F9", predicate="no_unit_either_side", min_order=1, max_order=4)
    first, second = find(query), find(query)
    assert first.witness.table == second.witness.table
    assert first.nodes_expanded == second.nodes_expanded


@pytest.mark.parametrize("label, order", [("F7", 3), ("F19", 4), ("F38", 4)])
def test_incremental_pruning_agrees_with_complete_checks(label, order):
    identity = get_identity(label)
    pruned = [as_tuples(t) for t in LatinSquareSearch(order, identity, incremental=True)]
    complete = [as_tuples(t) for t in LatinSquareSearch(order, identity, incremental=False)]
    assert pruned == complete


def test_incremental_pruning_expands_fewer_nodes():
    identity = get_identity("F1")
    pruned = LatinSquareSearch(4, identity, incremental=True)
    complete = LatinSquareSearch(4, identity, incremental=False)
    assert len(list(pruned)) == len(list(complete)) == 16
    assert pruned.nodes_expanded < complete.nodes_expanded


def test_first_value_restricts_the_branch():
    tables = list(LatinSquareSearch(3, first_value=2))
    assert len(tables) == 4
    assert all(t.mul(0, 0) == 2 for t in tables)


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        LatinSquareSearch(8)
    with pytest.raises(OrderTooLarge):
        find(SearchQuery(max_order=8))
    with pytest.raises(OrderTooLarge):
        latin_square_stack(5)


def test_budget_exhaustion_is_recorded():
    query = SearchQuery(min_order=4, max_order=4, budget=10, mode="count_all")
    result = find(query)
    assert result.budget_exhausted
    assert result.witness is None
    assert result.outcome == "none (budget)"
    assert result.exhaustive_orders == []
    with pytest.raises(BudgetExhausted) as exc:
        result.raise_for_budget()
    assert exc.value.budget == 10


def test_budget_exhaustion_raises_inside_the_engine():
    with pytest.raises(BudgetExhausted):
        list(LatinSquareSearch(4, budget=5))


def test_budget_keeps_earlier_orders():
    result = find(SearchQuery(min_order=1, max_order=4, budget=200, mode="count_all"))
    assert result.budget_exhausted
    assert result.counts == {1: 1, 2: 2, 3: 12}
    assert result.exhaustive_orders == [1, 2, 3]


def test_canonical_filter_counts_isomorphism_classes():
    result = find(SearchQuery(min_order=1, max_order=3, mode="count_all"), canonical_filter=True)
    assert result.counts == {1: 1, 2: 1, 3: 5}


def test_relabeling_canonical(z3):
    assert is_relabeling_canonical(z3)
    swapped = parse_table("order 2\n1 0\n0 1\n")
    assert not is_relabeling_canonical(swapped)


def test_enumerate_all_collects_tables():
    result = find(SearchQuery(identity="F1", min_order=3, max_order=3, mode="enumerate_all"))
    assert result.counts == {3: 3}
    assert len(result.tables) == 3


def test_parallel_search_matches_serial():
    query = SearchQuery(identity="F7", predicate="no_right_unit", min_order=1, max_order=4)
    serial = find(query)
    parallel = find(query, threads=2)
    assert parallel.witness.table == serial.witness.table

    counting = SearchQuery(identity="F19", min_order=1, max_order=4, mode="count_all")
    assert find(counting, threads=3).counts == find(counting).counts


@pytest.mark.parametrize("budget", [300, 2840, 10 ** 6])
def test_parallel_count_respects_budget(budget):
    query = SearchQuery(min_order=4, max_order=4, budget=budget, mode="count_all")
    serial = find(query)
    parallel = find(query, threads=4)
    assert parallel.nodes_expanded <= budget
    assert parallel.nodes_expanded == serial.nodes_expanded
    assert parallel.outcome == serial.outcome
    assert parallel.counts == serial.counts
    assert parallel.budget_exhausted == serial.budget_exhausted


def test_parallel_count_runs_out_where_serial_does():
    result = find(SearchQuery(min_order=4, max_order=4, budget=2840, mode="count_all"), threads=4)
    assert result.budget_exhausted
    assert result.counts == {}
    assert result.outcome == "none (budget)"


@pytest.mark.parametrize("budget", [1, 5, 10, 20, 40, 80])
def test_parallel_witness_respects_budget(budget):
    query = SearchQuery(identity="F7", predicate="no_right_unit", min_order=3, max_order=3, budget=budget)
    serial = find(query)
    parallel = find(query, threads=2)
    assert parallel.nodes_expanded <= budget
    assert parallel.nodes_expanded == serial.nodes_expanded
    assert parallel.outcome == serial.outcome
    assert (parallel.witness is None) == (serial.witness is None)
    if serial.witness is not None:
        assert parallel.witness.table == serial.witness.table


def test_witness_serialization():
    result = find(SearchQuery(identity="F7", predicate="no_right_unit", min_order=1, max_order=3))
    certificate = result.witness.certificate_json()
    assert set(certificate) == {
        "identity", "predicate", "order", "table", "left_unit", "right_unit",
        "is_group", "nodes_expanded", "exhaustive_orders",
    }
    assert certificate["identity"] == "F7"
    assert certificate["predicate"] == "no_right_unit"
    assert certificate["right_unit"] is None
    assert parse_table(result.witness.to_text()) == result.witness.cayley


@pytest.mark.parametrize("text, predicate", [
    ("no-left-unit", Predicate.NO_LEFT_UNIT),
    ("always(true)", Predicate.ALWAYS),
    (" NOT_LOOP ", Predicate.NOT_LOOP),
])
def test_predicate_parse(text, predicate):
    assert Predicate.parse(text) == predicate


def test_column_parse():
    assert Column.parse("Lo.") == Column.LOOP
    assert Column.parse("gr") == Column.GROUP
    assert Column.parse("f") == Column.F
    assert Column.E.counterexample == Predicate.NO_RIGHT_UNIT


def test_query_validation():
    with pytest.raises(ValueError):
        SearchQuery(min_order=3, max_order=2)
    with pytest.raises(ValueError):
        SearchQuery(budget=0)
    with pytest.raises(ValueError):
        SearchQuery(predicate="sometimes")
    assert SearchQuery(identity=get_identity("F7")).identity == "F7"


@pytest.mark.parametrize("label, column", [("F18", "group"), ("F41", "loop"), ("F42", "f"), ("F19", "e")])
def test_plus_cells_hold_up_to_order_four(label, column):
    report = verify_plus_cell(label, column, 4)
    assert report.holds
    assert report.exhaustive_orders == [1, 2, 3, 4]
    assert report.satisfying_counts[1] == 1


def test_minus_cell_gets_a_counterexample():
    report = verify_plus_cell("F7", "e", 3)
    assert not report.holds
    table = parse_table("order 3\n" + "\n".join(" ".join(map(str, row)) for row in report.counterexample))
    assert classify(table).right_unit is None


def test_plus_cell_budget():
    report = verify_plus_cell("F19", "e", 5, budget=10)
    assert report.budget_exhausted
    assert not report.holds
    assert report.exhaustive_orders == [1, 2, 3, 4]
    with pytest.raises(BudgetExhausted):
        report.raise_for_budget()


def test_survey_of_f7():
    result = survey(get_identity("F7"), range(1, 4))
    assert not result.refuted(Column.F)
    assert result.refuted(Column.E)
    assert result.refuted(Column.GROUP)
    assert result.exhaustive_orders == [1, 2, 3]


@pytest.mark.parametrize("order", [1, 4, 6])
def test_random_latin_square_is_seeded(order):
    first = random_latin_square(order, seed=7)
    assert first == random_latin_square(order, seed=7)
    assert first.order == order
    assert is_latin(first.rows())


def test_random_latin_squares_vary_with_seed():
    tables = {as_tuples(random_latin_square(5, seed)) for seed in range(10)}
    assert len(tables) > 1
