from fractions import Fraction

import pytest

from magfib.exceptions import InputError, MetricError
from magfib.fixtures import space_fixture
from magfib.metspace import (
    achievable_lengths,
    cycle_graph,
    format_length,
    from_graph,
    from_matrix,
    is_between,
    parse_length,
    path_graph,
    validate_metric,
)


def test_path_graph_distances():
    space = path_graph(3)
    assert space.labels == ("1", "2", "3")
    assert space.d(0, 2) == 2
    assert space.d(2, 0) == 2
    assert space.d(1, 1) == 0


def test_twisted_hexagon_distance(e2):
    total = e2.total
    assert total.d(total.index_of("a"), total.index_of("f")) == 2


def test_graph_metric_matches_floyd_warshall():
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (2, 5)]
    space = from_graph(5, edges)
    inf = Fraction(10**6)
    table = [[Fraction(0) if i == j else inf for j in range(5)] for i in range(5)]
    for u, v in edges:
        table[u - 1][v - 1] = table[v - 1][u - 1] = Fraction(1)
    for k in range(5):
        for i in range(5):
            for j in range(5):
                table[i][j] = min(table[i][j], table[i][k] + table[k][j])
    assert [list(row) for row in space.dist] == table


@pytest.mark.parametrize(
    "edges, vertices",
    [
        ([(1, 2)], 3),
        ([(1, 1), (1, 2)], 2),
        ([(1, 7)], 2),
    ],
)
def test_bad_graphs_are_rejected(edges, vertices):
    with pytest.raises(MetricError):
        from_graph(vertices, edges)


@pytest.mark.parametrize(
    "rows, axiom, witness",
    [
        ([[0, 1], [2, 0]], "symmetry", ("1", "2")),
        ([[1, 1], [1, 0]], "identity", ("1",)),
        ([[0, 0], [0, 0]], "positivity", ("1", "2")),
        ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], "triangle", ("1", "2", "3")),
    ],
)
def test_validate_metric_names_first_violation(rows, axiom, witness):
    labels = [str(i + 1) for i in range(len(rows))]
    result = validate_metric(from_matrix(labels, rows))
    assert not result.ok
    assert result.axiom == axiom
    assert result.witness == witness
    assert axiom in result.message()


def test_validate_metric_accepts_fixtures():
    for name in ("point", "I4", "K3", "C5", "paper-E1", "paper-E2"):
        assert validate_metric(space_fixture(name)).ok


def test_negative_entry_is_input_error():
    with pytest.raises(InputError):
        from_matrix(["x", "y"], [[0, -1], [-1, 0]])


def test_betweenness():
    line = path_graph(3)
    assert is_between(line, 0, 1, 2)
    assert not is_between(line, 0, 2, 1)
    triangle = space_fixture("K3")
    assert not is_between(triangle, 0, 1, 2)
    # every point is between itself and anything
    assert is_between(triangle, 0, 0, 2)


def test_betweenness_in_square_tower(e1, pts):
    x, y, z = pts(e1.total, 1, 2, 6)
    assert is_between(e1.total, x, y, z)


@pytest.mark.parametrize("name", ["I4", "K3", "C5", "C6", "paper-E1", "paper-E2", "product-I2xK3"])
def test_betweenness_is_symmetric_and_holds_at_endpoints(name):
    space = space_fixture(name)
    points = range(space.size)
    for x in points:
        for y in points:
            assert is_between(space, x, y, y)
            assert is_between(space, x, x, y)
            for z in points:
                assert is_between(space, x, y, z) == is_between(space, z, y, x)


@pytest.mark.parametrize(
    "text, expected",
    [("3/4", Fraction(3, 4)), ("2", Fraction(2)), (" 5 ", Fraction(5)), (7, Fraction(7))],
)
def test_parse_length(text, expected):
    assert parse_length(text) == expected


@pytest.mark.parametrize("text", ["0.5", "1e3", "abc", "1/0", True])
def test_parse_length_rejects_inexact(text):
    with pytest.raises(InputError):
        parse_length(text)


def test_format_length():
    assert format_length(Fraction(4, 2)) == "2"
    assert format_length(Fraction(3, 4)) == "3/4"


def test_achievable_lengths():
    assert achievable_lengths(path_graph(2), Fraction(2)) == [0, 1, 2]
    halves = from_matrix(["a", "b"], [[0, "1/2"], ["1/2", 0]])
    assert achievable_lengths(halves, Fraction(1)) == [0, Fraction(1, 2), 1]


def test_unknown_label():
    with pytest.raises(InputError):
        cycle_graph(4).index_of("9")
