from fractions import Fraction

import pytest

from magfib.classify import DMembership, d_membership, t_word
from magfib.exceptions import ChainComplexError, EnumerationLimitError
from magfib.fixtures import fibration_fixture, space_fixture
from magfib.magchain import (
    GradedChainComplex,
    Restriction,
    SparseMatrix,
    TensorCell,
    build_complex,
    d_closure_violations,
    default_top_degree,
    dump_complex,
    enumerate_paths,
    quotient_complex,
    subcomplex,
    tensor_and_sum,
)
from magfib.metspace import complete_graph, path_graph, point_space


def test_sparse_matrix_product():
    a = SparseMatrix.from_dense([[1, 2], [0, 1]])
    b = SparseMatrix.from_dense([[0, 1], [1, 0]])
    assert a.matmul(b).to_dense() == [[2, 1], [1, 0]]
    assert a.entry(0, 1) == 2
    assert a.nnz == 3
    assert SparseMatrix.zero(2, 3).is_zero()
    assert SparseMatrix.identity(2).to_dense() == [[1, 0], [0, 1]]
    with pytest.raises(ChainComplexError):
        a.matmul(SparseMatrix.zero(3, 1))


def test_degree_zero_paths():
    space = path_graph(3)
    assert enumerate_paths(space, Fraction(0), 0) == ((0,), (1,), (2,))
    assert enumerate_paths(space, Fraction(1), 0) == ()
    assert enumerate_paths(space, Fraction(0), 1) == ()


def test_complete_graph_pairs():
    pairs = enumerate_paths(complete_graph(3), Fraction(1), 1)
    assert len(pairs) == 6
    assert list(pairs) == sorted(pairs)


def test_interval_length_two_triples():
    assert enumerate_paths(path_graph(2), Fraction(2), 2) == ((0, 1, 0), (1, 0, 1))


def test_paths_have_exact_length(e2):
    space = e2.total
    for n in range(4):
        for tup in enumerate_paths(space, Fraction(3), n):
            assert len(tup) == n + 1
            assert all(tup[i] != tup[i + 1] for i in range(n))
            assert sum(space.d(tup[i], tup[i + 1]) for i in range(n)) == 3


def test_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        enumerate_paths(complete_graph(3), Fraction(3), 3, max_cells=5)


def test_enumeration_limit_from_environment(monkeypatch):
    monkeypatch.setenv("MAGFIB_MAX_CELLS", "10")
    with pytest.raises(EnumerationLimitError):
        enumerate_paths(complete_graph(3), Fraction(3), 3)


def test_default_top_degree():
    assert default_top_degree(path_graph(3), Fraction(3)) == 3
    assert default_top_degree(point_space(), Fraction(2)) == 0
    assert default_top_degree(path_graph(3), Fraction(0)) == 0


def test_interval_boundary_sign():
    complex_ = build_complex(path_graph(3), Fraction(2))
    assert complex_.basis(1) == ((0, 2), (2, 0))
    col = complex_.index(2)[(0, 1, 2)]
    assert complex_.boundary(2).column(col) == {0: -1}
    # (1,2,1) has no interior geodesic point
    assert complex_.boundary(2).column(complex_.index(2)[(0, 1, 0)]) == {}


@pytest.mark.parametrize("m, n", [(3, 1), (3, 2), (2, 3)])
def test_complete_graph_diagonal_has_zero_boundary(m, n):
    complex_ = build_complex(complete_graph(m), Fraction(n))
    assert complex_.rank(n) == m * (m - 1) ** n
    assert all(complex_.boundary(k).is_zero() for k in range(complex_.top_degree + 1))


def test_point_complex():
    complex_ = build_complex(point_space(), Fraction(0))
    assert [complex_.rank(n) for n in range(complex_.top_degree + 1)] == [1]
    assert build_complex(point_space(), Fraction(1)).total_rank() == 0


def test_complex_ranks_match_enumeration(e2):
    complex_ = build_complex(e2.total, Fraction(2))
    for n in range(complex_.top_degree + 1):
        assert complex_.basis(n) == enumerate_paths(e2.total, Fraction(2), n)


def test_d_only_needs_fibration(e2):
    with pytest.raises(ChainComplexError):
        build_complex(e2.total, Fraction(2), restriction=Restriction.D_ONLY)
    with pytest.raises(ChainComplexError):
        build_complex(path_graph(3), Fraction(2), restriction=Restriction.D_ONLY, fibration=e2)


@pytest.mark.parametrize("name", ["paper-E1", "paper-E2", "product-I2xK3"])
def test_d_is_closed_under_boundary(name):
    fib = fibration_fixture(name)
    for length in (Fraction(2), Fraction(3)):
        assert d_closure_violations(fib, length) == []
        d = build_complex(fib.total, length, restriction=Restriction.D_ONLY, fibration=fib)
        for n in range(d.top_degree + 1):
            for tup in d.basis(n):
                assert d_membership(t_word(fib, tup)) is not DMembership.NONE


def test_quotient_by_d_leaves_vertical_then_horizontal_words(e2):
    length = Fraction(3)
    full = build_complex(e2.total, length)
    d = build_complex(e2.total, length, restriction=Restriction.D_ONLY, fibration=e2)
    quotient = quotient_complex(full, d.bases)
    for n in range(quotient.top_degree + 1):
        assert quotient.rank(n) + d.rank(n) == full.rank(n)
        for tup in quotient.basis(n):
            word = t_word(e2, tup)
            assert word == "v" * word.count("v") + "h" * word.count("h")


def test_quotient_edge_cases():
    full = build_complex(path_graph(3), Fraction(2))
    assert quotient_complex(full, []) == full
    empty = quotient_complex(full, full.bases)
    assert empty.total_rank() == 0
    assert subcomplex(full, full.bases) == full


def test_quotient_requires_a_subcomplex():
    full = build_complex(path_graph(3), Fraction(2))
    with pytest.raises(ChainComplexError) as info:
        quotient_complex(full, [(), (), [(0, 1, 2)]])
    assert info.value.generator == (0, 1, 2)
    assert info.value.degree == 2
    with pytest.raises(ChainComplexError):
        subcomplex(full, [[(5,)]])


def test_tensor_with_point_is_identity():
    left = build_complex(path_graph(3), Fraction(2))
    unit = build_complex(point_space(), Fraction(0))
    product = tensor_and_sum([(left, unit)])
    assert product.boundaries == left.boundaries
    assert product.basis(2)[0] == TensorCell((Fraction(2), Fraction(0)), (0, 1, 0), (0,))


def test_tensor_rank_for_interval_times_triangle():
    interval, triangle = path_graph(2), complete_graph(3)
    pairs = [
        (build_complex(interval, Fraction(0)), build_complex(triangle, Fraction(1))),
        (build_complex(interval, Fraction(1)), build_complex(triangle, Fraction(0))),
    ]
    assert tensor_and_sum(pairs).rank(1) == 18


@pytest.mark.parametrize(
    "left_name, right_name",
    [("I3", "C4"), ("C4", "I3"), ("K3", "I2"), ("C5", "C4")],
)
def test_tensor_satisfies_d_squared(left_name, right_name):
    left = build_complex(space_fixture(left_name), Fraction(2))
    right = build_complex(space_fixture(right_name), Fraction(2))
    product = tensor_and_sum([(left, right)])
    product.check_d_squared()
    for n in range(product.top_degree + 1):
        expected = sum(left.rank(m) * right.rank(n - m) for m in range(n + 1))
        assert product.rank(n) == expected


def test_tensor_rejects_duplicate_summands():
    c = build_complex(path_graph(2), Fraction(1))
    with pytest.raises(ChainComplexError):
        tensor_and_sum([(c, c), (c, c)])


def test_shape_mismatch_is_rejected():
    with pytest.raises(ChainComplexError):
        GradedChainComplex(((0,), (1,)), (SparseMatrix.zero(0, 1), SparseMatrix.zero(2, 1)))


def test_dump_complex():
    dumped = dump_complex(build_complex(path_graph(3), Fraction(2)))
    assert dumped["l"] == "2"
    assert [d["n"] for d in dumped["degrees"]] == [0, 1, 2]
    assert dumped["degrees"][0]["basis"] == []
