from fractions import Fraction

import pytest

from magfib.exceptions import ChainComplexError, ChainMapError
from magfib.fixtures import space_fixture
from magfib.homology import homology, is_quasi_iso, mapping_cone, rational_betti, rational_rank, smith_invariants
from magfib.kunneth import projection_map
from magfib.magchain import ChainMap, GradedChainComplex, Restriction, SparseMatrix, build_complex, quotient_complex
from magfib.metspace import complete_graph, path_graph


def _reversed(complex_):
    bases = tuple(tuple(reversed(b)) for b in complex_.bases)
    boundaries = []
    for n, bd in enumerate(complex_.boundaries):
        dense = [list(reversed(row)) for row in reversed(bd.to_dense())]
        boundaries.append(SparseMatrix.from_dense(dense, n_cols=bd.n_cols))
    return GradedChainComplex(bases, tuple(boundaries), complex_.length)


@pytest.mark.parametrize(
    "rows, rank, factors",
    [
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], 3, (2, 6, 12)),
        ([[2, 0], [0, 3]], 2, (1, 6)),
        ([[1, 1], [1, 1]], 1, (1,)),
        ([[0, 0], [0, 0]], 0, ()),
        ([[4, 6]], 1, (2,)),
    ],
)
def test_smith_invariants(rows, rank, factors):
    assert smith_invariants(SparseMatrix.from_dense(rows)) == (rank, factors)


def test_rational_rank_agrees():
    matrix = SparseMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert rational_rank(matrix) == 3
    assert rational_rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1
    assert rational_rank(SparseMatrix.zero(0, 3)) == 0


@pytest.mark.parametrize("m, n", [(3, 1), (3, 2), (2, 3)])
def test_complete_graph_homology_is_the_chain_group(m, n):
    summary = homology(build_complex(complete_graph(m), Fraction(n)))
    assert summary.signature() == ((n, m * (m - 1) ** n, ()),)


def test_interval_of_three_points():
    summary = homology(build_complex(path_graph(3), Fraction(2)))
    assert [summary.betti(n) for n in range(3)] == [0, 0, 4]
    assert summary.signature() == ((2, 4, ()),)


def test_torsion_is_reported():
    complex_ = GradedChainComplex(
        (("b",), ("a",)),
        (SparseMatrix.zero(0, 1), SparseMatrix.from_dense([[2]])),
    )
    summary = homology(complex_)
    assert summary.at(0).betti == 0
    assert summary.torsion(0) == (2,)
    assert summary.at(1).is_zero
    assert not summary.is_zero()


def test_d_squared_is_checked():
    broken = GradedChainComplex(
        (("p",), ("q",), ("r",)),
        (SparseMatrix.zero(0, 1), SparseMatrix.from_dense([[1]]), SparseMatrix.from_dense([[1]])),
    )
    with pytest.raises(ChainComplexError) as info:
        homology(broken)
    assert info.value.generator == "r"


@pytest.mark.parametrize("name, length", [("C5", 3), ("paper-E2", 3), ("I4", 3), ("K4", 2)])
def test_homology_is_basis_order_independent(name, length):
    complex_ = build_complex(space_fixture(name), Fraction(length))
    assert homology(_reversed(complex_)) == homology(complex_)


@pytest.mark.parametrize("name, length", [("C5", 3), ("paper-E2", 2), ("paper-E2", 3), ("C4", 4)])
def test_rational_betti_matches_integer_betti(name, length):
    complex_ = build_complex(space_fixture(name), Fraction(length))
    summary = homology(complex_)
    assert rational_betti(complex_) == [summary.betti(n) for n in range(complex_.top_degree + 1)]
    assert summary.euler_characteristic() == complex_.euler_characteristic()


def test_identity_and_zero_maps():
    complex_ = build_complex(complete_graph(3), Fraction(1))
    assert is_quasi_iso(ChainMap.identity(complex_))
    assert not is_quasi_iso(ChainMap.zero(complex_, complex_))


def test_mapping_cone_of_identity_is_acyclic():
    complex_ = build_complex(path_graph(3), Fraction(2))
    cone = mapping_cone(ChainMap.identity(complex_))
    assert cone.rank(3) == complex_.rank(2)
    assert homology(cone).is_zero()


def test_projection_onto_quotient_by_d_is_a_quasi_iso(e2):
    length = Fraction(3)
    full = build_complex(e2.total, length)
    d = build_complex(e2.total, length, restriction=Restriction.D_ONLY, fibration=e2)
    quotient = quotient_complex(full, d.bases)
    assert homology(d).is_zero()
    assert is_quasi_iso(projection_map(full, quotient))


def test_non_chain_map_is_rejected():
    complex_ = build_complex(path_graph(3), Fraction(2))
    components = (
        SparseMatrix.zero(0, 0),
        SparseMatrix.zero(2, 2),
        SparseMatrix.identity(6),
    )
    with pytest.raises(ChainMapError) as info:
        is_quasi_iso(ChainMap(complex_, complex_, components))
    assert info.value.degree == 2
    assert info.value.generator == (0, 1, 2)
