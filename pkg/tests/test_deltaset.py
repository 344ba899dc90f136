from fractions import Fraction

import pytest

from magfib.deltaset import (
    BASEPOINT,
    DeltaVariant,
    PointedDeltaSet,
    build_causal_complex,
    build_pointed_delta,
    cau_verify,
    cau_verify_range,
    deltaiso_check,
    reduced_chain_complex,
    repoint,
)
from magfib.exceptions import DeltaSetError, InputError
from magfib.fixtures import fibration_fixture, space_fixture
from magfib.homology import homology
from magfib.magchain import Restriction, build_complex, enumerate_paths
from magfib.metspace import complete_graph, from_matrix, path_graph


def test_degree_zero_cells():
    ds = build_pointed_delta(path_graph(3), Fraction(0))
    assert ds.cells == (((0,), (1,), (2,)),)
    assert ds.faces == (((), (), ()),)


def test_complete_graph_faces_all_collapse():
    ds = build_pointed_delta(complete_graph(3), Fraction(1))
    assert len(ds.cells[1]) == 6
    assert all(face == BASEPOINT for faces in ds.faces[1] for face in faces)


def test_interval_interior_face():
    ds = build_pointed_delta(path_graph(3), Fraction(2))
    j = ds.index(2)[(0, 1, 2)]
    assert ds.faces[2][j][0] == BASEPOINT
    assert ds.cells[1][ds.faces[2][j][1]] == (0, 2)
    assert ds.faces[2][j][2] == BASEPOINT


def test_simplicial_identity_violation_is_reported():
    broken = PointedDeltaSet(
        (("v0", "v1"), ("e0", "e1"), ("t",)),
        (((), ()), ((0, 1), (0, 0)), ((0, 0, 1),)),
    )
    with pytest.raises(DeltaSetError) as info:
        broken.validate()
    assert info.value.witness == (2, "t", 0, 2)


def test_wrong_face_count_is_reported():
    broken = PointedDeltaSet((("v",), ("e",)), (((),), ((0,),)))
    with pytest.raises(DeltaSetError):
        broken.validate()


@pytest.mark.parametrize("name", ["K3", "I3", "C4", "C5", "paper-E2"])
@pytest.mark.parametrize("length", [0, 1, 2, 3])
def test_reduced_chains_are_the_magnitude_complex(name, length):
    space = space_fixture(name)
    ds = build_pointed_delta(space, Fraction(length))
    assert reduced_chain_complex(ds) == build_complex(space, Fraction(length))


@pytest.mark.parametrize("length", [1, 2, 3])
def test_reduced_d_chains_are_the_d_subcomplex(e2, length):
    ds = build_pointed_delta(e2.total, Fraction(length), variant=DeltaVariant.D, fib=e2)
    expected = build_complex(e2.total, Fraction(length), restriction=Restriction.D_ONLY, fibration=e2)
    assert reduced_chain_complex(ds) == expected


def test_d_variant_needs_a_fibration(e2):
    with pytest.raises(DeltaSetError):
        build_pointed_delta(e2.total, Fraction(1), variant=DeltaVariant.D)


def test_only_the_basepoint():
    ds = PointedDeltaSet(((),), ((),))
    ds.validate()
    reduced = reduced_chain_complex(ds)
    assert reduced.total_rank() == 0
    assert homology(reduced).is_zero()


def test_repoint_collapses_the_subset(e2):
    length = Fraction(2)
    whole = build_pointed_delta(e2.total, length)
    sub = build_pointed_delta(e2.total, length, variant=DeltaVariant.D, fib=e2)
    collapsed = repoint(whole, sub.cells)
    for n in range(whole.top_degree + 1):
        assert len(collapsed.cells[n]) == len(whole.cells[n]) - len(sub.cells[n])


def test_repoint_needs_a_delta_subset():
    ds = build_pointed_delta(path_graph(3), Fraction(2))
    with pytest.raises(DeltaSetError):
        repoint(ds, [(), (), [(0, 1, 2)]])


@pytest.mark.parametrize("length", [0, 1, 2, 3])
@pytest.mark.parametrize("basepoint", [0, 1, 2])
def test_quotient_delta_sets_match_the_product(e2, length, basepoint):
    report = deltaiso_check(e2, basepoint, Fraction(length))
    assert report.ok, report.failure
    assert all(left == right for left, right in report.cell_counts)


@pytest.mark.parametrize("name", ["paper-E1", "product-I2xK3"])
def test_quotient_delta_sets_match_for_other_fibrations(name):
    fib = fibration_fixture(name)
    for length in range(3):
        assert deltaiso_check(fib, 0, Fraction(length)).ok


def test_causal_complex_of_an_edge():
    causal = build_causal_complex(path_graph(2), 1, 0, 1)
    assert causal.vertices == ((0, Fraction(0)), (1, Fraction(1)))
    assert causal.full.rank(0) == 2
    assert causal.full.rank(1) == 1
    assert causal.relative.rank(0) == 0
    summary = homology(causal.relative)
    assert summary.betti(1) == 1
    assert summary.signature() == ((1, 1, ()),)


def test_causal_complex_at_length_zero():
    causal = build_causal_complex(path_graph(3), 0, 1, 1)
    assert causal.vertices == ((1, Fraction(0)),)
    assert homology(causal.relative).betti(0) == 1
    assert build_causal_complex(path_graph(3), 0, 0, 1).full.total_rank() == 0


@pytest.mark.parametrize("a, b", [(0, 2), (1, 3), (0, 0)])
def test_relative_generators_are_tuples_between_the_endpoints(a, b):
    space = space_fixture("C4")
    causal = build_causal_complex(space, 2, a, b)
    for n in range(causal.relative.top_degree + 1):
        tuples = [p for p in enumerate_paths(space, Fraction(2), n) if p[0] == a and p[-1] == b]
        assert causal.relative.rank(n) == len(tuples)


@pytest.mark.parametrize("name", ["I2", "I3", "C4"])
def test_causal_homology_matches_without_shift(name):
    reports, common = cau_verify_range(space_fixture(name), 2, jobs=1)
    assert 0 in common
    assert all(report.fitted_shift == 0 for report in reports)
    assert all(row.betti_relative == row.betti_mh for report in reports for row in report.rows)


def test_causal_check_is_grid_independent():
    space = space_fixture("C4")
    coarse = cau_verify(space, 2, refine=1, jobs=1)
    fine = cau_verify(space, 2, refine=2, jobs=1)
    assert coarse.rows == fine.rows
    assert coarse.consistent_shifts == fine.consistent_shifts
    assert coarse.rows[-1].n == 2


def test_causal_check_needs_integers():
    halves = from_matrix(["a", "b"], [[0, "1/2"], ["1/2", 0]])
    with pytest.raises(InputError):
        cau_verify(halves, 1)
    with pytest.raises(InputError):
        cau_verify(path_graph(2), Fraction(1, 2))
    with pytest.raises(InputError):
        build_causal_complex(path_graph(2), 1, 0, 1, refine=0)
