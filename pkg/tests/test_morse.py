from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from magfib.exceptions import MorseError
from magfib.fixtures import fibration_fixture
from magfib.homology import homology
from magfib.magchain import GradedChainComplex, Restriction, SparseMatrix, build_complex
from magfib.morse import (
    MatchedEdge,
    elimination_order,
    hv_matching,
    matching_digraph,
    morse_reduce,
    validate_matching,
)


def _complex(bases, dense_boundaries):
    boundaries = [SparseMatrix.zero(0, len(bases[0]))]
    for n, rows in enumerate(dense_boundaries, start=1):
        boundaries.append(SparseMatrix.from_dense(rows, n_cols=len(bases[n])))
    return GradedChainComplex(tuple(tuple(b) for b in bases), tuple(boundaries))


def _random_simplicial(rng):
    """Downward closure of a few random simplices on four vertices."""
    faces = set()
    for _ in range(int(rng.integers(1, 5))):
        size = int(rng.integers(1, 5))
        top = tuple(sorted(int(v) for v in rng.choice(4, size=size, replace=False)))
        for k in range(1, size + 1):
            faces.update(combinations(top, k))
    bases = [sorted(f for f in faces if len(f) == n + 1) for n in range(4)]
    while not bases[-1]:
        bases.pop()
    boundaries = [SparseMatrix.zero(0, len(bases[0]))]
    for n in range(1, len(bases)):
        index = {f: i for i, f in enumerate(bases[n - 1])}
        cols = [{index[s[:i] + s[i + 1:]]: (-1) ** i for i in range(n + 1)} for s in bases[n]]
        boundaries.append(SparseMatrix.from_columns(len(bases[n - 1]), cols))
    return GradedChainComplex(tuple(tuple(b) for b in bases), tuple(boundaries))


def _random_two_term(rng):
    """A single random integer boundary, so torsion shows up."""
    rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    dense = [[int(v) for v in rng.integers(-2, 3, size=cols)] for _ in range(rows)]
    bases = [[("y", i) for i in range(rows)], [("x", j) for j in range(cols)]]
    return _complex(bases, [dense])


def _greedy_matching(complex_, rng):
    candidates = []
    for n in range(1, complex_.top_degree + 1):
        for j, col in enumerate(complex_.boundary(n).columns):
            for r, v in col:
                if v in (1, -1):
                    candidates.append((n, complex_.basis(n)[j], complex_.basis(n - 1)[r]))
    edges = []
    for k in rng.permutation(len(candidates)):
        trial = edges + [candidates[int(k)]]
        if validate_matching(complex_, trial).ok:
            edges = trial
    report = validate_matching(complex_, edges)
    assert report.ok
    return report.matching


def test_empty_matching_keeps_everything():
    complex_ = build_complex(fibration_fixture("paper-E2").total, Fraction(2))
    report = validate_matching(complex_, [])
    assert report.ok
    assert report.matching.critical_count() == complex_.total_rank()
    assert morse_reduce(report.matching) is complex_


def test_non_unit_coefficient():
    complex_ = _complex([["b"], ["a"]], [[[2]]])
    report = validate_matching(complex_, [(1, "a", "b")])
    assert report.condition == "unit_coefficient"
    assert report.witness == ("a", "b", 2)


def test_shared_cell_breaks_disjointness():
    complex_ = _complex([["b"], ["a1", "a2"]], [[[1, 1]]])
    report = validate_matching(complex_, [(1, "a1", "b"), (1, "a2", "b")])
    assert report.condition == "disjointness"
    assert report.witness == ("b",)


def test_cycle_breaks_acyclicity():
    complex_ = _complex([["b1", "b2"], ["a1", "a2"]], [[[1, 1], [1, 1]]])
    edges = [(1, "a1", "b1"), (1, "a2", "b2")]
    assert matching_digraph(complex_, [MatchedEdge(*e) for e in edges]).number_of_edges() == 4
    report = validate_matching(complex_, edges)
    assert report.condition == "acyclicity"
    assert set(report.witness) <= {"a1", "a2", "b1", "b2"}
    assert "acyclicity" in report.message()


def test_unknown_generator():
    complex_ = _complex([["b"], ["a"]], [[[1]]])
    with pytest.raises(MorseError):
        validate_matching(complex_, [(1, "a", "zz")])
    with pytest.raises(MorseError):
        validate_matching(complex_, [(3, "a", "b")])


@pytest.mark.parametrize("name, l_max", [("paper-E2", 4), ("paper-E1", 3), ("product-I2xK3", 3)])
def test_hv_matching_is_perfect(name, l_max):
    fib = fibration_fixture(name)
    for length in range(1, l_max + 1):
        d = build_complex(fib.total, Fraction(length), restriction=Restriction.D_ONLY, fibration=fib)
        matching = hv_matching(fib, d)
        assert matching.is_perfect()
        assert validate_matching(d, matching.edges).ok
        assert morse_reduce(matching, check_steps=True).total_rank() == 0


def test_hv_matching_order_follows_weight(e1):
    d = build_complex(e1.total, Fraction(3), restriction=Restriction.D_ONLY, fibration=e1)
    matching = hv_matching(e1, d)
    assert sorted(elimination_order(matching)) == list(range(len(matching.edges)))


def test_hv_matching_rejects_non_d_cells(e2):
    with pytest.raises(MorseError):
        hv_matching(e2, build_complex(e2.total, Fraction(2)))


def test_hv_matching_rejects_truncated_complex(e2):
    d = build_complex(e2.total, Fraction(3), n_max=2, restriction=Restriction.D_ONLY, fibration=e2)
    with pytest.raises(MorseError):
        hv_matching(e2, d)


@pytest.mark.parametrize("seed", range(100))
def test_reduction_preserves_homology(seed):
    rng = np.random.default_rng(seed)
    complex_ = _random_simplicial(rng) if seed % 2 else _random_two_term(rng)
    matching = _greedy_matching(complex_, rng)
    reduced = morse_reduce(matching, check_steps=True)
    for n in range(complex_.top_degree + 1):
        assert reduced.basis(n) == matching.critical(n)
    assert homology(reduced).same_as(homology(complex_))
