"""Integer homology via sparse Smith normal form, plus mapping cones and quasi-isomorphism tests."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Hashable, List, Optional, Set, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import ChainMapError
from .magchain import ChainMap, GradedChainComplex, SparseMatrix
from .metspace import format_length

logger = logging.getLogger(__name__)

__all__ = (
    "DegreeHomology",
    "HomologySummary",
    "homology",
    "is_quasi_iso",
    "mapping_cone",
    "rational_betti",
    "rational_rank",
    "smith_invariants",
)


@dataclass(frozen=True)
class DegreeHomology:
    n: int
    betti: int
    torsion: Tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion


@dataclass(frozen=True)
class HomologySummary:
    length: Optional[Fraction]
    degrees: Tuple[DegreeHomology, ...]

    def at(self, n: int) -> DegreeHomology:
        if 0 <= n < len(self.degrees):
            return self.degrees[n]
        return DegreeHomology(n, 0)

    def betti(self, n: int) -> int:
        return self.at(n).betti

    def torsion(self, n: int) -> Tuple[int, ...]:
        return self.at(n).torsion

    def is_zero(self) -> bool:
        return all(d.is_zero for d in self.degrees)

    def signature(self) -> Tuple[Tuple[int, int, Tuple[int, ...]], ...]:
        """Nonzero degrees only, so complexes of different top degree compare cleanly."""
        return tuple((d.n, d.betti, d.torsion) for d in self.degrees if not d.is_zero)

    def same_as(self, other: "HomologySummary") -> bool:
        return self.signature() == other.signature()

    def euler_characteristic(self) -> int:
        return sum((-1) ** d.n * d.betti for d in self.degrees)

    def to_record(self) -> Dict[str, object]:
        return {
            "l": format_length(self.length) if self.length is not None else None,
            "H": [{"n": d.n, "betti": d.betti, "torsion": list(d.torsion)} for d in self.degrees],
        }


def _choose_pivot(rows: Dict[int, Dict[int, int]], cols: Dict[int, Set[int]]) -> Tuple[int, int]:
    best: Optional[Tuple[Tuple[int, int, int, int], Tuple[int, int]]] = None
    for r, row in rows.items():
        for c, v in row.items():
            size = abs(v)
            key = (0 if size == 1 else size, (len(row) - 1) * (len(cols[c]) - 1), r, c)
            if best is None or key < best[0]:
                best = (key, (r, c))
    assert best is not None
    return best[1]


def _diagonalise(matrix: SparseMatrix) -> List[int]:
    """Unimodular row/column elimination; returns the absolute diagonal entries."""
    rows: Dict[int, Dict[int, int]] = {}
    cols: Dict[int, Set[int]] = defaultdict(set)
    for c, col in enumerate(matrix.columns):
        for r, v in col:
            rows.setdefault(r, {})[c] = v
            cols[c].add(r)

    def row_op(target: int, source: int, factor: int) -> None:
        if factor == 0:
            return
        trow = rows[target]
        for c, v in list(rows[source].items()):
            new = trow.get(c, 0) - factor * v
            if new:
                trow[c] = new
                cols[c].add(target)
            else:
                trow.pop(c, None)
                cols[c].discard(target)
        if not trow:
            del rows[target]

    def col_op(target: int, source: int, factor: int) -> None:
        if factor == 0:
            return
        for r in list(cols[source]):
            row = rows[r]
            new = row.get(target, 0) - factor * row[source]
            if new:
                row[target] = new
                cols[target].add(r)
            else:
                row.pop(target, None)
                cols[target].discard(r)

    diagonal: List[int] = []
    while rows:
        r, c = _choose_pivot(rows, cols)
        while True:
            p = rows[r][c]
            restart: Optional[Tuple[int, int]] = None
            for r2 in sorted(cols[c]):
                if r2 == r:
                    continue
                row_op(r2, r, rows[r2][c] // p)
                if r2 in rows and c in rows[r2]:
                    restart = (r2, c)
                    break
            if restart is None:
                for c2 in sorted(rows[r]):
                    if c2 == c:
                        continue
                    col_op(c2, c, rows[r][c2] // p)
                    if c2 in rows[r]:
                        restart = (r, c2)
                        break
            if restart is None:
                break
            r, c = restart
        diagonal.append(abs(rows[r][c]))
        del rows[r]
        cols[c].discard(r)
    return diagonal


def smith_invariants(matrix: SparseMatrix) -> Tuple[int, Tuple[int, ...]]:
    """Rank and the invariant factors d₁ | d₂ | … of an integer matrix."""
    factors = sorted(_diagonalise(matrix))
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            g = gcd(factors[i], factors[j])
            factors[i], factors[j] = g, factors[i] * factors[j] // g
    return len(factors), tuple(factors)


def rational_rank(matrix: SparseMatrix) -> int:
    if matrix.n_rows == 0 or matrix.n_cols == 0 or matrix.is_zero():
        return 0
    dense = [[QQ(v) for v in row] for row in matrix.to_dense()]
    return int(DomainMatrix(dense, (matrix.n_rows, matrix.n_cols), QQ).rank())


def homology(complex_: GradedChainComplex) -> HomologySummary:
    complex_.check_d_squared()
    top = complex_.top_degree
    invariants = [smith_invariants(complex_.boundary(n)) for n in range(top + 2)]
    degrees = []
    for n in range(top + 1):
        rank_out = invariants[n][0]
        rank_in, factors_in = invariants[n + 1]
        betti = complex_.rank(n) - rank_out - rank_in
        torsion = tuple(d for d in factors_in if d > 1)
        degrees.append(DegreeHomology(n, betti, torsion))
    summary = HomologySummary(complex_.length, tuple(degrees))
    logger.debug("Homology at l=%s: %s", complex_.length, summary.signature())
    return summary


def rational_betti(complex_: GradedChainComplex) -> List[int]:
    """Betti numbers from ranks over ℚ; agrees with :func:`homology` on the free part."""
    ranks = [rational_rank(complex_.boundary(n)) for n in range(complex_.top_degree + 2)]
    return [complex_.rank(n) - ranks[n] - ranks[n + 1] for n in range(complex_.top_degree + 1)]


def mapping_cone(f: ChainMap) -> GradedChainComplex:
    """cone(f)_n = C_{n−1} ⊕ D_n with ∂(c, d) = (−∂c, f(c) + ∂d)."""
    source, target = f.source, f.target
    top = max(source.top_degree + 1, target.top_degree)
    bases: List[Tuple[Hashable, ...]] = []
    for n in range(top + 1):
        bases.append(tuple(("C", x) for x in source.basis(n - 1)) + tuple(("D", y) for y in target.basis(n)))

    boundaries: List[SparseMatrix] = []
    for n in range(top + 1):
        if n == 0:
            boundaries.append(SparseMatrix.zero(0, len(bases[0])))
            continue
        shift = source.rank(n - 2)
        cols: List[Dict[int, int]] = []
        src_bd = source.boundary(n - 1)
        f_comp = f.component(n - 1)
        for j in range(source.rank(n - 1)):
            col = {r: -v for r, v in src_bd.columns[j]}
            for r, v in f_comp.columns[j]:
                col[shift + r] = col.get(shift + r, 0) + v
            cols.append(col)
        tgt_bd = target.boundary(n)
        for j in range(target.rank(n)):
            cols.append({shift + r: v for r, v in tgt_bd.columns[j]})
        boundaries.append(SparseMatrix.from_columns(len(bases[n - 1]), cols))

    cone = GradedChainComplex(tuple(bases), tuple(boundaries))
    cone.check_d_squared()
    return cone


def is_quasi_iso(f: ChainMap) -> bool:
    failure = f.first_failure()
    if failure is not None:
        degree, generator = failure
        raise ChainMapError(f"Not a chain map at {generator!r} in degree {degree}", degree, generator)
    return homology(mapping_cone(f)).is_zero()
