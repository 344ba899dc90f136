"""Pointed Δ-sets of tuples, their reduced chains, the quotient bijection and causal order complexes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Collection, Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx
from joblib import Parallel, delayed

from .classify import DMembership, HORIZONTAL, VERTICAL, d_membership, t_word
from .config import get_settings
from .exceptions import DeltaSetError, InputError
from .fibration import MetricFibrationData, fiber, product_index, trivial_product
from .homology import HomologySummary, homology
from .magchain import GradedChainComplex, SparseMatrix, default_top_degree, enumerate_paths, build_complex, quotient_complex
from .metspace import FiniteMetricSpace, is_between

logger = logging.getLogger(__name__)

__all__ = (
    "BASEPOINT",
    "CauReport",
    "CausalPosetComplex",
    "DeltaIsoReport",
    "DeltaVariant",
    "PointedDeltaSet",
    "build_causal_complex",
    "build_pointed_delta",
    "cau_verify",
    "cau_verify_range",
    "deltaiso_check",
    "reduced_chain_complex",
    "repoint",
)

BASEPOINT = -1


class DeltaVariant(str, Enum):
    M = "m"
    D = "D"


@dataclass(frozen=True)
class PointedDeltaSet:
    """``faces[n][j][i]`` is the position of d_i(cell j) in degree n−1, or ``BASEPOINT``."""

    cells: Tuple[Tuple[Hashable, ...], ...]
    faces: Tuple[Tuple[Tuple[int, ...], ...], ...]
    length: Optional[Fraction] = None
    _index: Tuple[Dict[Hashable, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", tuple({c: j for j, c in enumerate(cells)} for cells in self.cells))

    @property
    def top_degree(self) -> int:
        return len(self.cells) - 1

    def index(self, n: int) -> Dict[Hashable, int]:
        return self._index[n] if 0 <= n < len(self.cells) else {}

    def face(self, n: int, j: int, i: int) -> int:
        if j == BASEPOINT:
            return BASEPOINT
        return self.faces[n][j][i]

    def validate(self) -> None:
        """d_i d_j = d_{j−1} d_i for i < j, exhaustively."""
        for n in range(len(self.cells)):
            for j, cell_faces in enumerate(self.faces[n]):
                if len(cell_faces) != (n + 1 if n > 0 else 0):
                    raise DeltaSetError(f"Cell {self.cells[n][j]!r} has {len(cell_faces)} faces", self.cells[n][j])
        for n in range(2, len(self.cells)):
            for j in range(len(self.cells[n])):
                for hi in range(1, n + 1):
                    for lo in range(hi):
                        left = self.face(n - 1, self.face(n, j, hi), lo)
                        right = self.face(n - 1, self.face(n, j, lo), hi - 1)
                        if left != right:
                            raise DeltaSetError(
                                f"d_{lo} d_{hi} ≠ d_{hi - 1} d_{lo} on {self.cells[n][j]!r}",
                                (n, self.cells[n][j], lo, hi),
                            )


def _tuple_faces(space: FiniteMetricSpace, cell: Tuple[int, ...], below: Dict[Hashable, int]) -> Tuple[int, ...]:
    n = len(cell) - 1
    if n == 0:
        return ()
    out = []
    for i in range(n + 1):
        if 1 <= i <= n - 1 and is_between(space, cell[i - 1], cell[i], cell[i + 1]):
            face = cell[:i] + cell[i + 1:]
            if face not in below:
                raise DeltaSetError(f"Face d_{i} of {cell!r} is not a cell", (cell, i))
            out.append(below[face])
        else:
            out.append(BASEPOINT)
    return tuple(out)


def build_pointed_delta(
    space: FiniteMetricSpace,
    length: Fraction,
    n_max: Optional[int] = None,
    variant: DeltaVariant = DeltaVariant.M,
    fib: Optional[MetricFibrationData] = None,
) -> PointedDeltaSet:
    """m^ℓ_•(X), or D^ℓ_•(E) for the D variant."""
    length = Fraction(length)
    if variant is DeltaVariant.D and fib is None:
        raise DeltaSetError("The D variant needs fibration data")
    top = default_top_degree(space, length) if n_max is None else n_max
    cells: List[Tuple[Tuple[int, ...], ...]] = []
    for n in range(top + 1):
        paths = enumerate_paths(space, length, n)
        if variant is DeltaVariant.D:
            assert fib is not None
            paths = tuple(p for p in paths if d_membership(t_word(fib, p)) is not DMembership.NONE)
        cells.append(paths)
    index = [{c: j for j, c in enumerate(level)} for level in cells]
    faces = tuple(
        tuple(_tuple_faces(space, cell, index[n - 1] if n > 0 else {}) for cell in cells[n])
        for n in range(top + 1)
    )
    ds = PointedDeltaSet(tuple(cells), faces, length)
    ds.validate()
    return ds


def reduced_chain_complex(ds: PointedDeltaSet) -> GradedChainComplex:
    """Σ (−1)^i d_i with basepoint-valued faces dropped."""
    boundaries = []
    for n in range(len(ds.cells)):
        rows = len(ds.cells[n - 1]) if n > 0 else 0
        cols = []
        for cell_faces in ds.faces[n]:
            col: Dict[int, int] = {}
            for i, target in enumerate(cell_faces):
                if target != BASEPOINT:
                    col[target] = col.get(target, 0) + (-1) ** i
            cols.append(col)
        boundaries.append(SparseMatrix.from_columns(rows, cols))
    return GradedChainComplex(ds.cells, tuple(boundaries), ds.length)


def repoint(ds: PointedDeltaSet, sub: Sequence[Collection[Hashable]]) -> PointedDeltaSet:
    """Quotient by a Δ-subset: its cells go to the basepoint."""
    members = [frozenset(sub[n]) if n < len(sub) else frozenset() for n in range(len(ds.cells))]
    for n in range(1, len(ds.cells)):
        for j, cell in enumerate(ds.cells[n]):
            if cell not in members[n]:
                continue
            for i, target in enumerate(ds.faces[n][j]):
                if target != BASEPOINT and ds.cells[n - 1][target] not in members[n - 1]:
                    raise DeltaSetError(f"Face d_{i} of {cell!r} leaves the Δ-subset", (cell, i))
    keep = [[j for j, c in enumerate(cells) if c not in members[n]] for n, cells in enumerate(ds.cells)]
    reindex = [{old: new for new, old in enumerate(k)} for k in keep]
    cells = tuple(tuple(ds.cells[n][j] for j in keep[n]) for n in range(len(keep)))
    faces = tuple(
        tuple(
            tuple(reindex[n - 1].get(t, BASEPOINT) if t != BASEPOINT else BASEPOINT for t in ds.faces[n][j])
            for j in keep[n]
        )
        for n in range(len(keep))
    )
    result = PointedDeltaSet(cells, faces, ds.length)
    result.validate()
    return result


@dataclass(frozen=True)
class DeltaIsoReport:
    basepoint: str
    length: Fraction
    cell_counts: Tuple[Tuple[int, int], ...] = ()
    failure: Optional[str] = None
    witness: Optional[Tuple[object, ...]] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _vh_split(word: str) -> Optional[int]:
    m = 0
    while m < len(word) and word[m] == VERTICAL:
        m += 1
    if any(ch != HORIZONTAL for ch in word[m:]):
        return None
    return m


def deltaiso_check(
    fib: MetricFibrationData,
    b: int,
    length: Fraction,
    n_max: Optional[int] = None,
) -> DeltaIsoReport:
    """m(E)/D(E) ≅ m(F×B)/D(F×B) cellwise, compatible with every face map."""
    length = Fraction(length)
    f = fiber(fib, b)
    product = trivial_product(f.space, fib.base)
    label = fib.base.labels[b]
    top = default_top_degree(fib.total, length) if n_max is None else n_max

    def quotient(target: MetricFibrationData) -> PointedDeltaSet:
        whole = build_pointed_delta(target.total, length, top)
        sub = build_pointed_delta(target.total, length, top, DeltaVariant.D, target)
        return repoint(whole, sub.cells)

    left = quotient(fib)
    right = quotient(product)
    counts = tuple((len(left.cells[n]), len(right.cells[n])) for n in range(top + 1))

    def phi(cell: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
        m = _vh_split(t_word(fib, cell))
        if m is None:
            return None
        anchor = f.local_index(fib.lift(cell[m], b))
        head = tuple(product_index(fib.base, f.local_index(fib.lift(x, b)), fib.projection[cell[0]]) for x in cell[: m + 1])
        tail = tuple(product_index(fib.base, anchor, fib.projection[x]) for x in cell[m + 1:])
        return head + tail

    def psi(cell: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
        m = _vh_split(t_word(product, cell))
        if m is None:
            return None
        nb = fib.base.size
        start = cell[0] % nb
        lifted = [fib.lift(f.members[x // nb], start) for x in cell[: m + 1]]
        point = lifted[-1]
        for x in cell[m + 1:]:
            point = fib.lift(point, x % nb)
            lifted.append(point)
        return tuple(lifted)

    for n in range(top + 1):
        images: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        target_index = right.index(n)
        for cell in left.cells[n]:
            image = phi(cell)
            if image is None or image not in target_index:
                return DeltaIsoReport(label, length, counts, f"φ{cell!r} is not a cell of the product quotient", (n, cell))
            if image in images:
                return DeltaIsoReport(label, length, counts, f"φ is not injective: {images[image]!r} and {cell!r}", (n, cell))
            images[image] = cell
            if psi(image) != cell:
                return DeltaIsoReport(label, length, counts, f"ψφ{cell!r} ≠ {cell!r}", (n, cell))
        if len(images) != len(right.cells[n]):
            missing = next(c for c in right.cells[n] if c not in images)
            return DeltaIsoReport(label, length, counts, f"φ misses {missing!r}", (n, missing))
        if n == 0:
            continue
        for j, cell in enumerate(left.cells[n]):
            target = target_index[phi(cell)]  # type: ignore[index]
            for i in range(n + 1):
                src_face = left.face(n, j, i)
                dst_face = right.face(n, target, i)
                mapped = BASEPOINT if src_face == BASEPOINT else right.index(n - 1)[phi(left.cells[n - 1][src_face])]  # type: ignore[index]
                if mapped != dst_face:
                    return DeltaIsoReport(label, length, counts, f"φ does not commute with d_{i} on {cell!r}", (n, cell, i))
    logger.info("Δ-set bijection verified at l=%s over %s", length, label)
    return DeltaIsoReport(label, length, counts)


@dataclass(frozen=True)
class CausalPosetComplex:
    """Order complex of Cau^ℓ(X; a, b) on a t-grid, with Δ′ the faces of length below ℓ."""

    space: FiniteMetricSpace
    length: int
    a: int
    b: int
    refine: int
    vertices: Tuple[Tuple[int, Fraction], ...]
    full: GradedChainComplex
    inner: Tuple[frozenset, ...]
    relative: GradedChainComplex


def _chains(graph: nx.DiGraph, order: Sequence[int]) -> List[List[Tuple[int, ...]]]:
    by_size: List[List[Tuple[int, ...]]] = []

    def extend(chain: List[int]) -> None:
        while len(by_size) < len(chain):
            by_size.append([])
        by_size[len(chain) - 1].append(tuple(chain))
        for nxt in sorted(graph.successors(chain[-1])):
            chain.append(nxt)
            extend(chain)
            chain.pop()

    for v in order:
        extend([v])
    return [sorted(level) for level in by_size]


def build_causal_complex(space: FiniteMetricSpace, length: int, a: int, b: int, refine: int = 1) -> CausalPosetComplex:
    if refine < 1:
        raise InputError("refine must be a positive integer")
    ell = Fraction(length)
    d = space.dist
    grid = [Fraction(k, refine) for k in range(length * refine + 1)]
    vertices = tuple(
        (x, t) for t in grid for x in range(space.size) if d[a][x] <= t and d[x][b] <= ell - t
    )
    poset = nx.DiGraph()
    poset.add_nodes_from(range(len(vertices)))
    for i, (x, t) in enumerate(vertices):
        for j, (y, s) in enumerate(vertices):
            if s > t and d[x][y] <= s - t:
                poset.add_edge(i, j)

    levels = _chains(poset, range(len(vertices)))
    index = [{c: j for j, c in enumerate(level)} for level in levels]
    boundaries = []
    for n, level in enumerate(levels):
        cols = []
        for simplex in level:
            col: Dict[int, int] = {}
            if n > 0:
                for i in range(n + 1):
                    col[index[n - 1][simplex[:i] + simplex[i + 1:]]] = (-1) ** i
            cols.append(col)
        boundaries.append(SparseMatrix.from_columns(len(levels[n - 1]) if n > 0 else 0, cols))
    full = GradedChainComplex(tuple(tuple(level) for level in levels), tuple(boundaries))
    full.check_d_squared()

    def inner_length(simplex: Tuple[int, ...]) -> Fraction:
        return sum((d[vertices[simplex[i]][0]][vertices[simplex[i + 1]][0]] for i in range(len(simplex) - 1)), Fraction(0))

    inner = tuple(frozenset(s for s in level if inner_length(s) < ell) for level in levels)
    relative = quotient_complex(full, inner)
    return CausalPosetComplex(space, length, a, b, refine, vertices, full, inner, relative)


@dataclass(frozen=True)
class CauRow:
    n: int
    betti_relative: int
    torsion_relative: Tuple[int, ...]
    betti_mh: int
    torsion_mh: Tuple[int, ...]


@dataclass(frozen=True)
class CauReport:
    length: int
    refine: int
    rows: Tuple[CauRow, ...]
    consistent_shifts: Tuple[int, ...]

    @property
    def fitted_shift(self) -> Optional[int]:
        if not self.consistent_shifts:
            return None
        return min(self.consistent_shifts, key=lambda s: (abs(s), s))

    @property
    def ok(self) -> bool:
        return bool(self.consistent_shifts)


def _require_integral(space: FiniteMetricSpace, length: object) -> int:
    if not space.is_integral():
        raise InputError("The causal-poset check needs integer distances")
    if isinstance(length, bool) or Fraction(length).denominator != 1:  # type: ignore[arg-type]
        raise InputError(f"The causal-poset check needs an integer length, got {length!r}")
    return int(Fraction(length))  # type: ignore[arg-type]


def _relative_for_pair(space: FiniteMetricSpace, length: int, a: int, b: int, refine: int) -> HomologySummary:
    return homology(build_causal_complex(space, length, a, b, refine).relative)


def cau_verify(
    space: FiniteMetricSpace,
    length: object,
    n_max: Optional[int] = None,
    refine: int = 1,
    jobs: Optional[int] = None,
) -> CauReport:
    """Sum H_*(Δ, Δ′) over ordered pairs and fit the degree shift against MH^ℓ_*."""
    ell = _require_integral(space, length)
    n_jobs = jobs if jobs is not None else get_settings().jobs
    pairs = [(a, b) for a in range(space.size) for b in range(space.size)]
    summaries = Parallel(n_jobs=n_jobs)(delayed(_relative_for_pair)(space, ell, a, b, refine) for a, b in pairs)

    mh = homology(build_complex(space, ell))
    nonzero = [d.n for d in mh.degrees if not d.is_zero]
    nonzero += [d.n for s in summaries for d in s.degrees if not d.is_zero]
    top = max(nonzero, default=0)
    if n_max is not None:
        top = max(top, n_max)

    def relative(n: int) -> Tuple[int, Tuple[int, ...]]:
        betti = sum(s.betti(n) for s in summaries)
        torsion = tuple(sorted(t for s in summaries for t in s.torsion(n)))
        return betti, torsion

    def magnitude(n: int) -> Tuple[int, Tuple[int, ...]]:
        return mh.betti(n), tuple(sorted(mh.torsion(n)))

    shifts = tuple(
        s for s in range(-top - 1, top + 2)
        if all(relative(n) == magnitude(n + s) for n in range(top + 1))
        and all(magnitude(n) == relative(n - s) for n in range(top + 1))
    )
    shown = top if n_max is None else min(top, n_max)
    rows = tuple(CauRow(n, *relative(n), *magnitude(n)) for n in range(shown + 1))
    report = CauReport(ell, refine, rows, shifts)
    logger.info("Causal check at l=%s: shifts %s", ell, shifts)
    return report


def cau_verify_range(
    space: FiniteMetricSpace,
    l_max: object,
    refine: int = 1,
    jobs: Optional[int] = None,
) -> Tuple[List[CauReport], Tuple[int, ...]]:
    """Reports for every integer ℓ ≤ l_max and the shifts consistent with all of them."""
    top = _require_integral(space, l_max)
    reports = [cau_verify(space, ell, refine=refine, jobs=jobs) for ell in range(top + 1)]
    common = set(reports[0].consistent_shifts) if reports else set()
    for report in reports[1:]:
        common &= set(report.consistent_shifts)
    return reports, tuple(sorted(common))
