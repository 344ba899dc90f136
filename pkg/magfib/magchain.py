"""Magnitude chain complexes MC^ℓ_*, the D-subcomplex, quotients and tensor sums."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Collection,
    Dict,
    Hashable,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

from .classify import DMembership, d_membership, t_word
from .config import get_settings
from .exceptions import ChainComplexError, ChainMapError, EnumerationLimitError
from .fibration import MetricFibrationData
from .metspace import FiniteMetricSpace, format_length, is_between

logger = logging.getLogger(__name__)

__all__ = (
    "ChainMap",
    "GradedChainComplex",
    "PathBasis",
    "Restriction",
    "SparseMatrix",
    "TensorCell",
    "boundary_matrix",
    "build_complex",
    "d_closure_violations",
    "default_top_degree",
    "dump_complex",
    "enumerate_paths",
    "quotient_complex",
    "subcomplex",
    "tensor_and_sum",
)

PathBasis = Tuple[Tuple[int, ...], ...]
Column = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class SparseMatrix:
    """Integer matrix stored by columns of sorted, nonzero ``(row, value)`` pairs."""

    n_rows: int
    n_cols: int
    columns: Tuple[Column, ...]

    def __post_init__(self) -> None:
        if len(self.columns) != self.n_cols:
            raise ChainComplexError(f"Expected {self.n_cols} columns, got {len(self.columns)}")

    @classmethod
    def zero(cls, n_rows: int, n_cols: int) -> "SparseMatrix":
        return cls(n_rows, n_cols, tuple(() for _ in range(n_cols)))

    @classmethod
    def identity(cls, size: int) -> "SparseMatrix":
        return cls(size, size, tuple(((j, 1),) for j in range(size)))

    @classmethod
    def from_columns(cls, n_rows: int, columns: Iterable[Mapping[int, int]]) -> "SparseMatrix":
        packed: List[Column] = []
        for col in columns:
            for row in col:
                if not 0 <= row < n_rows:
                    raise ChainComplexError(f"Row {row} out of range for {n_rows} rows")
            packed.append(tuple(sorted((r, v) for r, v in col.items() if v != 0)))
        return cls(n_rows, len(packed), tuple(packed))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], n_cols: Optional[int] = None) -> "SparseMatrix":
        width = n_cols if n_cols is not None else (len(rows[0]) if rows else 0)
        columns = [{r: int(rows[r][c]) for r in range(len(rows)) if rows[r][c]} for c in range(width)]
        return cls.from_columns(len(rows), columns)

    def column(self, j: int) -> Dict[int, int]:
        return dict(self.columns[j])

    def entry(self, row: int, col: int) -> int:
        for r, v in self.columns[col]:
            if r == row:
                return v
        return 0

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.columns)

    def is_zero(self) -> bool:
        return all(not col for col in self.columns)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """``self @ other``."""
        if self.n_cols != other.n_rows:
            raise ChainComplexError(f"Shape mismatch: {self.n_rows}x{self.n_cols} @ {other.n_rows}x{other.n_cols}")
        out: List[Dict[int, int]] = []
        for col in other.columns:
            acc: Dict[int, int] = {}
            for k, v in col:
                for r, w in self.columns[k]:
                    acc[r] = acc.get(r, 0) + v * w
            out.append(acc)
        return SparseMatrix.from_columns(self.n_rows, out)

    def to_dense(self) -> List[List[int]]:
        dense = [[0] * self.n_cols for _ in range(self.n_rows)]
        for c, col in enumerate(self.columns):
            for r, v in col:
                dense[r][c] = v
        return dense

    def row_major(self) -> List[Dict[int, int]]:
        rows: List[Dict[int, int]] = [{} for _ in range(self.n_rows)]
        for c, col in enumerate(self.columns):
            for r, v in col:
                rows[r][c] = v
        return rows


@dataclass(frozen=True)
class GradedChainComplex:
    """Free complex in degrees 0..top; ``boundaries[n]`` maps degree n to degree n−1."""

    bases: Tuple[Tuple[Hashable, ...], ...]
    boundaries: Tuple[SparseMatrix, ...]
    length: Optional[Fraction] = None
    _indices: Tuple[Dict[Hashable, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.bases) != len(self.boundaries):
            raise ChainComplexError("Every degree needs a boundary matrix")
        for n, (basis, bd) in enumerate(zip(self.bases, self.boundaries)):
            expected_rows = len(self.bases[n - 1]) if n > 0 else 0
            if bd.n_cols != len(basis) or bd.n_rows != expected_rows:
                raise ChainComplexError(
                    f"Boundary in degree {n} is {bd.n_rows}x{bd.n_cols}, expected {expected_rows}x{len(basis)}",
                    degree=n,
                )
        indices = tuple({label: i for i, label in enumerate(basis)} for basis in self.bases)
        for n, basis in enumerate(self.bases):
            if len(indices[n]) != len(basis):
                raise ChainComplexError(f"Duplicate basis labels in degree {n}", degree=n)
        object.__setattr__(self, "_indices", indices)

    @classmethod
    def zero(cls, length: Optional[Fraction] = None) -> "GradedChainComplex":
        return cls((), (), length)

    @property
    def top_degree(self) -> int:
        return len(self.bases) - 1

    def basis(self, n: int) -> Tuple[Hashable, ...]:
        return self.bases[n] if 0 <= n < len(self.bases) else ()

    def rank(self, n: int) -> int:
        return len(self.basis(n))

    def index(self, n: int) -> Dict[Hashable, int]:
        return self._indices[n] if 0 <= n < len(self.bases) else {}

    def boundary(self, n: int) -> SparseMatrix:
        if 0 <= n < len(self.boundaries):
            return self.boundaries[n]
        return SparseMatrix.zero(self.rank(n - 1), self.rank(n))

    def total_rank(self) -> int:
        return sum(len(b) for b in self.bases)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * len(b) for n, b in enumerate(self.bases))

    def check_d_squared(self) -> None:
        for n in range(2, len(self.bases)):
            product = self.boundaries[n - 1].matmul(self.boundaries[n])
            for j, col in enumerate(product.columns):
                if col:
                    raise ChainComplexError(
                        f"∂∂ ≠ 0 on generator {self.bases[n][j]!r} in degree {n}",
                        degree=n,
                        generator=self.bases[n][j],
                    )


@dataclass(frozen=True)
class ChainMap:
    source: GradedChainComplex
    target: GradedChainComplex
    components: Tuple[SparseMatrix, ...]

    def __post_init__(self) -> None:
        for n, comp in enumerate(self.components):
            if comp.n_cols != self.source.rank(n) or comp.n_rows != self.target.rank(n):
                raise ChainMapError(f"Component in degree {n} has the wrong shape", degree=n)

    @classmethod
    def identity(cls, complex_: GradedChainComplex) -> "ChainMap":
        comps = tuple(SparseMatrix.identity(len(b)) for b in complex_.bases)
        return cls(complex_, complex_, comps)

    @classmethod
    def zero(cls, source: GradedChainComplex, target: GradedChainComplex) -> "ChainMap":
        top = max(source.top_degree, 0) + 1
        comps = tuple(SparseMatrix.zero(target.rank(n), source.rank(n)) for n in range(top))
        return cls(source, target, comps)

    def component(self, n: int) -> SparseMatrix:
        if 0 <= n < len(self.components):
            return self.components[n]
        return SparseMatrix.zero(self.target.rank(n), self.source.rank(n))

    def degrees(self) -> range:
        return range(max(self.source.top_degree, self.target.top_degree, len(self.components) - 1) + 2)

    def first_failure(self) -> Optional[Tuple[int, Hashable]]:
        """First (degree, source generator) where ∂f ≠ f∂, or None for a chain map."""
        for n in self.degrees():
            if self.source.rank(n) == 0:
                continue
            left = self.target.boundary(n).matmul(self.component(n))
            right = self.component(n - 1).matmul(self.source.boundary(n))
            for j in range(self.source.rank(n)):
                if left.columns[j] != right.columns[j]:
                    return n, self.source.basis(n)[j]
        return None

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """``self ∘ inner``."""
        top = max(len(self.components), len(inner.components))
        comps = tuple(self.component(n).matmul(inner.component(n)) for n in range(top))
        return ChainMap(inner.source, self.target, comps)

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return all(self.component(n) == SparseMatrix.identity(self.source.rank(n)) for n in range(self.source.top_degree + 1))


class Restriction(str, Enum):
    ALL = "all"
    D_ONLY = "d_only"


class TensorCell(NamedTuple):
    summand: Hashable
    left: Hashable
    right: Hashable


def default_top_degree(space: FiniteMetricSpace, length: Fraction) -> int:
    """Largest n for which P_n^ℓ can be nonempty."""
    min_d = space.min_positive_distance()
    if min_d is None or length <= 0:
        return 0
    return math.floor(Fraction(length) / min_d)


def enumerate_paths(
    space: FiniteMetricSpace,
    length: Fraction,
    n: int,
    max_cells: Optional[int] = None,
) -> PathBasis:
    """P_n^ℓ in lexicographic order, by depth-first search with running-sum pruning."""
    length = Fraction(length)
    if n < 0 or length < 0:
        return ()
    limit = max_cells if max_cells is not None else get_settings().max_cells
    if n == 0:
        return tuple((x,) for x in range(space.size)) if length == 0 else ()
    min_d = space.min_positive_distance()
    if min_d is None:
        return ()
    neighbours = [space.neighbours(x) for x in range(space.size)]
    found: List[Tuple[int, ...]] = []
    path: List[int] = []

    def extend(running: Fraction) -> None:
        steps_left = n + 1 - len(path)
        if steps_left == 0:
            if running == length:
                found.append(tuple(path))
                if len(found) > limit:
                    raise EnumerationLimitError(f"P_{n}^{length} exceeds {limit} tuples")
            return
        for y, step in neighbours[path[-1]]:
            total = running + step
            if total + (steps_left - 1) * min_d > length:
                continue
            path.append(y)
            extend(total)
            path.pop()

    for x in range(space.size):
        path.append(x)
        extend(Fraction(0))
        path.pop()
    return tuple(found)


def _path_length(space: FiniteMetricSpace, points: Sequence[int]) -> Fraction:
    return sum((space.d(points[i], points[i + 1]) for i in range(len(points) - 1)), Fraction(0))


def boundary_matrix(
    space: FiniteMetricSpace,
    length: Fraction,
    n: int,
    basis_n: Sequence[Tuple[int, ...]],
    basis_prev: Sequence[Tuple[int, ...]],
) -> SparseMatrix:
    """∂_n(x_0..x_n) = Σ (−1)^i (x_0..x̂_i..x_n) over interior i with x_{i−1} ≺ x_i ≺ x_{i+1}."""
    index = {t: i for i, t in enumerate(basis_prev)}
    columns: List[Dict[int, int]] = []
    for tup in basis_n:
        if len(tup) != n + 1 or _path_length(space, tup) != length:
            raise ChainComplexError(f"Basis tuple {tup!r} is not in P_{n}^{length}", degree=n, generator=tup)
        col: Dict[int, int] = {}
        for i in range(1, n):
            if is_between(space, tup[i - 1], tup[i], tup[i + 1]):
                face = tup[:i] + tup[i + 1:]
                row = index.get(face)
                if row is None:
                    raise ChainComplexError(
                        f"Face {face!r} of {tup!r} is missing from the degree-{n - 1} basis",
                        degree=n,
                        generator=tup,
                    )
                col[row] = col.get(row, 0) + (-1) ** i
        columns.append(col)
    return SparseMatrix.from_columns(len(basis_prev), columns)


def build_complex(
    space: FiniteMetricSpace,
    length: Fraction,
    n_max: Optional[int] = None,
    restriction: Restriction = Restriction.ALL,
    fibration: Optional[MetricFibrationData] = None,
) -> GradedChainComplex:
    """MC^ℓ_*(X) in degrees 0..n_max, or the subcomplex D^ℓ_*(E) for ``Restriction.D_ONLY``."""
    length = Fraction(length)
    if restriction is Restriction.D_ONLY:
        if fibration is None:
            raise ChainComplexError("The D-subcomplex needs fibration data")
        if fibration.total != space:
            raise ChainComplexError("The D-subcomplex must be built on the fibration's total space")
    top = default_top_degree(space, length) if n_max is None else n_max

    bases: List[PathBasis] = []
    for n in range(top + 1):
        paths = enumerate_paths(space, length, n)
        if restriction is Restriction.D_ONLY:
            assert fibration is not None
            paths = tuple(p for p in paths if d_membership(t_word(fibration, p)) is not DMembership.NONE)
        bases.append(paths)

    boundaries = [SparseMatrix.zero(0, len(bases[0]))] if bases else []
    for n in range(1, top + 1):
        boundaries.append(boundary_matrix(space, length, n, bases[n], bases[n - 1]))

    complex_ = GradedChainComplex(tuple(bases), tuple(boundaries), length)
    complex_.check_d_squared()
    logger.info(
        "Built %s complex at l=%s: ranks %s",
        restriction.value,
        format_length(length),
        [len(b) for b in bases],
    )
    return complex_


def d_closure_violations(
    fib: MetricFibrationData,
    length: Fraction,
    n_max: Optional[int] = None,
) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Boundary terms of D-generators that fall outside D; empty whenever D is a subcomplex."""
    space = fib.total
    top = default_top_degree(space, Fraction(length)) if n_max is None else n_max
    violations: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    for n in range(2, top + 1):
        for tup in enumerate_paths(space, length, n):
            if d_membership(t_word(fib, tup)) is DMembership.NONE:
                continue
            for i in range(1, n):
                if is_between(space, tup[i - 1], tup[i], tup[i + 1]):
                    face = tup[:i] + tup[i + 1:]
                    if d_membership(t_word(fib, face)) is DMembership.NONE:
                        violations.append((tup, face))
    return violations


def _closure_failure(full: GradedChainComplex, keep: Sequence[Collection[Hashable]]) -> Optional[Tuple[int, Hashable]]:
    for n in range(1, full.top_degree + 1):
        below = full.basis(n - 1)
        members = keep[n - 1] if n - 1 < len(keep) else ()
        current = keep[n] if n < len(keep) else ()
        for j, label in enumerate(full.basis(n)):
            if label not in current:
                continue
            for r, _ in full.boundary(n).columns[j]:
                if below[r] not in members:
                    return n, label
    return None


def _select(full: GradedChainComplex, chosen: Sequence[Collection[Hashable]], length: Optional[Fraction]) -> GradedChainComplex:
    bases: List[Tuple[Hashable, ...]] = []
    positions: List[List[int]] = []
    for n in range(full.top_degree + 1):
        members = chosen[n]
        pos = [j for j, label in enumerate(full.basis(n)) if label in members]
        positions.append(pos)
        bases.append(tuple(full.basis(n)[j] for j in pos))
    boundaries: List[SparseMatrix] = []
    for n in range(full.top_degree + 1):
        if n == 0:
            boundaries.append(SparseMatrix.zero(0, len(bases[0])))
            continue
        reindex = {old: new for new, old in enumerate(positions[n - 1])}
        cols = []
        for j in positions[n]:
            cols.append({reindex[r]: v for r, v in full.boundary(n).columns[j] if r in reindex})
        boundaries.append(SparseMatrix.from_columns(len(bases[n - 1]), cols))
    result = GradedChainComplex(tuple(bases), tuple(boundaries), length)
    result.check_d_squared()
    return result


def _normalise(full: GradedChainComplex, sub_basis: Sequence[Collection[Hashable]]) -> List[frozenset]:
    sets = [frozenset(sub_basis[n]) if n < len(sub_basis) else frozenset() for n in range(full.top_degree + 1)]
    for n, members in enumerate(sets):
        unknown = members - set(full.basis(n))
        if unknown:
            raise ChainComplexError(f"Unknown generator {next(iter(unknown))!r} in degree {n}", degree=n)
    return sets


def subcomplex(full: GradedChainComplex, sub_basis: Sequence[Collection[Hashable]]) -> GradedChainComplex:
    sets = _normalise(full, sub_basis)
    failure = _closure_failure(full, sets)
    if failure is not None:
        raise ChainComplexError(f"Generator {failure[1]!r} has boundary outside the span", *failure)
    return _select(full, sets, full.length)


def quotient_complex(full: GradedChainComplex, sub_basis: Sequence[Collection[Hashable]]) -> GradedChainComplex:
    """C / span(sub_basis): delete the spanned rows and columns."""
    sets = _normalise(full, sub_basis)
    failure = _closure_failure(full, sets)
    if failure is not None:
        raise ChainComplexError(f"Generator {failure[1]!r} has boundary outside the span", *failure)
    complement = [frozenset(label for label in full.basis(n) if label not in sets[n]) for n in range(full.top_degree + 1)]
    return _select(full, complement, full.length)


def tensor_and_sum(
    pairs: Sequence[Tuple[GradedChainComplex, GradedChainComplex]],
    n_max: Optional[int] = None,
    length: Optional[Fraction] = None,
) -> GradedChainComplex:
    """⊕ C ⊗ C′ with ∂(a⊗b) = ∂a⊗b + (−1)^{|a|} a⊗∂b; summands keyed by their (ℓ_v, ℓ_h)."""
    keys: List[Hashable] = []
    for pos, (left, right) in enumerate(pairs):
        key: Hashable = (left.length, right.length) if left.length is not None and right.length is not None else pos
        if key in keys:
            raise ChainComplexError(f"Summands share basis labels: {key!r}")
        keys.append(key)

    top = max((left.top_degree + right.top_degree for left, right in pairs), default=-1)
    if n_max is not None:
        top = min(top, n_max)

    bases: List[Tuple[TensorCell, ...]] = []
    for n in range(top + 1):
        cells: List[TensorCell] = []
        for key, (left, right) in zip(keys, pairs):
            for m in range(n + 1):
                for a in left.basis(m):
                    for b in right.basis(n - m):
                        cells.append(TensorCell(key, a, b))
        bases.append(tuple(cells))

    boundaries: List[SparseMatrix] = []
    for n in range(top + 1):
        if n == 0:
            boundaries.append(SparseMatrix.zero(0, len(bases[0])))
            continue
        index = {cell: i for i, cell in enumerate(bases[n - 1])}
        cols: List[Dict[int, int]] = []
        for key, (left, right) in zip(keys, pairs):
            for m in range(n + 1):
                left_bd = left.boundary(m)
                right_bd = right.boundary(n - m)
                sign = -1 if m % 2 else 1
                for ia, a in enumerate(left.basis(m)):
                    for ib, b in enumerate(right.basis(n - m)):
                        col: Dict[int, int] = {}
                        for r, v in left_bd.columns[ia]:
                            row = index[TensorCell(key, left.basis(m - 1)[r], b)]
                            col[row] = col.get(row, 0) + v
                        for r, v in right_bd.columns[ib]:
                            row = index[TensorCell(key, a, right.basis(n - m - 1)[r])]
                            col[row] = col.get(row, 0) + sign * v
                        cols.append(col)
        boundaries.append(SparseMatrix.from_columns(len(bases[n - 1]), cols))

    result = GradedChainComplex(tuple(bases), tuple(boundaries), length)
    result.check_d_squared()
    return result


def dump_complex(
    complex_: GradedChainComplex,
    label: Callable[[Hashable], Any] = repr,
) -> Dict[str, Any]:
    """Per degree: basis labels and sparse columns, for debugging."""
    return {
        "l": format_length(complex_.length) if complex_.length is not None else None,
        "degrees": [
            {
                "n": n,
                "basis": [label(cell) for cell in complex_.basis(n)],
                "columns": [[list(entry) for entry in col] for col in complex_.boundary(n).columns],
            }
            for n in range(complex_.top_degree + 1)
        ],
    }
