"""Finite metric spaces with exact rational distances."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .exceptions import InputError, MetricError

logger = logging.getLogger(__name__)

__all__ = (
    "FiniteMetricSpace",
    "LengthValue",
    "MetricValidation",
    "achievable_lengths",
    "complete_graph",
    "cycle_graph",
    "from_graph",
    "from_matrix",
    "is_between",
    "parse_length",
    "path_graph",
    "point_space",
    "require_metric",
    "restrict",
    "validate_metric",
)

LengthValue = Fraction

RationalLike = Union[int, str, Fraction]


def parse_length(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, integer strings, ints or Fractions into an exact length."""
    if isinstance(value, bool):
        raise InputError(f"Not a rational value: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "." in text or "e" in text.lower():
                raise ValueError
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"Not an exact rational: {value!r}") from None
    raise InputError(f"Not a rational value: {value!r}")


def format_length(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Points carry opaque string labels; all internal work uses their indices."""

    labels: Tuple[str, ...]
    dist: Tuple[Tuple[Fraction, ...], ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise InputError("Point labels must be unique")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise InputError(f"Distance table must be {n}x{n}")
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def d(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def index_of(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise InputError(f"Unknown point label: {label!r}") from None

    def label_of(self, index: int) -> str:
        return self.labels[index]

    def min_positive_distance(self) -> Optional[Fraction]:
        values = [v for row in self.dist for v in row if v > 0]
        return min(values) if values else None

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for row in self.dist for v in row)

    def neighbours(self, x: int) -> List[Tuple[int, Fraction]]:
        """Every other point with its distance, in index order."""
        row = self.dist[x]
        return [(y, row[y]) for y in range(self.size) if y != x]


@dataclass(frozen=True)
class MetricValidation:
    ok: bool
    axiom: Optional[str] = None
    witness: Tuple[str, ...] = ()

    def message(self) -> str:
        if self.ok:
            return "metric axioms hold"
        return f"{self.axiom} violation at ({', '.join(self.witness)})"


def _check_labels(labels: Sequence[object]) -> Tuple[str, ...]:
    return tuple(str(label) for label in labels)


def from_matrix(labels: Sequence[object], rows: Sequence[Sequence[RationalLike]]) -> FiniteMetricSpace:
    """Build a space from an explicit table; axioms are checked by :func:`validate_metric`."""
    names = _check_labels(labels)
    if len(rows) != len(names) or any(len(row) != len(names) for row in rows):
        raise InputError(f"Distance matrix must be {len(names)}x{len(names)}")
    table = tuple(tuple(parse_length(v) for v in row) for row in rows)
    for i, row in enumerate(table):
        for j, v in enumerate(row):
            if v < 0:
                raise InputError(f"Negative distance at ({names[i]}, {names[j]})")
    return FiniteMetricSpace(names, table)


def from_graph(
    vertex_count: int,
    edges: Iterable[Sequence[object]],
    labels: Optional[Sequence[object]] = None,
) -> FiniteMetricSpace:
    """Shortest-path metric of a connected unweighted graph.

    Without ``labels`` the vertices are named ``"1"`` .. ``str(vertex_count)`` and
    edges reference those numbers; otherwise edges reference the given labels.
    """
    if vertex_count < 1:
        raise MetricError("A graph needs at least one vertex")
    names = _check_labels(labels) if labels is not None else tuple(str(i) for i in range(1, vertex_count + 1))
    if len(names) != vertex_count:
        raise MetricError(f"Expected {vertex_count} labels, got {len(names)}")
    lookup = {name: i for i, name in enumerate(names)}

    graph = nx.Graph()
    graph.add_nodes_from(range(vertex_count))
    for edge in edges:
        if len(edge) != 2:
            raise MetricError(f"Edge must join two vertices: {edge!r}")
        u, v = (str(end) for end in edge)
        if u not in lookup or v not in lookup:
            raise MetricError(f"Edge references unknown vertex: {edge!r}")
        if u == v:
            raise MetricError(f"Self-loop at vertex {u}")
        graph.add_edge(lookup[u], lookup[v])

    lengths = dict(nx.all_pairs_shortest_path_length(graph))
    for i in range(vertex_count):
        for j in range(vertex_count):
            if j not in lengths[i]:
                raise MetricError(f"Graph is disconnected: no path between {names[i]} and {names[j]}")

    table = tuple(tuple(Fraction(lengths[i][j]) for j in range(vertex_count)) for i in range(vertex_count))
    logger.debug("Built graph metric on %s vertices with %s edges", vertex_count, graph.number_of_edges())
    return FiniteMetricSpace(names, table)


def path_graph(n: int) -> FiniteMetricSpace:
    return from_graph(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int) -> FiniteMetricSpace:
    return from_graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def cycle_graph(n: int) -> FiniteMetricSpace:
    if n < 3:
        raise MetricError("A cycle graph needs at least three vertices")
    return from_graph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def point_space(label: str = "*") -> FiniteMetricSpace:
    return FiniteMetricSpace((label,), ((Fraction(0),),))


def restrict(space: FiniteMetricSpace, indices: Sequence[int]) -> FiniteMetricSpace:
    """Induced subspace on ``indices``, kept in the given order."""
    labels = tuple(space.labels[i] for i in indices)
    table = tuple(tuple(space.dist[i][j] for j in indices) for i in indices)
    return FiniteMetricSpace(labels, table)


def validate_metric(space: FiniteMetricSpace) -> MetricValidation:
    """Report the first violated axiom, checking symmetry, identity, positivity, triangle."""
    n = space.size
    d = space.dist
    names = space.labels
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                return MetricValidation(False, "symmetry", (names[i], names[j]))
    for i in range(n):
        if d[i][i] != 0:
            return MetricValidation(False, "identity", (names[i],))
    for i in range(n):
        for j in range(n):
            if i != j and d[i][j] <= 0:
                return MetricValidation(False, "positivity", (names[i], names[j]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    return MetricValidation(False, "triangle", (names[i], names[j], names[k]))
    return MetricValidation(True)


def require_metric(space: FiniteMetricSpace, name: str = "space") -> FiniteMetricSpace:
    report = validate_metric(space)
    if not report.ok:
        raise MetricError(f"{name} is not a metric space: {report.message()}")
    return space


def is_between(space: FiniteMetricSpace, x: int, y: int, z: int) -> bool:
    """``x ≺ y ≺ z``: the middle point lies on a geodesic, compared exactly."""
    d = space.dist
    return d[x][z] == d[x][y] + d[y][z]


def achievable_lengths(space: FiniteMetricSpace, l_max: Fraction) -> List[Fraction]:
    """All ℓ ≤ l_max with a nonempty P_n^ℓ for some n, ascending."""
    l_max = Fraction(l_max)
    if l_max < 0:
        return []
    seen = {(x, Fraction(0)) for x in range(space.size)}
    frontier = list(seen)
    found = {Fraction(0)}
    while frontier:
        next_frontier = []
        for x, running in frontier:
            for y, step in space.neighbours(x):
                total = running + step
                if total > l_max or (y, total) in seen:
                    continue
                seen.add((y, total))
                found.add(total)
                next_frontier.append((y, total))
        frontier = next_frontier
    return sorted(found)
