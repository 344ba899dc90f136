"""Algebraic Morse theory: matching validation, the hv-matching and reduction to critical cells."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx

from .classify import DMembership, d_membership, fill_hv, t_word, weight
from .config import get_settings
from .exceptions import MorseError
from .fibration import MetricFibrationData
from .magchain import GradedChainComplex, SparseMatrix

logger = logging.getLogger(__name__)

__all__ = (
    "MatchedEdge",
    "MatchingReport",
    "MorseMatchingData",
    "elimination_order",
    "hv_matching",
    "matching_digraph",
    "morse_reduce",
    "validate_matching",
)


class MatchedEdge(NamedTuple):
    """``upper`` lives in ``degree``, ``lower`` in ``degree − 1``."""

    degree: int
    upper: Hashable
    lower: Hashable


@dataclass(frozen=True)
class MorseMatchingData:
    complex: GradedChainComplex
    edges: Tuple[MatchedEdge, ...]
    order: Optional[Tuple[int, ...]] = None
    _matched: Tuple[frozenset, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        matched: List[Set[Hashable]] = [set() for _ in range(self.complex.top_degree + 1)]
        for edge in self.edges:
            matched[edge.degree].add(edge.upper)
            matched[edge.degree - 1].add(edge.lower)
        object.__setattr__(self, "_matched", tuple(frozenset(m) for m in matched))

    def critical(self, n: int) -> Tuple[Hashable, ...]:
        if not 0 <= n <= self.complex.top_degree:
            return ()
        return tuple(cell for cell in self.complex.basis(n) if cell not in self._matched[n])

    def critical_count(self) -> int:
        return sum(len(self.critical(n)) for n in range(self.complex.top_degree + 1))

    def is_perfect(self) -> bool:
        return self.critical_count() == 0

    def dump(self) -> List[Tuple[int, str, str]]:
        return [(e.degree, repr(e.upper), repr(e.lower)) for e in self.edges]


@dataclass(frozen=True)
class MatchingReport:
    matching: Optional[MorseMatchingData]
    condition: Optional[str] = None
    witness: Tuple[object, ...] = ()

    @property
    def ok(self) -> bool:
        return self.condition is None

    def message(self) -> str:
        if self.ok:
            return "valid Morse matching"
        return f"{self.condition} violated at {', '.join(repr(w) for w in self.witness)}"


def matching_digraph(complex_: GradedChainComplex, edges: Sequence[MatchedEdge]) -> nx.DiGraph:
    """Γ^M on the matched vertices: boundary edges down, matched edges reversed up.

    Nodes are ``(degree, basis position)``.
    """
    graph = nx.DiGraph()
    matched: Set[Tuple[int, int]] = set()
    pairs: Set[Tuple[Tuple[int, int], Tuple[int, int]]] = set()
    for e in edges:
        upper = (e.degree, complex_.index(e.degree)[e.upper])
        lower = (e.degree - 1, complex_.index(e.degree - 1)[e.lower])
        matched.update((upper, lower))
        pairs.add((upper, lower))
    graph.add_nodes_from(sorted(matched))
    for n in range(1, complex_.top_degree + 1):
        for j, col in enumerate(complex_.boundary(n).columns):
            upper = (n, j)
            if upper not in matched:
                continue
            for r, _ in col:
                lower = (n - 1, r)
                if lower not in matched:
                    continue
                if (upper, lower) in pairs:
                    graph.add_edge(lower, upper)
                else:
                    graph.add_edge(upper, lower)
    return graph


def validate_matching(complex_: GradedChainComplex, edges: Iterable[Tuple[int, Hashable, Hashable]]) -> MatchingReport:
    """Check disjointness, unit coefficients and acyclicity, in that order."""
    checked: List[MatchedEdge] = []
    for raw in edges:
        edge = MatchedEdge(*raw)
        if not 1 <= edge.degree <= complex_.top_degree:
            raise MorseError(f"Matched edge {edge!r} is outside the complex")
        if edge.upper not in complex_.index(edge.degree) or edge.lower not in complex_.index(edge.degree - 1):
            raise MorseError(f"Matched edge {edge!r} references unknown generators")
        checked.append(edge)

    seen: Set[Tuple[int, Hashable]] = set()
    for edge in checked:
        for key in ((edge.degree, edge.upper), (edge.degree - 1, edge.lower)):
            if key in seen:
                return MatchingReport(None, "disjointness", (key[1],))
            seen.add(key)

    for edge in checked:
        col = complex_.index(edge.degree)[edge.upper]
        row = complex_.index(edge.degree - 1)[edge.lower]
        coeff = complex_.boundary(edge.degree).entry(row, col)
        if coeff not in (1, -1):
            return MatchingReport(None, "unit_coefficient", (edge.upper, edge.lower, coeff))

    graph = matching_digraph(complex_, checked)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return MatchingReport(MorseMatchingData(complex_, tuple(checked)))
    witness = tuple(complex_.basis(node[0])[node[1]] for node, _ in cycle)
    return MatchingReport(None, "acyclicity", witness)


def hv_matching(fib: MetricFibrationData, d_complex: GradedChainComplex) -> MorseMatchingData:
    """Pair every tilted-first tuple a with a^hv, eliminated in ascending weight of a^hv."""
    for n in range(d_complex.top_degree + 1):
        for cell in d_complex.basis(n):
            if not isinstance(cell, tuple) or d_membership(t_word(fib, cell)) is DMembership.NONE:
                raise MorseError(f"{cell!r} is not a D-generator; build the complex with the D restriction")

    edges: List[MatchedEdge] = []
    for n in range(d_complex.top_degree + 1):
        for cell in d_complex.basis(n):
            if d_membership(t_word(fib, cell)) is not DMembership.TILTED_FIRST:
                continue
            partner = fill_hv(fib, cell)
            if partner not in d_complex.index(n + 1):
                raise MorseError(f"Partner {partner!r} of {cell!r} is missing; the complex is truncated")
            edges.append(MatchedEdge(n + 1, partner, cell))

    report = validate_matching(d_complex, edges)
    if not report.ok or report.matching is None:
        raise MorseError(f"hv-matching is not a Morse matching: {report.message()}")

    partner_of = {(e.degree - 1, e.lower): e.upper for e in edges}
    for e in edges:
        col = d_complex.index(e.degree)[e.upper]
        faces = d_complex.basis(e.degree - 1)
        for r, _ in d_complex.boundary(e.degree).columns[col]:
            face = faces[r]
            other = partner_of.get((e.degree - 1, face))
            if face == e.lower or other is None:
                continue
            if weight(fib, e.upper) >= weight(fib, other):
                raise MorseError(f"Weight does not increase from {e.upper!r} to {other!r}")

    order = sorted(range(len(edges)), key=lambda i: (weight(fib, edges[i].upper), edges[i].degree, i))
    logger.info("hv-matching: %s pairs, %s critical cells", len(edges), report.matching.critical_count())
    return MorseMatchingData(d_complex, tuple(edges), tuple(order))


def elimination_order(m: MorseMatchingData) -> List[int]:
    """Edge positions in the stored order, or a topological order of Γ^M."""
    if m.order is not None:
        return list(m.order)
    graph = matching_digraph(m.complex, m.edges)
    rank = {node: i for i, node in enumerate(nx.lexicographical_topological_sort(graph))}
    lower_node = [(e.degree - 1, m.complex.index(e.degree - 1)[e.lower]) for e in m.edges]
    return sorted(range(len(m.edges)), key=lambda i: rank[lower_node[i]])


class _Workspace:
    """Mutable boundary dictionaries keyed by basis position."""

    def __init__(self, complex_: GradedChainComplex) -> None:
        self.complex = complex_
        top = complex_.top_degree
        self.bd: List[Dict[int, Dict[int, int]]] = []
        self.cob: List[Dict[int, Set[int]]] = [
            {j: set() for j in range(complex_.rank(n))} for n in range(top + 1)
        ]
        for n in range(top + 1):
            self.bd.append({j: dict(col) for j, col in enumerate(complex_.boundary(n).columns)})
            if n > 0:
                for j, col in enumerate(complex_.boundary(n).columns):
                    for r, _ in col:
                        self.cob[n - 1][r].add(j)

    def eliminate(self, n: int, a: int, b: int) -> None:
        """Remove the pair a (degree n) and b (degree n−1) by one Gaussian step."""
        lam = self.bd[n][a].get(b, 0)
        if lam not in (1, -1):
            raise MorseError(
                f"Coefficient {lam} between {self.complex.basis(n)[a]!r} and {self.complex.basis(n - 1)[b]!r} is not a unit"
            )
        source = self.bd[n][a]
        for c in sorted(self.cob[n - 1][b] - {a}):
            target = self.bd[n][c]
            factor = target[b] * lam
            for x, v in source.items():
                new = target.get(x, 0) - factor * v
                if new:
                    target[x] = new
                    self.cob[n - 1][x].add(c)
                else:
                    target.pop(x, None)
                    self.cob[n - 1][x].discard(c)
        if n + 1 < len(self.bd):
            for e in self.cob[n][a]:
                self.bd[n + 1][e].pop(a, None)
        for x in source:
            self.cob[n - 1][x].discard(a)
        del self.bd[n][a]
        del self.cob[n][a]
        if n - 1 > 0:
            for x in self.bd[n - 1][b]:
                self.cob[n - 2][x].discard(b)
        del self.bd[n - 1][b]
        del self.cob[n - 1][b]

    def freeze(self) -> GradedChainComplex:
        complex_ = self.complex
        keep = [sorted(self.bd[n]) for n in range(len(self.bd))]
        bases = tuple(tuple(complex_.basis(n)[j] for j in keep[n]) for n in range(len(keep)))
        boundaries = []
        for n in range(len(keep)):
            reindex = {old: new for new, old in enumerate(keep[n - 1])} if n > 0 else {}
            cols = [{reindex[r]: v for r, v in self.bd[n][j].items()} for j in keep[n]]
            boundaries.append(SparseMatrix.from_columns(len(keep[n - 1]) if n > 0 else 0, cols))
        return GradedChainComplex(bases, tuple(boundaries), complex_.length)


def morse_reduce(m: MorseMatchingData, check_steps: Optional[bool] = None) -> GradedChainComplex:
    """The complex on critical cells, by sequential pair elimination."""
    if not m.edges:
        return m.complex
    verify = get_settings().check_steps if check_steps is None else check_steps
    work = _Workspace(m.complex)
    for step, i in enumerate(elimination_order(m)):
        edge = m.edges[i]
        a = m.complex.index(edge.degree)[edge.upper]
        b = m.complex.index(edge.degree - 1)[edge.lower]
        work.eliminate(edge.degree, a, b)
        if verify:
            work.freeze().check_d_squared()
            logger.debug("Elimination step %s on %r kept ∂∂ = 0", step, edge.upper)
    reduced = work.freeze()
    reduced.check_d_squared()
    logger.info("Morse reduction: %s cells -> %s critical", m.complex.total_rank(), reduced.total_rank())
    return reduced
