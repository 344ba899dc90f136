"""Built-in spaces and fibrations addressed by name from the CLI and the API."""

from __future__ import annotations

import re
from typing import Callable, Dict, List

from .exceptions import InputError
from .fibration import FibrationCheck, MetricFibrationData, fibration_from_labels, trivial_product
from .metspace import (
    FiniteMetricSpace,
    complete_graph,
    cycle_graph,
    from_graph,
    path_graph,
    point_space,
)

__all__ = ("FIBRATION_FIXTURES", "fibration_fixture", "known_names", "space_fixture")

_FAMILY = re.compile(r"^(?P<kind>[IKC])(?P<size>\d+)$")


def _square_tower() -> MetricFibrationData:
    # three stacked 4-cycles: inner 1-4, middle 5-8, outer 9-12
    edges = []
    for ring in range(3):
        offset = 4 * ring
        edges += [(offset + i, offset + i % 4 + 1) for i in range(1, 5)]
    edges += [(i, i + 4) for i in range(1, 9)]
    total = from_graph(12, edges)
    base = from_graph(4, [("p1", "p2"), ("p2", "p3"), ("p3", "p4"), ("p4", "p1")], labels=["p1", "p2", "p3", "p4"])
    projection = {str(k): f"p{(k - 1) % 4 + 1}" for k in range(1, 13)}
    return _require(fibration_from_labels(total, base, projection))


def _twisted_hexagon() -> MetricFibrationData:
    labels = ["a", "b", "c", "d", "e", "f"]
    edges = [("a", "c"), ("b", "c"), ("b", "d"), ("a", "d"), ("c", "f"), ("b", "e"), ("a", "e"), ("d", "f"), ("e", "f")]
    total = from_graph(6, edges, labels=labels)
    base = from_graph(3, [("A", "B"), ("B", "C"), ("A", "C")], labels=["A", "B", "C"])
    projection = {"a": "A", "d": "A", "b": "B", "e": "B", "c": "C", "f": "C"}
    return _require(fibration_from_labels(total, base, projection))


def _require(check: FibrationCheck) -> MetricFibrationData:
    if check.failure is not None:
        raise InputError(f"Built-in fixture is not a metric fibration: {check.failure.message()}")
    assert check.fibration is not None
    return check.fibration


FIBRATION_FIXTURES: Dict[str, Callable[[], MetricFibrationData]] = {
    "paper-E1": _square_tower,
    "paper-E2": _twisted_hexagon,
    "product-I2xI3": lambda: trivial_product(path_graph(2), path_graph(3)),
    "product-I2xK3": lambda: trivial_product(path_graph(2), complete_graph(3)),
}


def known_names() -> List[str]:
    return ["point", "I<n>", "K<n>", "C<n>"] + sorted(FIBRATION_FIXTURES)


def fibration_fixture(name: str) -> MetricFibrationData:
    try:
        return FIBRATION_FIXTURES[name]()
    except KeyError:
        raise InputError(f"Unknown fibration fixture {name!r}; known: {', '.join(sorted(FIBRATION_FIXTURES))}") from None


def space_fixture(name: str) -> FiniteMetricSpace:
    if name == "point":
        return point_space()
    if name in FIBRATION_FIXTURES:
        return fibration_fixture(name).total
    match = _FAMILY.match(name)
    if match is None:
        raise InputError(f"Unknown fixture {name!r}; known: {', '.join(known_names())}")
    size = int(match.group("size"))
    if size < 1:
        raise InputError(f"Fixture {name!r} needs at least one vertex")
    kind = match.group("kind")
    if kind == "I":
        return path_graph(size)
    if kind == "K":
        return complete_graph(size)
    return cycle_graph(size)
