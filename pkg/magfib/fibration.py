"""Metric fibrations π: E → B, their unique lifts and fibers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

from .exceptions import FibrationError, InputError
from .metspace import FiniteMetricSpace, restrict

logger = logging.getLogger(__name__)

__all__ = (
    "FailureKind",
    "FiberSpace",
    "FibrationCheck",
    "FibrationFailure",
    "MetricFibrationData",
    "fiber",
    "fiber_isometry_failures",
    "fibration_from_labels",
    "lift",
    "require_fibration",
    "trivial_product",
    "verify_fibration",
)


class FailureKind(str, Enum):
    NON_SURJECTIVE = "non_surjective"
    LIPSCHITZ = "lipschitz"
    NO_LIFT = "no_lift"
    NON_UNIQUE_LIFT = "non_unique_lift"


@dataclass(frozen=True)
class FibrationFailure:
    kind: FailureKind
    witness: Tuple[str, ...]
    candidates: Tuple[str, ...] = ()

    def message(self) -> str:
        if self.kind is FailureKind.NON_SURJECTIVE:
            return f"base point {self.witness[0]} has an empty fiber"
        if self.kind is FailureKind.LIPSCHITZ:
            return f"projection is not 1-Lipschitz on ({self.witness[0]}, {self.witness[1]})"
        if self.kind is FailureKind.NO_LIFT:
            return f"no lift of {self.witness[0]} to {self.witness[1]}"
        return f"lift of {self.witness[0]} to {self.witness[1]} is not unique: {', '.join(self.candidates)}"


@dataclass(frozen=True)
class MetricFibrationData:
    total: FiniteMetricSpace
    base: FiniteMetricSpace
    projection: Tuple[int, ...]
    lift_table: Tuple[Tuple[int, ...], ...]
    _fibers: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        fibers: List[List[int]] = [[] for _ in range(self.base.size)]
        for x, b in enumerate(self.projection):
            fibers[b].append(x)
        object.__setattr__(self, "_fibers", tuple(tuple(f) for f in fibers))

    def proj(self, x: int) -> int:
        return self.projection[x]

    def lift(self, x: int, b: int) -> int:
        return self.lift_table[x][b]

    def fiber_indices(self, b: int) -> Tuple[int, ...]:
        return self._fibers[b]


@dataclass(frozen=True)
class FiberSpace:
    """π⁻¹(b) with the induced metric; ``members[i]`` is the E-index of fiber point i."""

    space: FiniteMetricSpace
    basepoint: int
    members: Tuple[int, ...]
    _local: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_local", {x: i for i, x in enumerate(self.members)})

    def local_index(self, x: int) -> int:
        return self._local[x]


@dataclass(frozen=True)
class FibrationCheck:
    fibration: Optional[MetricFibrationData]
    failure: Optional[FibrationFailure] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def verify_fibration(
    total: FiniteMetricSpace,
    base: FiniteMetricSpace,
    projection: Tuple[int, ...],
) -> FibrationCheck:
    """Check the fibration axioms and materialise every lift x^b."""
    if len(projection) != total.size:
        raise InputError("Projection must be defined on every point of the total space")
    for b in projection:
        if not 0 <= b < base.size:
            raise InputError(f"Projection targets unknown base index {b}")

    hit = set(projection)
    for b in range(base.size):
        if b not in hit:
            return FibrationCheck(None, FibrationFailure(FailureKind.NON_SURJECTIVE, (base.labels[b],)))

    for x in range(total.size):
        for y in range(total.size):
            if base.d(projection[x], projection[y]) > total.d(x, y):
                failure = FibrationFailure(FailureKind.LIPSCHITZ, (total.labels[x], total.labels[y]))
                return FibrationCheck(None, failure)

    fibers: List[List[int]] = [[] for _ in range(base.size)]
    for x, b in enumerate(projection):
        fibers[b].append(x)

    table: List[Tuple[int, ...]] = []
    for x in range(total.size):
        row: List[int] = []
        for b in range(base.size):
            target = base.d(projection[x], b)
            candidates = [
                c for c in fibers[b]
                if total.d(x, c) == target
                and all(total.d(x, y) == total.d(x, c) + total.d(c, y) for y in fibers[b])
            ]
            if len(candidates) != 1:
                kind = FailureKind.NO_LIFT if not candidates else FailureKind.NON_UNIQUE_LIFT
                failure = FibrationFailure(
                    kind,
                    (total.labels[x], base.labels[b]),
                    tuple(total.labels[c] for c in candidates),
                )
                logger.info("Fibration check failed: %s", failure.message())
                return FibrationCheck(None, failure)
            row.append(candidates[0])
        table.append(tuple(row))

    logger.info("Verified metric fibration: %s points over %s", total.size, base.size)
    return FibrationCheck(MetricFibrationData(total, base, tuple(projection), tuple(table)))


def require_fibration(
    total: FiniteMetricSpace,
    base: FiniteMetricSpace,
    projection: Tuple[int, ...],
) -> MetricFibrationData:
    check = verify_fibration(total, base, projection)
    if check.failure is not None:
        raise FibrationError(check.failure.message(), check.failure)
    assert check.fibration is not None
    return check.fibration


def fibration_from_labels(
    total: FiniteMetricSpace,
    base: FiniteMetricSpace,
    projection: Mapping[str, str],
) -> FibrationCheck:
    missing = [label for label in total.labels if label not in projection]
    if missing:
        raise InputError(f"Projection is missing points: {', '.join(missing)}")
    indices = tuple(base.index_of(projection[label]) for label in total.labels)
    return verify_fibration(total, base, indices)


def lift(fib: MetricFibrationData, x: int, b: int) -> int:
    """x^b, the unique point over ``b`` closest to ``x``."""
    if not 0 <= x < fib.total.size:
        raise InputError(f"Unknown total-space point {x}")
    if not 0 <= b < fib.base.size:
        raise InputError(f"Unknown base point {b}")
    return fib.lift_table[x][b]


def fiber(fib: MetricFibrationData, b: int) -> FiberSpace:
    members = fib.fiber_indices(b)
    return FiberSpace(restrict(fib.total, members), b, members)


def fiber_isometry_failures(fib: MetricFibrationData) -> List[Tuple[str, str, str]]:
    """Pairs of fibers where x ↦ x^{b'} fails to be a distance-preserving bijection."""
    failures: List[Tuple[str, str, str]] = []
    total = fib.total
    for b in range(fib.base.size):
        source = fib.fiber_indices(b)
        for b2 in range(fib.base.size):
            images = [fib.lift(x, b2) for x in source]
            if sorted(images) != sorted(fib.fiber_indices(b2)):
                failures.append((fib.base.labels[b], fib.base.labels[b2], "not a bijection"))
                continue
            for i, x in enumerate(source):
                for j, y in enumerate(source):
                    if total.d(x, y) != total.d(images[i], images[j]):
                        failures.append((fib.base.labels[b], fib.base.labels[b2], f"{total.labels[x]},{total.labels[y]}"))
                        break
                else:
                    continue
                break
    return failures


def trivial_product(fiber_space: FiniteMetricSpace, base: FiniteMetricSpace) -> MetricFibrationData:
    """F × B with the ℓ¹ metric, projected onto B; point (f, b) has index f·|B| + b."""
    nb = base.size
    labels = tuple(f"({f},{b})" for f in fiber_space.labels for b in base.labels)
    table = tuple(
        tuple(
            fiber_space.d(f, f2) + base.d(b, b2)
            for f2 in range(fiber_space.size)
            for b2 in range(nb)
        )
        for f in range(fiber_space.size)
        for b in range(nb)
    )
    total = FiniteMetricSpace(labels, table)
    projection = tuple(i % nb for i in range(total.size))
    return require_fibration(total, base, projection)


def product_index(base: FiniteMetricSpace, f: int, b: int) -> int:
    return f * base.size + b
