"""The h/v/t word calculus on tuples of a metric fibration."""

from __future__ import annotations

import logging
from collections import defaultdict
from enum import Enum
from fractions import Fraction
from typing import Dict, Sequence, Set, Tuple

from .exceptions import WordError
from .fibration import MetricFibrationData
from .metspace import is_between

logger = logging.getLogger(__name__)

__all__ = (
    "DMembership",
    "HORIZONTAL",
    "TILTED",
    "VERTICAL",
    "d_membership",
    "fill_hv",
    "letter",
    "observed_boundary_letters",
    "path_length",
    "t_word",
    "unfill_hv",
    "weight",
)

HORIZONTAL = "h"
VERTICAL = "v"
TILTED = "t"

TWord = str


class DMembership(str, Enum):
    NONE = "none"
    TILTED_FIRST = "tilted_first"
    HV_FIRST = "hv_first"


def letter(fib: MetricFibrationData, x: int, y: int) -> str:
    if x == y:
        raise WordError(f"Repeated consecutive point {fib.total.labels[x]}")
    bx, by = fib.projection[x], fib.projection[y]
    if bx == by:
        return VERTICAL
    base_d = fib.base.d(bx, by)
    total_d = fib.total.d(x, y)
    if base_d == total_d:
        return HORIZONTAL
    if base_d < total_d:
        return TILTED
    raise WordError(f"Projection expands the pair ({fib.total.labels[x]}, {fib.total.labels[y]})")


def t_word(fib: MetricFibrationData, points: Sequence[int]) -> TWord:
    return "".join(letter(fib, points[i], points[i + 1]) for i in range(len(points) - 1))


def _leading_block(word: TWord) -> Tuple[int, int]:
    """Lengths m, m' of the leading vᵐ hᵐ′ block."""
    i = 0
    while i < len(word) and word[i] == VERTICAL:
        i += 1
    m = i
    while i < len(word) and word[i] == HORIZONTAL:
        i += 1
    return m, i - m


def d_membership(word: TWord) -> DMembership:
    m, m_h = _leading_block(word)
    k = m + m_h
    if k == len(word):
        return DMembership.NONE
    if word[k] == TILTED:
        return DMembership.TILTED_FIRST
    if word[k] == VERTICAL and m_h > 0:
        return DMembership.HV_FIRST
    return DMembership.NONE


def path_length(fib: MetricFibrationData, points: Sequence[int]) -> Fraction:
    d = fib.total.dist
    return sum((d[points[i]][points[i + 1]] for i in range(len(points) - 1)), Fraction(0))


def fill_hv(fib: MetricFibrationData, points: Sequence[int]) -> Tuple[int, ...]:
    """Insert x_k^{π x_{k+1}} into the first tilted step (x_k, x_{k+1})."""
    word = t_word(fib, points)
    if d_membership(word) is not DMembership.TILTED_FIRST:
        raise WordError(f"fill_hv needs a tilted-first tuple, got word {word!r}")
    k = sum(_leading_block(word))
    inserted = fib.lift(points[k], fib.projection[points[k + 1]])
    filled = tuple(points[: k + 1]) + (inserted,) + tuple(points[k + 1:])
    if __debug__:
        if path_length(fib, filled) != path_length(fib, points):
            raise WordError(f"fill_hv changed the length of {tuple(points)}")
    return filled


def unfill_hv(fib: MetricFibrationData, points: Sequence[int]) -> Tuple[int, ...]:
    """Inverse of :func:`fill_hv`: drop the middle point of the first hv triple."""
    word = t_word(fib, points)
    if d_membership(word) is not DMembership.HV_FIRST:
        raise WordError(f"unfill_hv needs an hv-first tuple, got word {word!r}")
    k = sum(_leading_block(word))
    return tuple(points[:k]) + tuple(points[k + 1:])


def weight(fib: MetricFibrationData, points: Sequence[int]) -> int:
    return sum(i for i, ch in enumerate(t_word(fib, points)) if ch == VERTICAL)


def observed_boundary_letters(fib: MetricFibrationData, l_max: Fraction) -> Dict[str, Set[str]]:
    """For each two-letter word xy, the letters T(x, z) seen over x ≺ y ≺ z with length ≤ l_max."""
    observed: Dict[str, Set[str]] = defaultdict(set)
    total = fib.total
    n = total.size
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            for z in range(n):
                if z == y or z == x:
                    continue
                if total.d(x, y) + total.d(y, z) > l_max or not is_between(total, x, y, z):
                    continue
                observed[t_word(fib, (x, y, z))].add(letter(fib, x, z))
    return dict(observed)
