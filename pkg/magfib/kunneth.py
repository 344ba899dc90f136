"""The maps φ/ψ between MC(E)/D(E) and ⊕ MC(F) ⊗ MC(B), and end-to-end Künneth verification."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from .classify import HORIZONTAL, VERTICAL, path_length, t_word
from .config import get_settings
from .exceptions import ChainComplexError, ChainMapError, InputError, MagfibError
from .fibration import FiberSpace, MetricFibrationData, fiber
from .homology import HomologySummary, homology, is_quasi_iso
from .magchain import (
    ChainMap,
    GradedChainComplex,
    Restriction,
    SparseMatrix,
    TensorCell,
    build_complex,
    quotient_complex,
    tensor_and_sum,
)
from .metspace import FiniteMetricSpace, achievable_lengths, format_length

logger = logging.getLogger(__name__)

__all__ = (
    "KunnethLevel",
    "KunnethReport",
    "KunnethRow",
    "PhiPsiPair",
    "kunneth_rank_formula",
    "kunneth_rhs",
    "length_splittings",
    "phi_map",
    "projection_map",
    "verify_kunneth",
    "verify_kunneth_all_basepoints",
)


@dataclass(frozen=True)
class PhiPsiPair:
    basepoint: int
    phi: ChainMap
    psi: ChainMap


def length_splittings(fiber_space: FiniteMetricSpace, base: FiniteMetricSpace, length: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Every (ℓ_v, ℓ_h) with ℓ_v + ℓ_h = ℓ realised by both factors, ascending in ℓ_v."""
    length = Fraction(length)
    base_lengths = set(achievable_lengths(base, length))
    return [(lv, length - lv) for lv in achievable_lengths(fiber_space, length) if length - lv in base_lengths]


def kunneth_rhs(
    fiber_space: FiniteMetricSpace,
    base: FiniteMetricSpace,
    length: Fraction,
    n_max: Optional[int] = None,
) -> GradedChainComplex:
    length = Fraction(length)
    pairs = [
        (build_complex(fiber_space, lv), build_complex(base, lh))
        for lv, lh in length_splittings(fiber_space, base, length)
    ]
    return tensor_and_sum(pairs, n_max=n_max, length=length)


def kunneth_rank_formula(fiber_space: FiniteMetricSpace, base: FiniteMetricSpace, length: Fraction, n: int) -> int:
    """Σ rank MH^{ℓv}_{mv}(F) · rank MH^{ℓh}_{mh}(B); valid when everything is torsion-free."""
    total = 0
    for lv, lh in length_splittings(fiber_space, base, length):
        h_fiber = homology(build_complex(fiber_space, lv))
        h_base = homology(build_complex(base, lh))
        total += sum(h_fiber.betti(m) * h_base.betti(n - m) for m in range(n + 1))
    return total


def _vh_split(word: str) -> int:
    m = 0
    while m < len(word) and word[m] == VERTICAL:
        m += 1
    if any(ch != HORIZONTAL for ch in word[m:]):
        raise ChainComplexError(f"Word {word!r} is not of the form vᵐhᵏ")
    return m


def _phi_cell(fib: MetricFibrationData, f: FiberSpace, cell: Tuple[int, ...]) -> TensorCell:
    m = _vh_split(t_word(fib, cell))
    vertical = tuple(f.local_index(fib.lift(x, f.basepoint)) for x in cell[: m + 1])
    horizontal = tuple(fib.projection[x] for x in cell[m:])
    lv = path_length(fib, cell[: m + 1])
    lh = path_length(fib, cell) - lv
    return TensorCell((lv, lh), vertical, horizontal)


def _psi_cell(fib: MetricFibrationData, f: FiberSpace, cell: TensorCell) -> Tuple[int, ...]:
    """(f₀..f_m) ⊗ (b₀..b_k) ↦ (f₀^{b₀}, …, f_m^{b₀}, f_m^{b₀b₁}, …, f_m^{b₀…b_k})."""
    base_points = cell.right
    lifted = [fib.lift(f.members[i], base_points[0]) for i in cell.left]
    point = lifted[-1]
    for b in base_points[1:]:
        point = fib.lift(point, b)
        lifted.append(point)
    return tuple(lifted)


def phi_map(
    fib: MetricFibrationData,
    b: int,
    length: Fraction,
    quotient: GradedChainComplex,
    rhs: GradedChainComplex,
) -> PhiPsiPair:
    """Build φ and ψ and check they are mutually inverse chain maps."""
    f = fiber(fib, b)
    top = max(quotient.top_degree, rhs.top_degree) + 1
    phi_cols: List[SparseMatrix] = []
    psi_cols: List[SparseMatrix] = []
    for n in range(top):
        target_index = rhs.index(n)
        cols: List[Dict[int, int]] = []
        for cell in quotient.basis(n):
            image = _phi_cell(fib, f, cell)
            if image not in target_index:
                raise ChainMapError(f"φ({cell!r}) = {image!r} is not a generator", n, cell)
            cols.append({target_index[image]: 1})
        phi_cols.append(SparseMatrix.from_columns(rhs.rank(n), cols))

        source_index = quotient.index(n)
        back: List[Dict[int, int]] = []
        for cell in rhs.basis(n):
            image = _psi_cell(fib, f, cell)
            if image not in source_index:
                raise ChainMapError(f"ψ({cell!r}) = {image!r} is not a generator", n, cell)
            back.append({source_index[image]: 1})
        psi_cols.append(SparseMatrix.from_columns(quotient.rank(n), back))

    phi = ChainMap(quotient, rhs, tuple(phi_cols))
    psi = ChainMap(rhs, quotient, tuple(psi_cols))
    for name, chain_map in (("φ", phi), ("ψ", psi)):
        failure = chain_map.first_failure()
        if failure is not None:
            raise ChainMapError(f"{name} is not a chain map at {failure[1]!r}", *failure)
    if not psi.compose(phi).is_identity():
        raise ChainMapError("ψφ is not the identity")
    if not phi.compose(psi).is_identity():
        raise ChainMapError("φψ is not the identity")
    logger.debug("φ/ψ verified at l=%s over basepoint %s", length, fib.base.labels[b])
    return PhiPsiPair(b, phi, psi)


def projection_map(full: GradedChainComplex, quotient: GradedChainComplex) -> ChainMap:
    comps = []
    for n in range(full.top_degree + 1):
        index = quotient.index(n)
        cols = [{index[cell]: 1} if cell in index else {} for cell in full.basis(n)]
        comps.append(SparseMatrix.from_columns(quotient.rank(n), cols))
    return ChainMap(full, quotient, tuple(comps))


@dataclass(frozen=True)
class KunnethRow:
    n: int
    betti_total: int
    betti_quotient: int
    betti_rhs: int
    torsion_total: Tuple[int, ...]
    torsion_quotient: Tuple[int, ...]
    torsion_rhs: Tuple[int, ...]
    betti_d: int
    torsion_d: Tuple[int, ...]


@dataclass(frozen=True)
class KunnethLevel:
    length: Fraction
    rows: Tuple[KunnethRow, ...] = ()
    quotient_ok: bool = False
    phi_psi_ok: bool = False
    homology_match: bool = False
    d_acyclic: bool = False
    projection_quasi_iso: bool = False
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return (
            self.failure is None
            and self.quotient_ok
            and self.phi_psi_ok
            and self.homology_match
            and self.d_acyclic
            and self.projection_quasi_iso
        )


@dataclass(frozen=True)
class KunnethReport:
    basepoint: str
    l_max: Fraction
    levels: Tuple[KunnethLevel, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(level.ok for level in self.levels)


def _rows(h_total: HomologySummary, h_quot: HomologySummary, h_rhs: HomologySummary, h_d: HomologySummary, top: int) -> Tuple[KunnethRow, ...]:
    return tuple(
        KunnethRow(
            n,
            h_total.betti(n),
            h_quot.betti(n),
            h_rhs.betti(n),
            h_total.torsion(n),
            h_quot.torsion(n),
            h_rhs.torsion(n),
            h_d.betti(n),
            h_d.torsion(n),
        )
        for n in range(top + 1)
    )


def verify_level(fib: MetricFibrationData, b: int, length: Fraction, n_max: Optional[int] = None) -> KunnethLevel:
    """All checks at one length; failures are recorded on the level, never raised."""
    total = fib.total
    try:
        full = build_complex(total, length)
        h_total = homology(full)
    except MagfibError as exc:
        return KunnethLevel(length, failure=f"MC(E): {exc}")
    top = full.top_degree if n_max is None else min(full.top_degree, n_max)

    try:
        d_complex = build_complex(total, length, restriction=Restriction.D_ONLY, fibration=fib)
        quotient = quotient_complex(full, [set(d_complex.basis(n)) for n in range(d_complex.top_degree + 1)])
    except ChainComplexError as exc:
        return KunnethLevel(length, failure=f"D(E) is not a subcomplex: {exc}")
    except MagfibError as exc:
        return KunnethLevel(length, failure=f"D(E): {exc}")

    try:
        rhs = kunneth_rhs(fiber(fib, b).space, fib.base, length)
        h_quot = homology(quotient)
        h_rhs = homology(rhs)
        h_d = homology(d_complex)
    except MagfibError as exc:
        return KunnethLevel(length, quotient_ok=True, failure=f"homology: {exc}")
    rows = _rows(h_total, h_quot, h_rhs, h_d, top)

    phi_psi_ok = True
    failure: Optional[str] = None
    try:
        phi_map(fib, b, length, quotient, rhs)
    except MagfibError as exc:
        phi_psi_ok = False
        failure = f"φ/ψ: {exc}"

    try:
        projection_ok = is_quasi_iso(projection_map(full, quotient))
    except MagfibError as exc:
        projection_ok = False
        failure = failure or f"projection: {exc}"

    homology_match = h_total.same_as(h_quot) and h_quot.same_as(h_rhs)
    level = KunnethLevel(
        length,
        rows,
        quotient_ok=True,
        phi_psi_ok=phi_psi_ok,
        homology_match=homology_match,
        d_acyclic=h_d.is_zero(),
        projection_quasi_iso=projection_ok,
        failure=failure,
    )
    if not level.ok:
        logger.warning("Künneth check failed at l=%s: %s", format_length(length), failure or rows)
    return level


def verify_kunneth(
    fib: MetricFibrationData,
    b: Optional[int] = None,
    l_max: Fraction = Fraction(0),
    n_max: Optional[int] = None,
    jobs: Optional[int] = None,
) -> KunnethReport:
    basepoint = 0 if b is None else b
    if not 0 <= basepoint < fib.base.size:
        raise InputError(f"Unknown base point {basepoint}")
    l_max = Fraction(l_max)
    lengths = achievable_lengths(fib.total, l_max)
    n_jobs = jobs if jobs is not None else get_settings().jobs
    levels = Parallel(n_jobs=n_jobs)(delayed(verify_level)(fib, basepoint, length, n_max) for length in lengths)
    report = KunnethReport(fib.base.labels[basepoint], l_max, tuple(levels))
    logger.info(
        "Künneth verification over %s up to l=%s: %s",
        report.basepoint,
        format_length(l_max),
        "pass" if report.ok else "fail",
    )
    return report


def verify_kunneth_all_basepoints(
    fib: MetricFibrationData,
    l_max: Fraction,
    n_max: Optional[int] = None,
    jobs: Optional[int] = None,
) -> List[KunnethReport]:
    return [verify_kunneth(fib, b, l_max, n_max, jobs) for b in range(fib.base.size)]
