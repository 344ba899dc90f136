"""Command implementations shared by the CLI and the HTTP routers."""

from __future__ import annotations

import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import pandas as pd
from joblib import Parallel, delayed
from pydantic import TypeAdapter

from .deltaset import cau_verify_range, deltaiso_check
from .exceptions import InputError
from .fibration import FibrationCheck, MetricFibrationData, fiber_isometry_failures, fibration_from_labels
from .fixtures import FIBRATION_FIXTURES, fibration_fixture, space_fixture
from .homology import homology
from .kunneth import KunnethReport, verify_kunneth, verify_kunneth_all_basepoints
from .magchain import Restriction, build_complex
from .metspace import FiniteMetricSpace, achievable_lengths, format_length, from_graph, from_matrix, parse_length, require_metric, validate_metric
from .monitoring import command_latency, command_runs, complexes_built
from .morse import hv_matching, morse_reduce
from .schemas import (
    CauLevelRecord,
    CauRecord,
    CauRowRecord,
    CommandRecord,
    CommandRequest,
    DegreeRecord,
    DeltaIsoLevelRecord,
    DeltaIsoRecord,
    FibcheckRecord,
    FibrationFile,
    GraphSpaceFile,
    KunnethLevelRecord,
    KunnethRecord,
    KunnethReportRecord,
    KunnethRowRecord,
    LevelRecord,
    MatrixSpaceFile,
    MhRecord,
    MorseLevelRecord,
    MorseRecord,
    SpaceFile,
    ValidateRecord,
)

logger = logging.getLogger(__name__)

_space_documents: TypeAdapter = TypeAdapter(SpaceFile)
_projection_documents: TypeAdapter = TypeAdapter(Dict[str, str])


def space_from_document(doc: Union[GraphSpaceFile, MatrixSpaceFile], name: str = "space", strict: bool = True) -> FiniteMetricSpace:
    """Graph documents are metric by construction; matrix documents are checked unless ``strict`` is off."""
    if isinstance(doc, GraphSpaceFile):
        return from_graph(doc.vertices, doc.edges, doc.labels)
    space = from_matrix(doc.labels, doc.dist)
    return require_metric(space, name) if strict else space


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_space(path: str, strict: bool = True) -> FiniteMetricSpace:
    return space_from_document(_space_documents.validate_json(_read(path)), path, strict)


def fibration_from_document(doc: FibrationFile) -> FibrationCheck:
    total = space_from_document(doc.total, "total space")
    base = space_from_document(doc.base, "base space")
    return fibration_from_labels(total, base, doc.projection)


def resolve_space(request: CommandRequest) -> Tuple[str, FiniteMetricSpace]:
    if request.fixture:
        return request.fixture, space_fixture(request.fixture)
    if request.space:
        return request.space, load_space(request.space, strict=request.command != "validate")
    raise InputError("Give --fixture NAME or --space FILE")


def resolve_fibration(request: CommandRequest) -> Tuple[str, FibrationCheck]:
    if request.fixture:
        if request.fixture not in FIBRATION_FIXTURES:
            raise InputError(f"{request.fixture!r} is not a fibration fixture; known: {', '.join(sorted(FIBRATION_FIXTURES))}")
        return request.fixture, FibrationCheck(fibration_fixture(request.fixture))
    if request.fibration:
        return request.fibration, fibration_from_document(FibrationFile.model_validate_json(_read(request.fibration)))
    if request.total and request.base and request.proj:
        total = load_space(request.total)
        base = load_space(request.base)
        projection = _projection_documents.validate_json(_read(request.proj))
        return request.total, fibration_from_labels(total, base, projection)
    raise InputError("Give --fixture NAME, --fibration FILE or --total FILE --base FILE --proj FILE")


def _require_verified(name: str, check: FibrationCheck) -> MetricFibrationData:
    if check.fibration is None:
        assert check.failure is not None
        raise InputError(f"{name} is not a metric fibration: {check.failure.message()}")
    return check.fibration


def _basepoint(fib: MetricFibrationData, label: Optional[str]) -> int:
    return 0 if label is None else fib.base.index_of(label)


def _mh_level(space: FiniteMetricSpace, length: Fraction, n_max: Optional[int]) -> LevelRecord:
    complex_ = build_complex(space, length)
    summary = homology(complex_)
    top = complex_.top_degree if n_max is None else min(complex_.top_degree, n_max)
    return LevelRecord(
        l=format_length(length),
        ranks=[complex_.rank(n) for n in range(top + 1)],
        H=[DegreeRecord(n=n, betti=summary.betti(n), torsion=list(summary.torsion(n))) for n in range(top + 1)],
    )


def run_validate(name: str, space: FiniteMetricSpace) -> ValidateRecord:
    report = validate_metric(space)
    return ValidateRecord(space=name, ok=report.ok, axiom=report.axiom, witness=list(report.witness), message=report.message())


def run_mh(name: str, space: FiniteMetricSpace, l_max: Fraction, n_max: Optional[int] = None, jobs: int = 1) -> MhRecord:
    lengths = achievable_lengths(space, l_max)
    levels = Parallel(n_jobs=jobs)(delayed(_mh_level)(space, length, n_max) for length in lengths)
    complexes_built.labels(command="mh").inc(len(lengths))
    return MhRecord(space=name, homology=list(levels))


def run_fibcheck(name: str, check: FibrationCheck) -> FibcheckRecord:
    if check.failure is not None:
        failure = check.failure
        return FibcheckRecord(
            fibration=name,
            ok=False,
            failure=failure.kind.value,
            message=failure.message(),
            witness=list(failure.witness),
            candidates=list(failure.candidates),
        )
    fib = check.fibration
    assert fib is not None
    isometry = fiber_isometry_failures(fib)
    fibers = {
        fib.base.labels[b]: [fib.total.labels[x] for x in fib.fiber_indices(b)]
        for b in range(fib.base.size)
    }
    return FibcheckRecord(
        fibration=name,
        ok=not isometry,
        message="metric fibration verified" if not isometry else "fibers are not isometric",
        fibers=fibers,
        fiber_isometry_failures=[list(w) for w in isometry],
    )


def _kunneth_report_record(report: KunnethReport) -> KunnethReportRecord:
    levels = []
    for level in report.levels:
        rows = [
            KunnethRowRecord(
                n=row.n,
                betti_E=row.betti_total,
                betti_quotient=row.betti_quotient,
                betti_rhs=row.betti_rhs,
                torsion_E=list(row.torsion_total),
                torsion_quotient=list(row.torsion_quotient),
                torsion_rhs=list(row.torsion_rhs),
                betti_D=row.betti_d,
                torsion_D=list(row.torsion_d),
            )
            for row in level.rows
        ]
        levels.append(
            KunnethLevelRecord(
                l=format_length(level.length),
                ok=level.ok,
                quotient_ok=level.quotient_ok,
                phi_psi_ok=level.phi_psi_ok,
                homology_match=level.homology_match,
                d_acyclic=level.d_acyclic,
                projection_quasi_iso=level.projection_quasi_iso,
                failure=level.failure,
                rows=rows,
            )
        )
    return KunnethReportRecord(basepoint=report.basepoint, l_max=format_length(report.l_max), ok=report.ok, levels=levels)


def run_kunneth(
    name: str,
    fib: MetricFibrationData,
    l_max: Fraction,
    n_max: Optional[int] = None,
    basepoint: Optional[str] = None,
    all_basepoints: bool = False,
    jobs: int = 1,
) -> KunnethRecord:
    if all_basepoints:
        reports = verify_kunneth_all_basepoints(fib, l_max, n_max, jobs)
    else:
        reports = [verify_kunneth(fib, _basepoint(fib, basepoint), l_max, n_max, jobs)]
    records = [_kunneth_report_record(r) for r in reports]
    return KunnethRecord(fibration=name, ok=all(r.ok for r in records), reports=records)


def _morse_level(fib: MetricFibrationData, length: Fraction) -> MorseLevelRecord:
    d_complex = build_complex(fib.total, length, restriction=Restriction.D_ONLY, fibration=fib)
    matching = hv_matching(fib, d_complex)
    reduced = morse_reduce(matching)
    return MorseLevelRecord(
        l=format_length(length),
        d_ranks=[len(b) for b in d_complex.bases],
        matched_pairs=len(matching.edges),
        critical=matching.critical_count(),
        perfect=matching.is_perfect(),
        reduced_ranks=[len(b) for b in reduced.bases],
        d_homology_zero=homology(d_complex).is_zero() and homology(reduced).is_zero(),
    )


def run_morse(name: str, fib: MetricFibrationData, l_max: Fraction, jobs: int = 1) -> MorseRecord:
    lengths = achievable_lengths(fib.total, l_max)
    levels = Parallel(n_jobs=jobs)(delayed(_morse_level)(fib, length) for length in lengths)
    complexes_built.labels(command="morse").inc(len(lengths))
    ok = all(level.perfect and level.d_homology_zero for level in levels)
    return MorseRecord(fibration=name, ok=ok, levels=list(levels))


def run_deltaiso(
    name: str,
    fib: MetricFibrationData,
    l_max: Fraction,
    n_max: Optional[int] = None,
    basepoint: Optional[str] = None,
    jobs: int = 1,
) -> DeltaIsoRecord:
    b = _basepoint(fib, basepoint)
    lengths = achievable_lengths(fib.total, l_max)
    reports = Parallel(n_jobs=jobs)(delayed(deltaiso_check)(fib, b, length, n_max) for length in lengths)
    levels = [
        DeltaIsoLevelRecord(
            l=format_length(r.length),
            ok=r.ok,
            cell_counts=[list(c) for c in r.cell_counts],
            failure=r.failure,
        )
        for r in reports
    ]
    return DeltaIsoRecord(fibration=name, basepoint=fib.base.labels[b], ok=all(r.ok for r in reports), levels=levels)


def run_cau(name: str, space: FiniteMetricSpace, l_max: Fraction, refine: int = 1, jobs: int = 1) -> CauRecord:
    reports, common = cau_verify_range(space, l_max, refine=refine, jobs=jobs)
    levels = [
        CauLevelRecord(
            l=str(r.length),
            consistent_shifts=list(r.consistent_shifts),
            rows=[
                CauRowRecord(
                    n=row.n,
                    betti_relative=row.betti_relative,
                    torsion_relative=list(row.torsion_relative),
                    betti_mh=row.betti_mh,
                    torsion_mh=list(row.torsion_mh),
                )
                for row in r.rows
            ],
        )
        for r in reports
    ]
    fitted = min(common, key=lambda s: (abs(s), s)) if common else None
    return CauRecord(
        space=name,
        refine=refine,
        ok=bool(common),
        consistent_shifts=list(common),
        fitted_shift=fitted,
        levels=levels,
    )


def record_ok(record: CommandRecord) -> bool:
    return getattr(record, "ok", True)


def execute(request: CommandRequest) -> CommandRecord:
    """Resolve inputs and run one command; raises InputError for bad input."""
    l_max = parse_length(request.l_max)
    start = time.perf_counter()
    command = request.command
    record: CommandRecord
    if command in ("validate", "mh", "cau"):
        name, space = resolve_space(request)
        if command == "validate":
            record = run_validate(name, space)
        elif command == "mh":
            record = run_mh(name, space, l_max, request.n_max, request.jobs)
        else:
            record = run_cau(name, space, l_max, request.refine, request.jobs)
    else:
        name, check = resolve_fibration(request)
        if command == "fibcheck":
            record = run_fibcheck(name, check)
        else:
            fib = _require_verified(name, check)
            if command == "kunneth":
                record = run_kunneth(name, fib, l_max, request.n_max, request.basepoint, request.all_basepoints, request.jobs)
            elif command == "morse":
                record = run_morse(name, fib, l_max, request.jobs)
            else:
                record = run_deltaiso(name, fib, l_max, request.n_max, request.basepoint, request.jobs)
    command_latency.labels(command=command).observe(time.perf_counter() - start)
    command_runs.labels(command=command, outcome="pass" if record_ok(record) else "fail").inc()
    logger.info("%s on %s: %s", command, name, "pass" if record_ok(record) else "fail")
    return record


def _torsion(values: List[int]) -> str:
    return ",".join(str(v) for v in values)


def _frame(rows: List[Dict[str, object]], columns: List[str]) -> str:
    if not rows:
        return "  ".join(columns)
    return pd.DataFrame(rows, columns=columns).to_string(index=False)


def _mh_table(record: MhRecord) -> str:
    rows = [
        {"l": level.l, "n": h.n, "rank": level.ranks[h.n], "betti": h.betti, "torsion": _torsion(h.torsion)}
        for level in record.homology
        for h in level.H
    ]
    return f"magnitude homology of {record.space}\n" + _frame(rows, ["l", "n", "rank", "betti", "torsion"])


def _validate_table(record: ValidateRecord) -> str:
    return f"{record.space}: {record.message}"


def _fibcheck_table(record: FibcheckRecord) -> str:
    head = f"{record.fibration}: {record.message}"
    rows = [{"base": b, "fiber": " ".join(points)} for b, points in record.fibers.items()]
    return head if not rows else head + "\n" + _frame(rows, ["base", "fiber"])


def _kunneth_table(record: KunnethRecord) -> str:
    blocks = []
    for report in record.reports:
        rows = [
            {
                "l": level.l,
                "n": row.n,
                "betti_E": row.betti_E,
                "betti_quotient": row.betti_quotient,
                "betti_rhs": row.betti_rhs,
                "torsion": f"{_torsion(row.torsion_E)}|{_torsion(row.torsion_quotient)}|{_torsion(row.torsion_rhs)}",
                "D": row.betti_D,
                "ok": level.ok,
            }
            for level in report.levels
            for row in level.rows
        ]
        verdict = "pass" if report.ok else "fail"
        blocks.append(
            f"Künneth over basepoint {report.basepoint} up to l={report.l_max}: {verdict}\n"
            + _frame(rows, ["l", "n", "betti_E", "betti_quotient", "betti_rhs", "torsion", "D", "ok"])
        )
        blocks.extend(f"l={level.l}: {level.failure}" for level in report.levels if level.failure)
    return "\n".join(blocks)


def _morse_table(record: MorseRecord) -> str:
    rows = [
        {
            "l": level.l,
            "D_cells": sum(level.d_ranks),
            "pairs": level.matched_pairs,
            "critical": level.critical,
            "perfect": level.perfect,
            "H(D)=0": level.d_homology_zero,
        }
        for level in record.levels
    ]
    return f"hv-matching on D-complexes of {record.fibration}\n" + _frame(rows, ["l", "D_cells", "pairs", "critical", "perfect", "H(D)=0"])


def _deltaiso_table(record: DeltaIsoRecord) -> str:
    rows = [
        {
            "l": level.l,
            "cells": " ".join(f"{a}/{b}" for a, b in level.cell_counts),
            "ok": level.ok,
            "failure": level.failure or "",
        }
        for level in record.levels
    ]
    return f"quotient Δ-set bijection for {record.fibration} over {record.basepoint}\n" + _frame(rows, ["l", "cells", "ok", "failure"])


def _cau_table(record: CauRecord) -> str:
    rows = [
        {
            "l": level.l,
            "n": row.n,
            "relative": row.betti_relative,
            "mh": row.betti_mh,
            "torsion": f"{_torsion(row.torsion_relative)}|{_torsion(row.torsion_mh)}",
        }
        for level in record.levels
        for row in level.rows
    ]
    shift = "none" if record.fitted_shift is None else str(record.fitted_shift)
    return f"causal order complexes of {record.space} (refine={record.refine}), fitted shift {shift}\n" + _frame(
        rows, ["l", "n", "relative", "mh", "torsion"]
    )


_TABLES: Dict[type, Callable] = {
    MhRecord: _mh_table,
    ValidateRecord: _validate_table,
    FibcheckRecord: _fibcheck_table,
    KunnethRecord: _kunneth_table,
    MorseRecord: _morse_table,
    DeltaIsoRecord: _deltaiso_table,
    CauRecord: _cau_table,
}


def render(record: CommandRecord, output_format: str) -> str:
    if output_format == "structured":
        return record.model_dump_json(indent=2)
    return _TABLES[type(record)](record)
