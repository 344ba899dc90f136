"""Input documents, command requests and versioned structured output records."""

from __future__ import annotations

from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

Label = Union[int, str]
Rational = Union[int, str]


def check_rational(value: Rational) -> str:
    if isinstance(value, bool):
        raise ValueError("booleans are not lengths")
    text = str(value).strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {value!r}")
    try:
        parsed = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not an exact rational: {value!r}") from None
    if parsed < 0:
        raise ValueError("lengths must be nonnegative")
    return text


class GraphSpaceFile(BaseModel):
    type: Literal["graph"]
    vertices: int = Field(ge=1)
    edges: List[Tuple[Label, Label]] = []
    labels: Optional[List[str]] = None


class MatrixSpaceFile(BaseModel):
    type: Literal["matrix"]
    labels: List[str]
    dist: List[List[Rational]]


SpaceFile = Annotated[Union[GraphSpaceFile, MatrixSpaceFile], Field(discriminator="type")]


class FibrationFile(BaseModel):
    total: SpaceFile
    base: SpaceFile
    projection: Dict[str, str]


class CommandRequest(BaseModel):
    command: Literal["validate", "mh", "fibcheck", "kunneth", "morse", "deltaiso", "cau"]
    fixture: Optional[str] = None
    space: Optional[str] = None
    fibration: Optional[str] = None
    total: Optional[str] = None
    base: Optional[str] = None
    proj: Optional[str] = None
    l_max: str = "2"
    n_max: Optional[int] = Field(default=None, ge=0)
    basepoint: Optional[str] = None
    format: Literal["table", "structured"] = "table"
    jobs: int = Field(default=1, ge=1)
    refine: int = Field(default=1, ge=1)
    all_basepoints: bool = False

    @field_validator("l_max", mode="before")
    @classmethod
    def _rational_l_max(cls, value: Rational) -> str:
        return check_rational(value)


class SpaceQuery(BaseModel):
    fixture: Optional[str] = None
    space: Optional[SpaceFile] = None
    l_max: str = "2"
    n_max: Optional[int] = Field(default=None, ge=0)

    @field_validator("l_max", mode="before")
    @classmethod
    def _rational_l_max(cls, value: Rational) -> str:
        return check_rational(value)


class FibrationQuery(BaseModel):
    fixture: Optional[str] = None
    fibration: Optional[FibrationFile] = None
    l_max: str = "2"
    n_max: Optional[int] = Field(default=None, ge=0)
    basepoint: Optional[str] = None
    all_basepoints: bool = False

    @field_validator("l_max", mode="before")
    @classmethod
    def _rational_l_max(cls, value: Rational) -> str:
        return check_rational(value)


class DegreeRecord(BaseModel):
    n: int
    betti: int
    torsion: List[int] = []


class LevelRecord(BaseModel):
    l: str
    ranks: List[int]
    H: List[DegreeRecord]


class MhRecord(BaseModel):
    schema_version: Literal["magfib.mh/1"] = "magfib.mh/1"
    space: str
    homology: List[LevelRecord]


class ValidateRecord(BaseModel):
    schema_version: Literal["magfib.validate/1"] = "magfib.validate/1"
    space: str
    ok: bool
    axiom: Optional[str] = None
    witness: List[str] = []
    message: str


class FibcheckRecord(BaseModel):
    schema_version: Literal["magfib.fibcheck/1"] = "magfib.fibcheck/1"
    fibration: str
    ok: bool
    failure: Optional[str] = None
    message: str
    witness: List[str] = []
    candidates: List[str] = []
    fibers: Dict[str, List[str]] = {}
    fiber_isometry_failures: List[List[str]] = []


class KunnethRowRecord(BaseModel):
    n: int
    betti_E: int
    betti_quotient: int
    betti_rhs: int
    torsion_E: List[int] = []
    torsion_quotient: List[int] = []
    torsion_rhs: List[int] = []
    betti_D: int
    torsion_D: List[int] = []


class KunnethLevelRecord(BaseModel):
    l: str
    ok: bool
    quotient_ok: bool
    phi_psi_ok: bool
    homology_match: bool
    d_acyclic: bool
    projection_quasi_iso: bool
    failure: Optional[str] = None
    rows: List[KunnethRowRecord] = []


class KunnethReportRecord(BaseModel):
    basepoint: str
    l_max: str
    ok: bool
    levels: List[KunnethLevelRecord]


class KunnethRecord(BaseModel):
    schema_version: Literal["magfib.kunneth/1"] = "magfib.kunneth/1"
    fibration: str
    ok: bool
    reports: List[KunnethReportRecord]


class MorseLevelRecord(BaseModel):
    l: str
    d_ranks: List[int]
    matched_pairs: int
    critical: int
    perfect: bool
    reduced_ranks: List[int]
    d_homology_zero: bool


class MorseRecord(BaseModel):
    schema_version: Literal["magfib.morse/1"] = "magfib.morse/1"
    fibration: str
    ok: bool
    levels: List[MorseLevelRecord]


class DeltaIsoLevelRecord(BaseModel):
    l: str
    ok: bool
    cell_counts: List[Tuple[int, int]]
    failure: Optional[str] = None


class DeltaIsoRecord(BaseModel):
    schema_version: Literal["magfib.deltaiso/1"] = "magfib.deltaiso/1"
    fibration: str
    basepoint: str
    ok: bool
    levels: List[DeltaIsoLevelRecord]


class CauRowRecord(BaseModel):
    n: int
    betti_relative: int
    torsion_relative: List[int] = []
    betti_mh: int
    torsion_mh: List[int] = []


class CauLevelRecord(BaseModel):
    l: str
    consistent_shifts: List[int]
    rows: List[CauRowRecord]


class CauRecord(BaseModel):
    schema_version: Literal["magfib.cau/1"] = "magfib.cau/1"
    space: str
    refine: int
    ok: bool
    consistent_shifts: List[int]
    fitted_shift: Optional[int] = None
    levels: List[CauLevelRecord]


CommandRecord = Union[
    MhRecord,
    ValidateRecord,
    FibcheckRecord,
    KunnethRecord,
    MorseRecord,
    DeltaIsoRecord,
    CauRecord,
]
