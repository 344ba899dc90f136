import logging

from fastapi import APIRouter, HTTPException
from pydantic import ValidationError

from ..commands import fibration_from_document, run_fibcheck, run_kunneth, run_mh, run_morse, space_from_document
from ..exceptions import InputError, MagfibError
from ..fibration import FibrationCheck, MetricFibrationData
from ..fixtures import fibration_fixture, space_fixture
from ..metspace import FiniteMetricSpace, parse_length
from ..schemas import FibcheckRecord, FibrationQuery, KunnethRecord, MhRecord, MorseRecord, SpaceQuery

logger = logging.getLogger(__name__)

router = APIRouter()


def _space(query: SpaceQuery) -> tuple[str, FiniteMetricSpace]:
    if query.fixture:
        return query.fixture, space_fixture(query.fixture)
    if query.space is not None:
        return "request", space_from_document(query.space)
    raise InputError("Provide a fixture name or a space document")


def _fibration(query: FibrationQuery) -> tuple[str, FibrationCheck]:
    if query.fixture:
        return query.fixture, FibrationCheck(fibration_fixture(query.fixture))
    if query.fibration is not None:
        return "request", fibration_from_document(query.fibration)
    raise InputError("Provide a fixture name or a fibration document")


def _verified(query: FibrationQuery) -> tuple[str, MetricFibrationData]:
    name, check = _fibration(query)
    if check.failure is not None:
        raise InputError(f"Not a metric fibration: {check.failure.message()}")
    assert check.fibration is not None
    return name, check.fibration


def _unprocessable(exc: Exception) -> HTTPException:
    logger.info("Rejected request: %s", exc)
    return HTTPException(status_code=422, detail=str(exc))


@router.post("/mh", response_model=MhRecord)
def magnitude_homology(query: SpaceQuery):
    try:
        name, space = _space(query)
        return run_mh(name, space, parse_length(query.l_max), query.n_max)
    except (InputError, ValidationError) as exc:
        raise _unprocessable(exc)


@router.post("/fibcheck", response_model=FibcheckRecord)
def fibration_check(query: FibrationQuery):
    try:
        name, check = _fibration(query)
        return run_fibcheck(name, check)
    except (InputError, ValidationError) as exc:
        raise _unprocessable(exc)


@router.post("/kunneth", response_model=KunnethRecord)
def kunneth(query: FibrationQuery):
    try:
        name, fib = _verified(query)
        return run_kunneth(name, fib, parse_length(query.l_max), query.n_max, query.basepoint, query.all_basepoints)
    except (InputError, ValidationError) as exc:
        raise _unprocessable(exc)


@router.post("/morse", response_model=MorseRecord)
def morse(query: FibrationQuery):
    try:
        name, fib = _verified(query)
        return run_morse(name, fib, parse_length(query.l_max))
    except (InputError, ValidationError) as exc:
        raise _unprocessable(exc)
    except MagfibError as exc:
        logger.error("Morse reduction failed: %s", exc)
        raise HTTPException(status_code=500, detail=str(exc))
