from __future__ import annotations

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from magfib.fixtures import fibration_fixture  # noqa: E402


@pytest.fixture(scope="session")
def e1():
    """C4 × I3 over C4, points 1..12."""
    return fibration_fixture("paper-E1")


@pytest.fixture(scope="session")
def e2():
    """Six points a..f over K3 with fibers {a,d}, {b,e}, {c,f}."""
    return fibration_fixture("paper-E2")


@pytest.fixture
def pts():
    def convert(space, *labels):
        return tuple(space.index_of(str(label)) for label in labels)

    return convert
