import sys
from decimal import Decimal
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cadex.assessment import ComponentId, DEFAULT_WEIGHTS, MarkSheet
from cadex.rules import default_ruleset


@pytest.fixture(scope="session")
def ruleset():
    return default_ruleset()


@pytest.fixture(scope="session")
def weights():
    return dict(DEFAULT_WEIGHTS)


def uniform_sheet(mark: str, cadet_id: str = "C001", cycle: str = "2026-1") -> MarkSheet:
    return MarkSheet(
        cadet_id=cadet_id,
        cycle=cycle,
        marks={c: Decimal(mark) for c in ComponentId},
    )


@pytest.fixture
def sheet85():
    return uniform_sheet("85.00")
