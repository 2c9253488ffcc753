import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zkquotient.exact_algebra import QQ, ZZ, CoefficientRing  # noqa: E402

F2 = CoefficientRing.prime_field(2)
F3 = CoefficientRing.prime_field(3)
F5 = CoefficientRing.prime_field(5)
ALL_RINGS = [ZZ, QQ, F2, F3]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=ALL_RINGS, ids=str)
def ring(request):
    return request.param


@pytest.fixture(params=[QQ, F2, F3], ids=str)
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
