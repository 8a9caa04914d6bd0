import os

import pytest
from hypothesis import HealthCheck, settings

from latticerel.system import cutset_system, load_system

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SYS5_CUTSETS = [[1], [2, 3], [3, 4], [2, 4, 5]]
SYS5_LOLP = 0.11791


@pytest.fixture
def sys5():
    return cutset_system("sys5", SYS5_CUTSETS, [0.1] * 5)


@pytest.fixture
def test3():
    return load_system("test3")


ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
