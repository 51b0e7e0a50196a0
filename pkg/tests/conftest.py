import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE: dict = {}


@pytest.fixture
def report():
    """Record one acceptance line: report(number, passed, detail)."""

    def _record(number: int, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
