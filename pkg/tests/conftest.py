import pytest

from pathart.expr import parse_condition
from pathart.grid import parse_domain, partition

FOO_TEXT = "(y <= 8*sin(0.2*x+7)+4) && (y <= sqrt(x)+8) && (x <= 16-y)"
FOO_DOMAIN = "x:int:0..15;y:int:0..15"

# nine valid cells of the 4x4 foo grid that every good search should find
CORE_VALID = ["D_2", "D_3", "D_4", "D_6", "D_7", "D_8", "D_11", "D_12", "D_16"]

_acceptance_lines = []


@pytest.fixture
def foo_pc():
    return parse_condition(FOO_TEXT)


@pytest.fixture
def foo_box():
    return parse_domain(FOO_DOMAIN)


@pytest.fixture
def foo_grid(foo_box):
    return partition(foo_box, 4)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, title, ok, detail)``."""

    def record(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {number}: {title} {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
