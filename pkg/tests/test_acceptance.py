"""Acceptance criteria; one PASS/FAIL line per criterion appears in the terminal summary."""
import pytest

from conftest import ACCEPTANCE_LINES
from parity_distill.verification import CHECKS, run_check


@pytest.mark.parametrize("number", [n for n, _, _ in CHECKS], ids=[f"{n:02d}-{name}" for n, name, _ in CHECKS])
def test_acceptance(number):
    result = run_check(number)
    print(result.line())
    ACCEPTANCE_LINES[number] = result.line()
    assert result.passed, result.line()
