import json
from pathlib import Path

import pytest

from radius import read_survey

FIXTURES = Path(__file__).parent / "fixtures"

# criterion id -> (description, passed); filled by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture
def golden_path():
    return FIXTURES / "golden_questions.json"


@pytest.fixture
def golden(golden_path):
    with open(golden_path, "rb") as fh:
        return read_survey(fh)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0].lstrip("AC"))):
        desc, ok = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {desc}")
