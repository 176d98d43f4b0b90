import pytest

from plopt import resolve_irrelevance
from plopt.assessment import load_assessment
from plopt.catalog import load_catalog
from plopt.data import case_study_path
from plopt.quality_model import load_model


@pytest.fixture(scope="session")
def model():
    return load_model(case_study_path("model"))


@pytest.fixture(scope="session")
def matrix():
    return load_assessment(case_study_path("assessment"))


@pytest.fixture(scope="session")
def resolved(model, matrix):
    return resolve_irrelevance(model, matrix)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(case_study_path("catalog"))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
