import csv
from pathlib import Path

import pytest

from fuzzymaint.dataio import default_config, sample_path

DATA = Path(__file__).parent / "data"

# acceptance outcomes, filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def read_rows(name):
    with open(DATA / name, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def ref_scores():
    return read_rows("reference_scores.csv")


@pytest.fixture(scope="session")
def ref_labels():
    return read_rows("reference_labels.csv")


@pytest.fixture(scope="session")
def trainticket_csv():
    return Path(str(sample_path("trainticket.csv")))


@pytest.fixture(scope="session")
def labels_csv():
    return Path(str(sample_path("trainticket_labels.csv")))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        line = f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
