import os
from pathlib import Path

import numpy as np
import pytest

from heartml.dataset import (
    HEADERED_CSV,
    bundled_cleveland_path,
    from_arrays,
    load_cleveland,
    load_dataset,
)

# Optional: the binarized 303-row "heart.csv" variant. Not redistributed here.
HEART_CSV_ENV = "HEARTML_HEART_CSV"
DEFAULT_HEART_CSV = Path(__file__).parent / "data" / "heart.csv"


def headered_variant_path():
    p = os.environ.get(HEART_CSV_ENV)
    if p:
        return Path(p)
    return DEFAULT_HEART_CSV if DEFAULT_HEART_CSV.is_file() else None


@pytest.fixture(scope="session")
def cleveland():
    return load_cleveland()


@pytest.fixture(scope="session")
def cleveland_path():
    return bundled_cleveland_path()


@pytest.fixture(scope="session")
def heart_dataset():
    """The headered 303-row variant when available, else the bundled UCI rows."""
    p = headered_variant_path()
    if p is not None:
        return load_dataset(p, HEADERED_CSV)
    return load_cleveland()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_dataset(gen, n=40, separable=False):
    X = gen.normal(size=(n, 13))
    if separable:
        y = (X[:, 0] > 0).astype(int)
    else:
        y = gen.integers(0, 2, size=n)
        y[:2] = [0, 1]
    return from_arrays(X, y)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
