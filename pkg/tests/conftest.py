import numpy as np
import pytest

from levdiag.linalg import DataMatrix


def make_data(values, names=None) -> DataMatrix:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if names is None:
        names = [f"x{j}" for j in range(values.shape[1])]
    return DataMatrix(values, tuple(names))


def random_data(seed, n, p, scale=1.0) -> DataMatrix:
    rng = np.random.default_rng(seed)
    return make_data(rng.standard_normal((n, p)) * scale)


@pytest.fixture
def line5():
    """Single regressor 1..5: D^2 = (2, 0.5, 0, 0.5, 2), h = (.6, .3, .2, .3, .6)."""
    return make_data([1.0, 2.0, 3.0, 4.0, 5.0])


@pytest.fixture
def square4():
    """Unit square corners: D^2 = 2 and h = 0.75 for every row."""
    return make_data([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def orth4():
    """Two exactly orthogonal centered columns with unit variance."""
    return make_data([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = set()
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::" in nodeid and getattr(rep, "when", "") == "call":
                rows.add((nodeid.split("::")[-1], status))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(rows):
            verdict = "PASS" if status == "passed" else "FAIL"
            terminalreporter.write_line(f"{verdict}  {name}")
