import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (A + A.conj().T)


def random_vector(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


# --- acceptance summary -------------------------------------------------------
import time as _time

ACCEPTANCE_LINES: dict = {}
SUITE_BUDGET_S = 15 * 60
_start = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Remember (and print) the verdict line of one acceptance criterion."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_sessionstart(session):
    _start["t"] = _time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    elapsed = _time.perf_counter() - _start.get("t", _time.perf_counter())
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
    ok = elapsed <= SUITE_BUDGET_S
    terminalreporter.write_line(
        f"criterion 9 (suite runtime): {'PASS' if ok else 'FAIL'} - whole session took "
        f"{elapsed:.0f} s, budget {SUITE_BUDGET_S} s")
