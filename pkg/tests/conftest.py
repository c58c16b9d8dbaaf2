import numpy as np
import pytest

from symqaoa.simulator import QaoaParams

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def random_params(rng: np.random.Generator, p: int) -> QaoaParams:
    return QaoaParams(tuple(rng.uniform(-np.pi, np.pi, p)), tuple(rng.uniform(-np.pi, np.pi, p)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
