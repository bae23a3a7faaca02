import numpy as np
import pytest

from framedecomp import Tolerances, VectorFamily

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def tol():
    return Tolerances()


def family(rows, **kw):
    return VectorFamily(len(rows[0]), np.asarray(rows, dtype=float), **kw)


def std_basis(d):
    return VectorFamily(d, np.eye(d))


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(name, ok, detail=""):
        lines.append((name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in lines:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
