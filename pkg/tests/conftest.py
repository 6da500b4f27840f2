import numpy as np
import pytest

from hmmident.casestudy import ssh_multi, ssh_single

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ssh():
    return ssh_single(0.1)


@pytest.fixture(scope="session")
def ssh_het():
    return ssh_multi((0.05, 0.1))


@pytest.fixture
def record():
    """Log one acceptance criterion outcome for the terminal summary."""
    def _record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        return bool(passed)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
