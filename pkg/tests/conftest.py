import numpy as np
import pytest

from xorfilters import bench


@pytest.fixture
def rng():
    return np.random.default_rng(20191219)


@pytest.fixture(scope="session")
def million_keys():
    return bench.generate_keys(1_000_000, 11)


@pytest.fixture(scope="session")
def ten_million_absent(million_keys):
    return bench.absent_keys(million_keys, 10_000_000, 11)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome; the line is printed in the summary."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(name: str, passed: bool, detail: str) -> None:
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        assert passed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
