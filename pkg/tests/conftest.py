import pytest

from quickest_selection import build_tables, size_focused_dp
from quickest_selection.kernels import BACKENDS


@pytest.fixture(scope="session")
def table_small():
    return build_tables(200)


@pytest.fixture(scope="session")
def table_10k():
    return build_tables(10_000)


@pytest.fixture(scope="session")
def dp_100():
    return size_focused_dp(100, 10_000)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """``record(number, passed, detail)``: log one acceptance-criterion verdict."""
    results = request.config.stash[_ACCEPTANCE]

    def record(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d}: {detail}"
        results[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
