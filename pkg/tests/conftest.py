import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from bdz import _accel


@pytest.fixture(params=[True, False], ids=["numba", "numpy"])
def both_paths(request):
    if request.param and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    prev = _accel.use_numba(request.param)
    yield request.param
    _accel.use_numba(prev)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
