import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from varsig import GaussianBelief  # noqa: E402


@pytest.fixture
def std_normal():
    return GaussianBelief(0.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
