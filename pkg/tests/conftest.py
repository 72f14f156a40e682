import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from linf import build_space  # noqa: E402


@pytest.fixture
def odd_line():
    return build_space([], ["f"])


@pytest.fixture
def even_line():
    return build_space(["e"], [])


@pytest.fixture
def odd_plane():
    return build_space([], ["f1", "f2"])


@pytest.fixture
def mixed():
    return build_space(["e"], ["f"])


# one summary line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
