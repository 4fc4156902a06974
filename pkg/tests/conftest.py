import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import fixture_path  # noqa: E402
from idts.syntax import load  # noqa: E402


@pytest.fixture(scope="session")
def load_fixture():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load(fixture_path(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def types_sig(load_fixture):
    return load_fixture("types").sealed_signature()


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
