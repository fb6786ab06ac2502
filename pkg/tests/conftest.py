import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from gencontact.casebook import reduced_system
from gencontact.determining import paper_scope
from gencontact.expr import parse_poly

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"
GOLDEN = Path(__file__).resolve().parent / "golden"


def P(text, scope=None):
    return parse_poly(text, scope)


@pytest.fixture
def golden():
    """Compare text against tests/golden/NAME; UPDATE_GOLDEN=1 rewrites it."""
    def check(name, text):
        path = GOLDEN / name
        if os.environ.get("UPDATE_GOLDEN"):
            path.parent.mkdir(exist_ok=True)
            path.write_text(text)
        assert path.exists(), f"missing golden file {name}; run with UPDATE_GOLDEN=1"
        assert text == path.read_text()
    return check


@pytest.fixture(scope="session")
def general_system():
    s = paper_scope()
    return reduced_system(parse_poly("alpha", s), parse_poly("beta", s))


@pytest.fixture(scope="session")
def free_system():
    return reduced_system(P("0"), P("0"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
