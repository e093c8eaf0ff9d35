import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from noveltyplan.pddl import load_files

DATA = Path(__file__).resolve().parents[1] / "src" / "noveltyplan" / "data" / "mini"
GOLDEN = Path(__file__).parent / "golden"


def fixture_paths(domain: str, problem: str) -> tuple[Path, Path]:
    return DATA / domain / "domain.pddl", DATA / domain / f"{problem}.pddl"


def load_fixture(domain: str, problem: str):
    return load_files(*fixture_paths(domain, problem))


@pytest.fixture(scope="session")
def chain():
    return load_fixture("chain", "p01")


@pytest.fixture(scope="session")
def gripper2():
    return load_fixture("gripper", "p02")


@pytest.fixture(scope="session")
def twochains():
    return load_fixture("twochains", "p01")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[num])
