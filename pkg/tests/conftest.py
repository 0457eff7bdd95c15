import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent

sys.path.insert(0, str(Path(__file__).parent))  # make oracle/nethelpers importable


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def mb_corpus(repo_root: Path) -> Path:
    return repo_root / "examples" / "monkey_banana"


@pytest.fixture(scope="session")
def bmi_corpus(repo_root: Path) -> Path:
    return repo_root / "examples" / "bmi"


def pytest_runtest_logreport(report):
    # one visible verdict line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\n[ACCEPTANCE] {'PASS' if report.passed else 'FAIL'}: {name}")
