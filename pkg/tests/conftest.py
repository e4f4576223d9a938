import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evosum import GeneratorConfig, football_pack, generate_synthetic
from evosum.pack import fixture_path

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pack():
    return football_pack()


@pytest.fixture(scope="session")
def onto(pack):
    return pack.ontology


@pytest.fixture(scope="session")
def registry(pack):
    return pack.registry


@pytest.fixture(scope="session")
def noiseless(pack):
    return generate_synthetic(GeneratorConfig(seed=7), pack.registry, pack.ontology)


@pytest.fixture(scope="session")
def nalitzis_manifest():
    return fixture_path("nalitzis") / "manifest.json"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
