import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def load_fixture_dict(name):
    return json.loads((FIXTURES / f"{name}.json").read_text())
