from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data" / "jhu"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def fixture_csv() -> Path:
    return FIXTURES / "two_countries_confirmed.csv"
