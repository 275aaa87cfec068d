from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return REPO_ROOT / "data"


@pytest.fixture(scope="session")
def configs_dir() -> Path:
    return REPO_ROOT / "configs"


@pytest.fixture(scope="session")
def eil76_path(data_dir: Path) -> Path:
    return data_dir / "eil76.tsp"


@pytest.fixture(scope="session")
def cities50_path(data_dir: Path) -> Path:
    return data_dir / "us_cities_50_2014.csv"
