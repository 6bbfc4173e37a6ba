"""Pytest configuration file."""

import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent.resolve()
sys.path.insert(0, str(project_root))

from src.core.fixtures import FIXTURE_DIR
from src.core.quasigroup import CayleyTable, cyclic_group, validate


def pytest_configure(config):
    """Configure pytest."""
    config.addinivalue_line("markers", "integration: mark test as integration test")
    config.addinivalue_line("markers", "unit: mark test as unit test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


# Published tables, 0-based, as printed.
GRID_F7 = [[1, 2, 0], [0, 1, 2], [2, 0, 1]]
GRID_F9 = [[1, 0, 2], [0, 2, 1], [2, 1, 0]]
GRID_F19 = [[1, 0, 2], [2, 1, 0], [0, 2, 1]]
GRID_F38 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]
GRID_F41 = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 3, 5, 2, 4],
    [2, 5, 0, 4, 1, 3],
    [3, 4, 1, 0, 5, 2],
    [4, 3, 5, 2, 0, 1],
    [5, 2, 4, 1, 3, 0],
]


@pytest.fixture
def z3() -> CayleyTable:
    return cyclic_group(3)


@pytest.fixture
def f7_table() -> CayleyTable:
    return validate(GRID_F7)


@pytest.fixture
def f9_table() -> CayleyTable:
    return validate(GRID_F9)


@pytest.fixture
def f19_table() -> CayleyTable:
    return validate(GRID_F19)


@pytest.fixture
def f38_table() -> CayleyTable:
    return validate(GRID_F38)


@pytest.fixture
def f41_table() -> CayleyTable:
    return validate(GRID_F41)


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture
def temp_workspace(tmp_path):
    """Create a temporary workspace with a logs directory."""
    workspace = tmp_path / "workspace"
    workspace.mkdir()
    (workspace / "logs").mkdir()
    return workspace
