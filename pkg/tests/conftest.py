"""
Shared fixtures for the test suite.
"""

from pathlib import Path

import pytest

from linfty import fixtures

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def dgla_1():
    return fixtures.fix_dgla_1()


@pytest.fixture
def massey():
    return fixtures.fix_massey()


@pytest.fixture
def kah_2():
    """(package, dgla, hats) of the two-class Kähler fixture."""
    return fixtures.fix_kah_2_setup()


@pytest.fixture
def torus():
    return fixtures.torus_setup()
