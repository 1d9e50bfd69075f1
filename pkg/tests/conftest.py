import pytest

from shimtril.lmfdb import FixtureSource


@pytest.fixture(scope="session")
def source():
    return FixtureSource()
