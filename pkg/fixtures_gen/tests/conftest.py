import pytest

from oracle_helpers import FIXDIR


@pytest.fixture(scope="session")
def fixdir():
    assert FIXDIR.is_dir(), "committed fixtures missing"
    return FIXDIR
