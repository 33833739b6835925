from pathlib import Path

import pytest

from cubebot.coords import Tables


TABLE_CACHE = Path(__file__).parent / ".table_cache"


@pytest.fixture(scope="session")
def tables() -> Tables:
    """Coordinate tables, built once per machine and cached next to the tests."""
    return Tables.load(TABLE_CACHE)
