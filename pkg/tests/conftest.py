import json
import os
from pathlib import Path

import pytest

from primeweb.engine import PrimeIndexer

DATA = Path(__file__).parent / "data"

DEEP = os.environ.get("PRIMEWEB_DEEP") == "1"


@pytest.fixture(scope="session")
def engine():
    return PrimeIndexer()


@pytest.fixture(scope="session")
def appendix_rows():
    """Frozen reference matrix over the primes: generator -> ray values."""
    raw = json.loads((DATA / "reference_rows_p.json").read_text())
    return {int(g): vals for g, vals in raw["rows"].items()}


@pytest.fixture(scope="session")
def filter_matrices():
    """Frozen reference rows for the filtered-family matrices."""
    return json.loads((DATA / "reference_matrices_filters.json").read_text())
