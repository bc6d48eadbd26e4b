import json
from pathlib import Path

import pytest

GOLDEN_PATH = Path(__file__).parent / "golden" / "golden_values.json"


@pytest.fixture(scope="session")
def golden():
    """Frozen build-time reference values (regenerate with scripts/generate_golden.py)."""
    return json.loads(GOLDEN_PATH.read_text(encoding="utf-8"))
