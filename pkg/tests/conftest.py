from __future__ import annotations

from pathlib import Path

import pytest

from helpers import chain_network

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def chain():
    """Validated chain network plus its injection list."""
    return chain_network()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
