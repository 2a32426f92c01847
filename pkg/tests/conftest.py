from __future__ import annotations

from pathlib import Path

import pytest

from agilegate.catalog import load_seed_catalog

ROOT = Path(__file__).resolve().parents[1]
SCENARIO = ROOT / "scenarios" / "critical-systems"
GOLDEN = Path(__file__).parent / "golden"

CRITICAL_CHARACTERISTICS = frozenset({"high-product-complexity", "long-development-period", "large-application"})
CRITICAL_QUALITIES = frozenset({"safety", "reliability", "maintainability"})


@pytest.fixture(scope="session")
def seed():
    return load_seed_catalog()


@pytest.fixture
def scenario() -> Path:
    return SCENARIO
