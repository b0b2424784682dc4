from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT / "src") not in sys.path:
    sys.path.insert(0, str(ROOT / "src"))

from cellgraph.fixture import build_hamster  # noqa: E402
from cellgraph.repo import Repository  # noqa: E402

FIXTURE_DIR = ROOT / "fixtures" / "hamster"


@pytest.fixture()
def hamster() -> Repository:
    """Fresh in-memory copy of the veterinary demo repository."""
    return build_hamster()


@pytest.fixture()
def fixture_dir() -> Path:
    """The committed on-disk copy of the demo repository (read-only)."""
    assert FIXTURE_DIR.is_dir(), "run: python -m cellgraph.fixture fixtures/hamster"
    return FIXTURE_DIR
