"""
Shared fixtures for the cechtool test suite.
"""

import os
import sys

import pytest

# Add the repository root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.config import get_config  # noqa: E402
from core.covers import Cover, CoverTower, circle_arc_cover  # noqa: E402
from core.exact_abelian import FpGroup  # noqa: E402
from core.simplicial import (SimplicialPair, boundary_complex, full_simplex,  # noqa: E402
                             sphere_model, torus_7)

CORPUS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Every test starts from the default configuration and no env overrides."""
    for variable in ("CECHTOOL_BUDGET", "CECHTOOL_SUBDIVISION_BUDGET", "CECHTOOL_ML_CAP",
                     "CECHTOOL_FACE_BUDGET", "CECHTOOL_SEED"):
        monkeypatch.delenv(variable, raising=False)
    get_config().reset()
    yield
    get_config().reset()


@pytest.fixture
def integers():
    return FpGroup.free(1)


@pytest.fixture
def torus():
    return torus_7()


@pytest.fixture
def circle():
    """The boundary of the triangle, which is also sphere_model(1)."""
    return sphere_model(1)


@pytest.fixture
def disk_pair():
    return SimplicialPair(full_simplex(2), boundary_complex((0, 1, 2)))


@pytest.fixture
def circle_cover():
    return circle_arc_cover(6, 3)


@pytest.fixture
def three_point_tower():
    """Singleton cover of three points exhausted one point at a time."""
    cover = Cover.from_members([{0}, {1}, {2}])
    return CoverTower.constant(cover, 1, exhaustion=[{0}, {0, 1}, {0, 1, 2}])


@pytest.fixture
def corpus_dir():
    return CORPUS_DIR
