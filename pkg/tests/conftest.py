import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from structbandit.model import ThetaGrid, build_from_table

FIXTURE_DIR = Path(__file__).parent / "data" / "movielens_fixture"


@pytest.fixture
def staircase_model():
    """Two arms crossing on the grid {0,1,2,3}: means (0,1,2,3) and (3,2,1,0)."""
    grid = ThetaGrid(points=np.array([[0.0], [1.0], [2.0], [3.0]]))
    return build_from_table(grid, [[0.0, 1.0, 2.0, 3.0], [3.0, 2.0, 1.0, 0.0]], 1.0)
