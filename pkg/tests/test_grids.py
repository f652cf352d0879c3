import numpy as np
import pytest

from gpops.errors import ParameterError
from gpops.grids import Grid


def test_uniform_grid():
    g = Grid.uniform_on(0.0, 1.0, 33)
    assert len(g) == 33
    assert g.uniform
    assert g.spacing == pytest.approx(1.0 / 32.0)


def test_single_point_grid_allowed():
    g = Grid([0.0])
    assert len(g) == 1
    assert not g.uniform
    with pytest.raises(ParameterError):
        _ = g.spacing


def test_nonuniform_detection():
    g = Grid([0.0, 1.0, 3.0])
    assert not g.uniform
    # spacing perturbed beyond 1e-12 relative is non-uniform
    h = 0.1
    g2 = Grid([0.0, h, 2 * h + h * 1e-10])
    assert not g2.uniform
    g3 = Grid([0.0, h, 2 * h + h * 1e-14])
    assert g3.uniform


@pytest.mark.parametrize("pts", [
    [],                     # empty
    [0.0, 0.0],             # not strictly increasing
    [1.0, 0.5],             # decreasing
    [0.0, np.nan],          # non-finite
    [0.0, np.inf],
])
def test_invalid_grids_rejected(pts):
    with pytest.raises(ParameterError):
        Grid(pts)


def test_points_are_read_only():
    g = Grid.uniform_on(0, 1, 5)
    with pytest.raises(ValueError):
        g.points[0] = 7.0
