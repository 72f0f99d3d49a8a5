import pytest

from pairnet.generators import lift_colocated
from pairnet.instance import MetricInstance


@pytest.fixture
def unit_triangle():
    return [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


@pytest.fixture
def lifted_triangle(unit_triangle):
    return lift_colocated(unit_triangle)


@pytest.fixture
def split_pairs():
    """Two pairs whose members sit on opposite sides of one heavy MST edge."""
    return MetricInstance.from_matrix(
        [
            [0, 10, 1, 10],
            [10, 0, 10, 1],
            [1, 10, 0, 10],
            [10, 1, 10, 0],
        ]
    )
