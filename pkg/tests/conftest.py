"""Shared lattice fixtures."""
import pytest

from tembed.lattices.manager import regular_lattices


def four_cycle_data() -> dict:
    """b1 (0,0) - w1 (1,0) - b2 (1,1) - w2 (0,1), rotations counterclockwise."""
    return {
        "black": ["b1", "b2"],
        "white": ["w1", "w2"],
        "edges": [
            {"b": "b1", "w": "w1", "x": 1.0},
            {"b": "b2", "w": "w1", "x": 1.0},
            {"b": "b2", "w": "w2", "x": 1.0},
            {"b": "b1", "w": "w2", "x": 1.0},
        ],
        "rotation": {"b1": [0, 3], "w1": [1, 0], "b2": [2, 1], "w2": [2, 3]},
        "v_out": "f(b1,w2,b2,w1)",
    }


@pytest.fixture
def four_cycle():
    return four_cycle_data()


@pytest.fixture(scope="session")
def square4():
    return regular_lattices("square", 4)


@pytest.fixture(scope="session")
def square6():
    return regular_lattices("square", 6)


@pytest.fixture(scope="session")
def honeycomb4():
    return regular_lattices("honeycomb", 4)


@pytest.fixture(scope="session")
def triangulation4():
    return regular_lattices("triangulation", 4, seed=5)
