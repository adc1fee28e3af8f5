import numpy as np
import pytest

from decoh.kinematics import collision_params, initial_state, post_collision_state


@pytest.fixture
def params_1_99():
    return collision_params(1.0, 99.0)


@pytest.fixture
def state_equal_spreads(params_1_99):
    """Sigma = sigma = 1, delta = 0.01, k = 0: the canonical unmatched state."""
    return post_collision_state(initial_state(1.0, 1.0, 0.0), params_1_99)


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)
