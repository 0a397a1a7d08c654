import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Thread-spawning tests make per-example deadlines meaningless.
settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(0xB10C)
