import numpy as np
import pytest

from gateforge.compiler import clear_net_cache
from gateforge.gatesets import lps_generators


@pytest.fixture(scope="session")
def lps():
    return lps_generators()


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


@pytest.fixture(autouse=True)
def _fresh_net_cache():
    # Keep in-memory net reuse from leaking between tests that tweak
    # tolerances; disk caching is opt-in and not exercised implicitly.
    clear_net_cache()
    yield
    clear_net_cache()
