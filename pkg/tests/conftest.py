import pytest

from bangbang_rabi.control import SearchConfig, SearchResult, pga_search
from bangbang_rabi.physics import ModelParams


@pytest.fixture
def default_params() -> ModelParams:
    """omega_a = omega_c = 1, g = 0.1, n_max = 60."""
    return ModelParams()


@pytest.fixture
def small_params() -> ModelParams:
    return ModelParams(n_max=30)


@pytest.fixture
def small_cfg(small_params: ModelParams) -> SearchConfig:
    """L = 10 pulses with a 16-wide beam; cheap enough for every unit test."""
    return SearchConfig(total_time=2.0, dt=0.2, beam_exponent=4, params=small_params)


@pytest.fixture(scope="session")
def default_pga_result() -> SearchResult:
    """PGA at T = 15, dt = 0.2, N = 12 under the switch-off protocol."""
    return pga_search(SearchConfig())
