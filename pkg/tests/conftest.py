import pytest

from rapsim.models import CostWeights, ScenarioParams


@pytest.fixture
def weights() -> CostWeights:
    return CostWeights()


@pytest.fixture
def small_params() -> ScenarioParams:
    """A quick scenario: small store, few agents, three requests."""
    return ScenarioParams(
        map_width=12,
        map_height=8,
        aisle_spacing=4,
        num_humans=5,
        num_robots=4,
        radio_range=4.0,
        requests_per_scenario=3,
        humans_per_request=1,
        robots_per_request=1,
    )
