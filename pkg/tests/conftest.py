import pytest

from meshsense.config import DecisionVars, Scenario, load_config
from meshsense.nodemodel import McuProfile
from meshsense.protocol import RadioConfig
from meshsense.region import RegionConfig, generate_field


@pytest.fixture(scope="session")
def default_config():
    return load_config()


@pytest.fixture
def radio():
    return RadioConfig()


@pytest.fixture
def profile():
    return McuProfile(name="test-mcu", voltage_v=3.3, tx_current_a=0.0134, rx_current_a=0.0054)


@pytest.fixture
def flat_field():
    """Constant 20 C field over a 40 m region: accuracy equals coverage."""
    return generate_field(
        RegionConfig(side_m=40, temp_min_c=20, temp_max_c=20, max_adjacent_delta_c=0, seed=1)
    )


@pytest.fixture
def desk_scenario():
    return Scenario(name="desk", side_m=100.0, n_nodes=16, placement="uniform")


@pytest.fixture
def least_interacted():
    return DecisionVars(sharing_frequency=2, resend_threshold=5, strategy="least-interacted")
