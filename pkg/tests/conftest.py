import pytest
from hypothesis import settings as hypothesis_settings

from ezguide.scenario_io import load_bundled_scenario

# Property tests call into numerical kernels whose first invocation can be
# slow (imports, cache warmup); wall-clock deadlines add noise, not safety.
hypothesis_settings.register_profile("suite", deadline=None)
hypothesis_settings.load_profile("suite")
from ezguide.simulate import run_scenario


@pytest.fixture(scope="session")
def scenario1():
    return load_bundled_scenario("paper_scenario_1")


@pytest.fixture(scope="session")
def scenario2():
    return load_bundled_scenario("paper_scenario_2")


@pytest.fixture(scope="session")
def log1(scenario1):
    return run_scenario(scenario1)


@pytest.fixture(scope="session")
def log2(scenario2):
    return run_scenario(scenario2)
