import pytest

from nsflab.gas import GasParams, ThermoState, pressure
from nsflab.profiles import (CompositeWave, shock_profile_from_pattern,
                             solve_contact_wave)
from nsflab.riemann import build_pattern


@pytest.fixture(scope="session")
def gas():
    return GasParams(R=1.0, gamma=5.0 / 3.0, mu=1.0, kappa=1.0)


@pytest.fixture(scope="session")
def right_state():
    return ThermoState(1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def pattern(gas, right_state):
    return build_pattern(right_state, 0.1, 0.05, 0.1, gas)


@pytest.fixture(scope="session")
def shock1(gas, pattern):
    return shock_profile_from_pattern(pattern, 1, gas)


@pytest.fixture(scope="session")
def shock3(gas, pattern):
    return shock_profile_from_pattern(pattern, 3, gas)


@pytest.fixture(scope="session")
def contact(gas, pattern):
    return solve_contact_wave(pattern.mid_left.theta, pattern.mid_right.theta,
                              pressure(pattern.mid_left, gas),
                              pattern.mid_left.u, gas)


@pytest.fixture(scope="session")
def composite(gas, pattern, shock1, shock3, contact):
    return CompositeWave(pattern, shock1, shock3, contact, gas)
