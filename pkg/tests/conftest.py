import numpy as np
import pytest

from uavcache.channel import EnvironmentParams
from uavcache.energy import DisplacementPlan, UavPlatform
from uavcache.presets import environment_names, load_environment

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def environments():
    return {name: load_environment(name) for name in environment_names()}


@pytest.fixture(scope="session")
def urban(environments):
    return environments["urban"]


@pytest.fixture(scope="session")
def suburban(environments):
    return environments["suburban"]


@pytest.fixture(scope="session")
def highrise(environments):
    return environments["high-rise"]


@pytest.fixture(scope="session")
def platform():
    return UavPlatform()


@pytest.fixture(scope="session")
def stay_plan():
    return DisplacementPlan.between(0.2, 0.2)


def mild_env(**overrides):
    """Environment with gentle shadowing, handy for Monte Carlo oracles."""
    base = dict(name="mild", phi=4.88, psi=0.43, alpha_los=2.09,
                alpha_nlos=4.0, k_los=1.424e-10, k_nlos=1.424e-10,
                mu_los_db=-0.5, mu_nlos_db=-10.0, a_los=2.0, c_los=0.01,
                a_nlos=4.0, c_nlos=0.01, w_los=10.0, w_nlos=2.0)
    base.update(overrides)
    return EnvironmentParams(**base)


@pytest.fixture(scope="session")
def gentle_env():
    return mild_env()


def sample_link_power(env, x_km, h_km, rng, n):
    """Monte Carlo draws of one link's received power (oracle path)."""
    from uavcache.channel import LinkState, _p_los, _path_gain, _shadow_std

    los = rng.random(n) < float(_p_los(env, x_km, h_km))
    shape = np.where(los, env.w_los, env.w_nlos)
    fading = rng.gamma(shape) / shape
    sigma = np.where(
        los, float(_shadow_std(env, x_km, h_km, LinkState.LOS)),
        float(_shadow_std(env, x_km, h_km, LinkState.NLOS)))
    mu = np.where(los, env.mu_los_db, env.mu_nlos_db)
    shadow = 10.0 ** ((mu + sigma * rng.standard_normal(n)) / 10.0)
    gain = np.where(los,
                    float(_path_gain(env, x_km, h_km, LinkState.LOS)),
                    float(_path_gain(env, x_km, h_km, LinkState.NLOS)))
    return gain * shadow * fading
