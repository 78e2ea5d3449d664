"""Shared fixtures: the benchmark parameter sets and initial state."""

import pytest

from intraday.model import DAY, HOUR, JumpParams, MarketState, ModelParams

#: Canonical initial state used throughout the benchmarks.
D0, Y0, X0 = 50_000.0, 50.0, 0.0


@pytest.fixture(scope="session")
def sim_params():
    """Simulation benchmark parameters (eta = 100, regular impacts)."""
    return ModelParams(sigma0=1 / 60, sigma_d=1000 / 60, beta=0.002, eta=100.0,
                       mu=0.0, nu=4e-5, gamma=2.22, rho=0.8, horizon=24 * HOUR)


@pytest.fixture(scope="session")
def sim_params_eta200():
    """Simulation parameters with the stiffer imbalance penalty eta = 200."""
    return ModelParams(sigma0=1 / 60, sigma_d=1000 / 60, beta=0.002, eta=200.0,
                       mu=0.0, nu=4e-5, gamma=2.22, rho=0.8, horizon=24 * HOUR)


@pytest.fixture(scope="session")
def table_params():
    """Near-degenerate table parameters (nu = gamma = 1e-10, stiff regime)."""
    return ModelParams(sigma0=1 / 60, sigma_d=1000 / 60, beta=0.002, eta=200.0,
                       mu=0.0, nu=1e-10, gamma=1e-10, rho=0.8,
                       horizon=24 * HOUR)


@pytest.fixture(scope="session")
def jumps_positive():
    """All-positive jump component (p+ = 1)."""
    return JumpParams(lam=1.5 / DAY, p_plus=1.0, delta_plus=1500.0,
                      delta_minus=-1500.0, pi_plus=10.0, pi_minus=-10.0)


@pytest.fixture(scope="session")
def jumps_negative():
    """Negative-dominant jump component (p+ = 0.3)."""
    return JumpParams(lam=1.5 / DAY, p_plus=0.3, delta_plus=1500.0,
                      delta_minus=-1500.0, pi_plus=10.0, pi_minus=-10.0)


@pytest.fixture(scope="session")
def state0():
    """Benchmark initial state: X = 0, Y = 50, D = 50000 at t = 0."""
    return MarketState(t=0.0, x=X0, y=Y0, d=D0)
