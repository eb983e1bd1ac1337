import numpy as np
import pytest

from dnflow import ConstantSchedule, Grid, Scenario, gas_model, linear_model


@pytest.fixture
def gas():
    """Pipe-flow model: beta(u) = sqrt(u), p = 3/2, data range [0.5, 2]."""
    return gas_model()


@pytest.fixture
def heat():
    """Linear beta with p = 2: the plain heat equation."""
    return linear_model()


@pytest.fixture
def unit_grid16():
    return Grid(1.0, 16)


def make_scenario(model, cells=16, length=1.0, alpha=1.0, horizon=1.0,
                  tau=1e-2, u0=None, schedule=None):
    grid = Grid(length, cells)
    if u0 is None:
        u0 = np.ones(cells + 1)
    if schedule is None:
        schedule = ConstantSchedule(1.0, 2.0)
    return Scenario(grid, model, alpha, horizon, tau, u0, schedule)


@pytest.fixture
def scenario_factory():
    return make_scenario
