import numpy as np
import pytest

from dnflow import (ConstantSchedule, ConstitutiveModel, Grid, PowerBeta,
                    Scenario, linear_model, newton_solve, steady_analytic,
                    steady_data_stability, steady_discrete)


def test_constant_data_gives_constant_state(gas):
    for c in (0.5, 1.3, 2.0):
        hat = steady_analytic(gas, 2.0, 1.5, c, c)
        assert hat.slope == 0.0
        assert hat.u_left == pytest.approx(c)
        num = steady_discrete(Grid(1.5, 6), gas, 2.0, c, c)
        assert np.allclose(num.nodal, c, atol=1e-12)


def test_analytic_linear_case(heat):
    # p = 2: 2 s + s = 1, so s = 1/3 and u_left = 1 + s
    hat = steady_analytic(heat, 1.0, 1.0, 1.0, 2.0)
    assert hat.slope == pytest.approx(1.0 / 3.0, rel=1e-13)
    assert hat.u_left == pytest.approx(4.0 / 3.0, rel=1e-13)
    assert hat.value(1.0) == pytest.approx(5.0 / 3.0, rel=1e-13)


def test_analytic_gas_closed_form(gas):
    # 2 sqrt(s) + s = 1 has root s = 3 - 2 sqrt(2)
    hat = steady_analytic(gas, 1.0, 1.0, 1.0, 2.0)
    assert hat.slope == pytest.approx(3.0 - 2.0 * np.sqrt(2.0), abs=1e-13)
    assert hat.u_left == pytest.approx(np.sqrt(2.0), abs=1e-13)


def test_discrete_matches_linear_nodal_values(heat):
    num = steady_discrete(Grid(1.0, 4), heat, 1.0, 1.0, 2.0)
    expect = np.array([4.0 / 3.0, 17.0 / 12.0, 3.0 / 2.0, 19.0 / 12.0, 5.0 / 3.0])
    assert np.allclose(num.nodal, expect, atol=1e-10)


def test_discrete_solution_is_affine(gas):
    num = steady_discrete(Grid(1.0, 16), gas, 1.0, 1.0, 2.0)
    slopes = np.diff(num.nodal) * 16
    assert np.max(slopes) - np.min(slopes) <= 1e-10


@pytest.mark.parametrize("p", [1.5, 2.0])
@pytest.mark.parametrize("cells", [1, 4, 16, 64])
def test_cross_validation_analytic_vs_discrete(p, cells):
    model = ConstitutiveModel(PowerBeta(1.0, 2.0), p, 0.5, 2.0)
    grid = Grid(1.0, cells)
    for alpha in (0.5, 1.0, 5.0):
        for ua, ub in ((0.5, 2.0), (1.0, 2.0), (2.0, 0.5), (1.3, 0.9)):
            hat = steady_analytic(model, alpha, 1.0, ua, ub, grid=grid)
            num = steady_discrete(grid, model, alpha, ua, ub)
            assert np.max(np.abs(hat.nodal - num.nodal)) <= 1e-8


def test_steady_state_is_stepper_fixed_point(gas):
    grid = Grid(1.0, 12)
    hat = steady_analytic(gas, 1.0, 1.0, 1.0, 2.0, grid=grid)
    sc = Scenario(grid, gas, 1.0, 1.0, 0.1, hat.nodal,
                  ConstantSchedule(1.0, 2.0))
    res = newton_solve(sc, hat.nodal, sc.tau)
    assert np.max(np.abs(res.state - hat.nodal)) <= 1e-10


def test_slope_bound_over_random_data(gas):
    rng = np.random.default_rng(17)
    for _ in range(100):
        alpha = float(rng.uniform(0.2, 10.0))
        length = float(rng.uniform(0.3, 4.0))
        ua, ub = rng.uniform(gas.u_min, gas.u_max, size=2)
        hat = steady_analytic(gas, alpha, length, float(ua), float(ub))
        bound = (gas.u_max - gas.u_min) / length
        assert abs(hat.slope) <= bound * (1 + 1e-12)
        lo, hi = sorted((ua, ub))
        samples = hat.u_left + hat.slope * np.linspace(0, length, 9)
        assert np.all(samples >= lo - 1e-12) and np.all(samples <= hi + 1e-12)


def test_data_stability_identical_data(gas):
    grid = Grid(1.0, 8)
    b, d = steady_data_stability(gas, 1.0, 1.0, grid, (1.0, 2.0), (1.0, 2.0))
    assert b == 0.0 and d == 0.0


def test_data_stability_linear_perturbation():
    model = linear_model(u_max=2.5)
    grid = Grid(1.0, 16)
    delta = 0.01
    b, d = steady_data_stability(model, 1.0, 1.0, grid, (1.0, 2.0),
                                 (1.0, 2.0 + delta))
    data_gap = delta ** 2
    assert b <= data_gap * (1 + 1e-12)
    assert d <= (2.0 / 3.0) * 1.0 * data_gap * (1 + 1e-12)
    # closed form: both steady values shift by delta/3 at x=0, 2 delta/3 at x=1
    assert b == pytest.approx((delta / 3) ** 2 + (2 * delta / 3) ** 2, rel=1e-10)


@pytest.mark.parametrize("p", [1.4, 1.5, 2.0])
def test_data_stability_random_sweep(p):
    model = ConstitutiveModel(PowerBeta(1.0, 2.0), p, 0.5, 2.0)
    rng = np.random.default_rng(23)
    grid = Grid(1.0, 12)
    for _ in range(60):
        alpha = float(rng.uniform(0.3, 6.0))
        pa = tuple(rng.uniform(0.5, 2.0, size=2))
        pb = tuple(rng.uniform(0.5, 2.0, size=2))
        b, d = steady_data_stability(model, alpha, 1.0, grid, pa, pb)
        gap = (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2
        assert b <= gap * (1 + 1e-10) + 1e-14
        assert d <= (2.0 / 3.0) * 1.0 * gap * (1 + 1e-10) + 1e-14


def test_inadmissible_data_rejected(gas):
    with pytest.raises(ValueError):
        steady_analytic(gas, 1.0, 1.0, 0.1, 1.0)
    with pytest.raises(ValueError):
        steady_discrete(Grid(1.0, 4), gas, 1.0, 1.0, 3.0)
    with pytest.raises(ValueError):
        steady_analytic(gas, -1.0, 1.0, 1.0, 1.5)
