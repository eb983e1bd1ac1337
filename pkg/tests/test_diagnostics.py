import numpy as np
import pytest

from dnflow import (ConstantSchedule, Grid, Scenario, SinusoidSchedule,
                    Tridiagonal, advance, check_entropy_dissipation,
                    check_m_matrix, dissipation, dtau_energy_sum,
                    entropy_equivalence_constants, entropy_h, fit_decay_rate,
                    gas_model, relative_entropy)
from dnflow.diagnostics import CSV_COLUMNS, records_to_csv


# ---------------------------------------------------------------------------
# entropy and dissipation functionals
# ---------------------------------------------------------------------------

def test_entropy_linear_constant(heat):
    g = Grid(1.0, 10)
    c = 1.4
    assert entropy_h(g, heat, np.full(11, c)) == pytest.approx(c * c / 2, rel=1e-14)


def test_entropy_gas_constant(gas):
    g = Grid(1.0, 4)
    # beta(4) = 2 and eta(rho) = rho^3 / 3
    model = gas_model(u_max=4.0)
    assert entropy_h(g, model, np.full(5, 4.0)) == pytest.approx(8.0 / 3.0, rel=1e-14)


def test_entropy_mesh_independent_for_constants(gas):
    vals = [entropy_h(Grid(1.0, n), gas, np.full(n + 1, 1.7)) for n in (1, 5, 40)]
    assert np.allclose(vals, vals[0], rtol=1e-14)


def test_dissipation_examples(gas):
    g = Grid(1.0, 4)
    assert dissipation(g, gas, 1.0, np.full(5, 0.0)) == 0.0
    c = 1.2
    assert dissipation(g, gas, 2.0, np.full(5, c)) == pytest.approx(4 * c * c)
    # affine with slope 4 on a single cell: mu(4) * 4 + alpha * (0 + 16)
    g1 = Grid(1.0, 1)
    assert dissipation(g1, gas, 1.0, np.array([0.0, 4.0])) == pytest.approx(24.0)


def test_dissipation_nonnegative_random(gas):
    rng = np.random.default_rng(31)
    for _ in range(50):
        n = int(rng.integers(1, 20))
        g = Grid(float(rng.uniform(0.5, 2.0)), n)
        u = rng.uniform(-3, 3, size=n + 1)
        assert dissipation(g, gas, float(rng.uniform(0.1, 5.0)), u) >= 0.0


# ---------------------------------------------------------------------------
# relative entropy
# ---------------------------------------------------------------------------

def test_relative_entropy_zero_at_reference(gas):
    g = Grid(1.0, 8)
    u = np.linspace(0.8, 1.6, 9)
    assert relative_entropy(g, gas, u, u) == 0.0


def test_relative_entropy_linear_is_half_lumped_norm(heat):
    g = Grid(2.0, 6)
    rng = np.random.default_rng(2)
    u = rng.uniform(0.6, 1.9, size=7)
    v = rng.uniform(0.6, 1.9, size=7)
    expect = 0.5 * g.lumped_inner(u - v, u - v)
    assert relative_entropy(g, heat, u, v) == pytest.approx(expect, rel=1e-13)


def test_relative_entropy_positive_and_sandwiched(gas):
    g = Grid(1.0, 16)
    c1, c2 = entropy_equivalence_constants(gas)
    rng = np.random.default_rng(6)
    for _ in range(80):
        u = rng.uniform(0.5, 2.0, size=17)
        v = rng.uniform(0.5, 2.0, size=17)
        h = relative_entropy(g, gas, u, v)
        drho = gas.beta(u) - gas.beta(v)
        nrm = g.exact_l2_inner(drho, drho)
        assert h >= -1e-15
        assert c1 * nrm * (1 - 1e-10) <= h <= c2 * nrm * (1 + 1e-10)
        if not np.array_equal(u, v):
            assert h > 0.0


# ---------------------------------------------------------------------------
# entropy dissipation checks on trajectories
# ---------------------------------------------------------------------------

def test_constant_trajectory_slack_exactly_zero(gas):
    g = Grid(1.0, 8)
    sc = Scenario(g, gas, 1.3, 0.5, 0.05, np.full(9, 1.2),
                  ConstantSchedule(1.2, 1.2))
    traj = advance(sc)
    slack, slack_alt, tol = check_entropy_dissipation(traj, sc)
    assert np.all(slack == 0.0)
    assert np.all(slack_alt == 0.0)


def test_relaxation_slacks_within_tolerance(gas):
    g = Grid(1.0, 32)
    sc = Scenario(g, gas, 1.0, 2.0, 1e-2, np.ones(33), ConstantSchedule(1.0, 2.0))
    traj = advance(sc)
    slack, slack_alt, tol = check_entropy_dissipation(traj, sc)
    assert np.all(slack <= tol)
    assert np.all(slack_alt <= tol)
    # the two groupings are the same number up to rounding
    assert np.allclose(slack, slack_alt, atol=1e-10)


def test_time_varying_data_slacks(gas):
    g = Grid(1.0, 24)
    sched = SinusoidSchedule(1.0, 1.6, 0.05, 0.08, 1.5, 2.0)
    sc = Scenario(g, gas, 1.5, 2.0, 1e-2, np.linspace(1.0, 1.6, 25), sched)
    traj = advance(sc)
    slack, slack_alt, tol = check_entropy_dissipation(traj, sc)
    assert np.all(slack <= tol)
    assert np.all(slack_alt <= tol)


# ---------------------------------------------------------------------------
# M-matrix check
# ---------------------------------------------------------------------------

def test_check_m_matrix_hand_example():
    J = Tridiagonal(lower=np.array([-1.0, -1.0]),
                    diag=np.array([2.5, 3.0, 2.5]),
                    upper=np.array([-1.0, -1.0]))
    ok, row = check_m_matrix(J)
    assert ok and row is None


def test_check_m_matrix_positive_offdiagonal_detected():
    J = Tridiagonal(lower=np.array([-1.0, -1.0]),
                    diag=np.array([2.5, 3.0, 2.5]),
                    upper=np.array([-1.0, -1.0]))
    bad = J.copy()
    bad.upper[1] = +0.5
    ok, row = check_m_matrix(bad)
    assert not ok and row == 1


def test_check_m_matrix_identity_and_dense():
    ok, row = check_m_matrix(np.eye(5))
    assert ok and row is None
    dense = np.eye(3)
    dense[2, 2] = -1.0
    ok, row = check_m_matrix(dense)
    assert not ok and row == 2
    # negative row sum in the second row
    J = Tridiagonal(lower=np.array([-4.0]), diag=np.array([1.0, 1.0]),
                    upper=np.array([-0.5]))
    ok, row = check_m_matrix(J)
    assert not ok and row == 1


# ---------------------------------------------------------------------------
# decay fit and time-derivative energy
# ---------------------------------------------------------------------------

def test_fit_decay_exact_exponential():
    t = np.arange(0.0, 1.05, 0.1)
    rate, r2 = fit_decay_rate(t, np.exp(-3.0 * t))
    assert rate == pytest.approx(3.0, rel=1e-12)
    assert r2 >= 1.0 - 1e-12


def test_fit_decay_intercept_invariant():
    t = np.linspace(0.0, 4.0, 50)
    rate, r2 = fit_decay_rate(t, 5.0 * np.exp(-0.7 * t))
    assert rate == pytest.approx(0.7, rel=1e-12)
    assert r2 >= 1.0 - 1e-12


def test_fit_decay_burn_in_and_floor():
    t = np.linspace(0.0, 2.0, 21)
    v = np.exp(-2.0 * t)
    v[:3] = 1.0  # corrupt the early transient
    rate, _ = fit_decay_rate(t, v, burn_in=0.3)
    assert rate == pytest.approx(2.0, rel=1e-12)
    v2 = np.maximum(np.exp(-2.0 * t), 1e-3)  # rounding plateau
    rate2, _ = fit_decay_rate(t, v2, floor=2e-3)
    assert rate2 == pytest.approx(2.0, rel=1e-12)


def test_fit_decay_needs_three_points():
    with pytest.raises(ValueError):
        fit_decay_rate([0.0, 1.0], [1.0, 0.1])
    with pytest.raises(ValueError):
        fit_decay_rate([0.0, 1.0, 2.0], [1.0, 0.1, 0.01], floor=0.5)


def test_dtau_energy_sum_constant_and_ramp(gas):
    g = Grid(1.0, 8)
    sc = Scenario(g, gas, 1.0, 0.5, 0.05, np.full(9, 1.0),
                  ConstantSchedule(1.0, 1.0))
    traj = advance(sc)
    assert dtau_energy_sum(traj, g) == 0.0

    # synthetic linear-in-time ramp: u^k = u0 + k tau d
    class FakeTraj:
        pass

    tau = 0.1
    d = np.linspace(0.0, 1.0, 9)
    fake = FakeTraj()
    fake.times = np.arange(6) * tau
    fake.states = np.array([np.ones(9) + k * tau * d for k in range(6)])
    expect = 5 * tau * g.exact_l2_inner(d, d)
    assert dtau_energy_sum(fake, g) == pytest.approx(expect, rel=1e-12)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def test_records_csv_roundtrip(tmp_path, gas):
    g = Grid(1.0, 8)
    sc = Scenario(g, gas, 1.0, 0.1, 1e-2, np.ones(9), ConstantSchedule(1.0, 2.0))
    traj = advance(sc)
    path = tmp_path / "steps.csv"
    records_to_csv(traj.diagnostics, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == sc.n_steps + 1
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(sc.tau)
    assert int(first[-1]) == traj.diagnostics[0].newton_iterations
