import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from esnlab.dynsys import (
    LorenzParams,
    LorenzState,
    ScalarSeries,
    birkhoff_average,
    logistic_orbit,
    lorenz_rhs,
    lorenz_trajectory,
    observe,
    rk4_step,
    rotation_orbit,
)

P = LorenzParams()
GOLDEN = (math.sqrt(5) - 1) / 2


def c_plus(p=P):
    r = math.sqrt(p.beta * (p.rho - 1))
    return LorenzState(r, r, p.rho - 1)


def integrate(s, tau, n, p=P):
    for _ in range(n):
        s = rk4_step(s, p, tau)
    return np.array(s)


def test_params_validated():
    with pytest.raises(ValueError):
        LorenzParams(sigma=0.0)
    with pytest.raises(ValueError):
        LorenzParams(beta=float("nan"))


def test_rhs_fixed_points():
    assert lorenz_rhs((0, 0, 0), P) == (0.0, 0.0, 0.0)
    np.testing.assert_allclose(lorenz_rhs(c_plus(), P), 0.0, atol=1e-13)


def test_rhs_hand_values():
    # sigma*(2-1), 1*(28-3)-2, 1*2 - (8/3)*3
    np.testing.assert_allclose(lorenz_rhs((1, 2, 3), P), (10.0, 23.0, -6.0), rtol=1e-15)


def test_rhs_rejects_non_finite():
    with pytest.raises(ValueError):
        lorenz_rhs((np.inf, 0, 0), P)


def test_rk4_zero_step_and_equilibrium():
    s = LorenzState(0.0, 1.0, 1.05)
    assert rk4_step(s, P, 0.0) == s
    np.testing.assert_allclose(rk4_step(c_plus(), P, 0.37), c_plus(), rtol=0, atol=1e-13)


def test_rk4_negative_tau_rejected():
    with pytest.raises(ValueError):
        rk4_step((0, 1, 1.05), P, -0.01)


def test_rk4_overflow():
    with pytest.raises(OverflowError):
        rk4_step((1e200, 1e200, 1e200), P, 0.01)


def test_rk4_step_vs_tiny_step_oracle():
    s = (0.0, 1.0, 1.05)
    oracle = integrate(s, 1e-5, 1000)
    err = np.abs(np.array(rk4_step(s, P, 0.01)) - oracle).max()
    # Measured 1.6e-6: local error is O(tau^5) with large constants near the origin.
    assert err < 5e-6
    # Two half steps each carry 1/32 of the local error: ~16x overall.
    err_half = np.abs(integrate(s, 0.005, 2) - oracle).max()
    assert 12 < err / err_half < 20


def test_rk4_matches_high_order_solver():
    sol = scipy.integrate.solve_ivp(lambda t, y: lorenz_rhs(y, P), (0, 1), (0, 1, 1.05),
                                    method="DOP853", rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(integrate((0, 1, 1.05), 1e-3, 1000), sol.y[:, -1], atol=1e-7)


def test_rk4_fourth_order_on_attractor():
    traj = lorenz_trajectory(n=3000)
    in_band = 0
    for k in range(500, 3000, 250):
        s = traj[k]
        ref = integrate(s, 1e-4, 10_000)
        ratio = np.linalg.norm(integrate(s, 0.01, 100) - ref) / np.linalg.norm(integrate(s, 0.005, 200) - ref)
        in_band += 12 <= ratio <= 20
    assert in_band >= 8


def test_trajectory_basic_contract():
    s0 = (0.0, 1.0, 1.05)
    assert lorenz_trajectory(s0, P, 0, 0.01).tolist() == [list(s0)]
    two = lorenz_trajectory(s0, P, 2, 0.01)
    assert two.shape == (3, 3)
    assert tuple(two[2]) == rk4_step(rk4_step(s0, P, 0.01), P, 0.01)


def test_trajectory_attractor_extent():
    traj = lorenz_trajectory((0, 1.0, 1.05), P, 4000, 0.01)
    assert traj.shape == (4001, 3)
    assert traj[:, 0].min() >= -20 and traj[:, 0].max() <= 20
    assert traj[:, 2].min() >= 0 and traj[:, 2].max() <= 50


def test_trajectory_deterministic():
    a = lorenz_trajectory(n=500)
    b = lorenz_trajectory(n=500)
    assert a.tobytes() == b.tobytes()


def test_observe():
    traj = lorenz_trajectory(n=50)
    xi, zeta = observe(traj, "xi", 0.01), observe(traj, "zeta", 0.01)
    assert xi.dt == 0.01 and len(xi) == 51
    for k in (0, 7, 50):
        assert xi[k] == traj[k, 0] and zeta[k] == traj[k, 2]
    single = observe(traj[:1], "xi", 0.01)
    assert len(single) == 1
    with pytest.raises(ValueError):
        observe(traj, "w", 0.01)


def test_scalar_series_validation():
    with pytest.raises(ValueError):
        ScalarSeries([1.0], 0.0)
    with pytest.raises(ValueError):
        ScalarSeries([1.0, np.nan], 0.1)


def test_rotation_orbit():
    assert np.all(rotation_orbit(0.3, 0.0, 5) == 0.3)
    assert rotation_orbit(0.0, 0.5, 4).tolist() == [0.0, 0.5, 0.0, 0.5]
    orbit = rotation_orbit(0.1, GOLDEN, 10)
    x, expected = 0.1, []
    for _ in range(10):
        expected.append(x)
        x = (x + GOLDEN) % 1.0
    assert orbit.tolist() == expected


def test_logistic_orbit_basics():
    assert np.all(logistic_orbit(0.75, 100) == 0.75)
    assert logistic_orbit(0.2, 2)[1] == pytest.approx(0.64, abs=1e-15)
    with pytest.raises(ValueError):
        logistic_orbit(0.5, 3)


def test_logistic_mean_matches_invariant_density():
    # Space average of x under dx / (pi sqrt(x(1-x))) by quadrature.
    space_avg = scipy.integrate.quad(lambda x: x, 0, 1, weight="alg", wvar=(-0.5, -0.5))[0] / math.pi
    assert space_avg == pytest.approx(0.5, abs=1e-12)
    assert abs(logistic_orbit(0.123, 10**4).mean() - space_avg) < 0.02


def test_birkhoff_average_examples():
    assert birkhoff_average(rotation_orbit(0.2, GOLDEN, 100), lambda x: np.full_like(x, 3.5)) == 3.5
    assert birkhoff_average([0.0, 1.0]) == 0.5
    orbit = rotation_orbit(0.0, GOLDEN, 10**5)
    assert abs(birkhoff_average(orbit, lambda x: np.sin(2 * np.pi * x))) <= 1e-3
    with pytest.raises(ValueError):
        birkhoff_average([])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50),
       st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50))
def test_birkhoff_concatenation_is_weighted_mean(a, b):
    whole = birkhoff_average(a + b)
    weighted = (len(a) * birkhoff_average(a) + len(b) * birkhoff_average(b)) / (len(a) + len(b))
    assert whole == pytest.approx(weighted, rel=1e-9, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6).filter(lambda x: x != 0.5))
def test_logistic_stays_in_unit_interval(x0):
    orbit = logistic_orbit(x0, 2000)
    assert np.all((orbit >= 0) & (orbit <= 1))
