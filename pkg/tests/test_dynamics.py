import numpy as np
import pytest
from scipy.linalg import expm

from isingpulse import (
    ControlPulse,
    chain_rhs,
    from_polar,
    integrate,
    integrate_chain,
    integrate_polar,
    integrate_step4,
    r_rhs,
    step4_rhs,
    to_polar,
    u_from_theta,
)
from tests.conftest import F1, F2, SQ2, U1


def chain_generator(controls):
    """Dense skew generator of the ladder flow, the matrix-exponential oracle."""
    d = 2 * len(controls) + 2
    c = np.empty(d - 1)
    c[0::2] = 1.0
    c[1::2] = controls
    A = np.zeros((d, d))
    for j in range(d - 1):
        A[j, j + 1] = -c[j]
        A[j + 1, j] = c[j]
    return A


class TestRhs:
    def test_chain_free_flow_direction(self):
        x = np.zeros(8)
        x[0] = 1.0
        dx = chain_rhs(x, [0.0, 0.0, 0.0])
        expected = np.zeros(8)
        expected[1] = 1.0
        assert np.allclose(dx, expected)

    def test_chain_dimension_mismatch(self):
        with pytest.raises(ValueError):
            chain_rhs(np.zeros(8), [0.0, 0.0])
        with pytest.raises(ValueError):
            chain_rhs(np.zeros(5), [0.0])

    def test_chain_matches_generator(self):
        rng = np.random.default_rng(2)
        u = rng.normal(size=3)
        x = rng.normal(size=8)
        assert np.allclose(chain_rhs(x, u), chain_generator(u) @ x)

    def test_step4(self):
        x = np.array([0.1, 0.2, 0.3, 0.4])
        u = 0.7
        assert np.allclose(
            step4_rhs(x, u),
            [-0.2, 0.1 - u * 0.3, u * 0.2 - 0.4, 0.3],
        )

    def test_r_rhs_axes(self):
        r = np.array([1.0, 0.5, -0.3])
        d0 = r_rhs(r, 0.0)
        assert d0[2] == pytest.approx(0.0)  # theta=0: pure (r1,r2) rotation
        d90 = r_rhs(r, np.pi / 2)
        assert d90[0] == pytest.approx(0.0)  # theta=pi/2: pure (r2,r3) rotation


class TestPolarMap:
    def test_pole(self):
        r = to_polar([1.0, 0.0, 0.0, 0.0])
        assert (r.r1, r.r2, r.r3) == (1.0, 0.0, 0.0)
        assert r.theta == 0.0 and not r.theta_defined

    def test_theta_zero(self):
        r = to_polar([SQ2, SQ2, 0.0, 0.0])
        assert r.theta == pytest.approx(0.0)
        assert r.r2 == pytest.approx(SQ2)

    def test_theta_right_angle(self):
        r = to_polar([0.0, 0.0, SQ2, SQ2])
        assert r.theta == pytest.approx(np.pi / 2)
        assert (r.r2, r.r3) == (pytest.approx(SQ2), pytest.approx(SQ2))

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            x = rng.normal(size=4)
            x /= np.linalg.norm(x)
            if np.hypot(x[1], x[2]) < 1e-6:
                continue
            assert np.allclose(from_polar(to_polar(x)), x)


class TestIntegrate:
    def test_quarter_turn(self):
        traj = integrate(step4_rhs, 0.0, [1.0, 0, 0, 0], np.pi / 2, dt=1e-3)
        assert np.linalg.norm(traj.final - [0, 1, 0, 0]) < 1e-8

    def test_order_four_convergence(self):
        x0 = np.array([1.0, 0, 0, 0])
        ref = integrate(step4_rhs, U1, x0, 1.5, dt=1e-4 / 4).final
        e_coarse = np.linalg.norm(integrate(step4_rhs, U1, x0, 1.5, dt=2e-3).final - ref)
        e_fine = np.linalg.norm(integrate(step4_rhs, U1, x0, 1.5, dt=1e-3).final - ref)
        assert 10 < e_coarse / e_fine < 24  # ~16 for a 4th-order scheme

    def test_chain_free_evolution_against_expm(self):
        # n=5 ladder, all controls zero, quarter period
        d = 8
        x0 = np.zeros(d)
        x0[0] = 1.0
        oracle = expm(chain_generator([0.0, 0.0, 0.0]) * np.pi / 2) @ x0
        traj = integrate_chain(x0, 0, None, duration=np.pi / 2, dt=1e-3)
        assert np.allclose(traj.final, oracle, atol=1e-9)
        assert traj.final[1] == pytest.approx(1.0, abs=1e-9)

    def test_chain_driven_against_expm(self):
        d = 8
        x0 = np.zeros(d)
        x0[0] = 1.0
        u = 0.83
        oracle = expm(chain_generator([0.0, u, 0.0]) * 1.1) @ x0
        pulse = ControlPulse.constant(u, 1.1)
        traj = integrate_chain(x0, 2, pulse, dt=1e-3)
        assert np.allclose(traj.final, oracle, atol=1e-9)

    def test_norm_conserved(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            u = float(rng.uniform(0, 2))
            traj = integrate(step4_rhs, u, [1.0, 0, 0, 0], 3.0, dt=1e-3)
            assert traj.norm_drift() < 1e-9

    def test_non_finite_detection(self):
        blower = lambda x, c: np.full_like(x, np.nan)
        with pytest.raises(FloatingPointError):
            integrate(blower, None, [1.0, 0, 0, 0], 1.0, dt=0.5)

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            integrate(step4_rhs, 0.0, [1.0, 0, 0, 0], 1.0, dt=0.0)


class TestPolarCartesianConsistency:
    @pytest.mark.parametrize("f,start4", [(F2, [SQ2, SQ2, 0.0, 0.0]), (0.7, [SQ2, SQ2, 0.0, 0.0])])
    def test_cross_integration(self, f, start4):
        """Polar flow under theta = f t matches the polar image of the
        four-state flow under the control recovered by u_from_theta."""
        duration = 1.2
        polar = integrate_polar([start4[0], np.hypot(start4[1], start4[2]), start4[3]],
                                f, duration, dt=1e-4)
        pulse = u_from_theta(polar, f)
        cart = integrate_step4(start4, pulse, dt=1e-4)
        r_from_cart = np.stack(
            [cart.states[:, 0],
             np.hypot(cart.states[:, 1], cart.states[:, 2]),
             cart.states[:, 3]],
            axis=1,
        )
        step = max(1, len(polar.times) // 200)
        assert np.max(np.abs(r_from_cart[::step] - polar.states[::step])) < 1e-6


class TestUFromTheta:
    def test_closed_form_against_finite_differences(self):
        """The recovered control must satisfy u = d(theta)/dt + (x1 x3 + x2 x4)/r2^2
        with theta = atan2(x3, x2) along any window trajectory."""
        pulse = ControlPulse(np.linspace(0, 1.5, 400),
                             1.0 + 0.4 * np.sin(np.linspace(0, 3.0, 400)))
        traj = integrate_step4([SQ2, SQ2, 0.0, 0.0], pulse, dt=5e-4)
        x1, x2, x3, x4 = traj.states.T
        theta = np.unwrap(np.arctan2(x3, x2))
        theta_dot = np.gradient(theta, traj.times)
        u_closed = theta_dot + (x1 * x3 + x2 * x4) / (x2**2 + x3**2)
        u_applied = pulse(traj.times)
        core = slice(20, -20)
        assert np.max(np.abs(u_closed[core] - u_applied[core])) < 1e-3

    def test_interior_start_value(self, intermediate_solution):
        # no singular layer at an interior start: u(0) equals the angle rate
        pulse = intermediate_solution.pulse
        assert pulse.values[0] == pytest.approx(F2, abs=1e-9)
        assert pulse.values[-1] == pytest.approx(F2, abs=1e-6)

    def test_pole_start_limit(self, first_solution):
        # opening step: 0/0 at the pole resolves to twice the angle rate
        pulse = first_solution.pulse
        assert pulse.values[0] == pytest.approx(2 * F1, abs=1e-6)

    def test_pure_pair_rotation(self):
        # with x3 = x4 = 0 the second term vanishes and u is the angle rate
        x = np.array([0.6, 0.8, 0.0, 0.0])
        assert (x[0] * x[2] + x[1] * x[3]) / (x[1] ** 2 + x[2] ** 2) == 0.0


class TestControlPulse:
    def test_validation(self):
        with pytest.raises(ValueError):
            ControlPulse(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            ControlPulse(np.array([0.0, 1.0]), np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            ControlPulse(np.array([0.0]), np.array([1.0]))

    def test_interpolation_and_duration(self):
        p = ControlPulse(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 0.0]))
        assert p.duration == 2.0
        assert p(0.5) == pytest.approx(1.0)

    def test_resample_and_reverse(self):
        p = ControlPulse(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 1.0]))
        r = p.resample(5)
        assert len(r.times) == 5 and r.duration == p.duration
        rev = p.reversed()
        assert rev(0.0) == pytest.approx(1.0) and rev(2.0) == pytest.approx(0.0)

    def test_is_constant(self):
        p = ControlPulse.constant(1.3, 2.0)
        assert p.is_constant()
        q = ControlPulse(np.array([0.0, 1.0, 2.0]), np.array([1.0, 1.1, 1.0]))
        assert not q.is_constant()

    def test_csv_round_trip(self, tmp_path):
        p = ControlPulse(np.linspace(0, 1, 11), np.linspace(1, 2, 11))
        path = tmp_path / "pulse.csv"
        p.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(data[:, 0], p.times)
        assert np.allclose(data[:, 1], p.values)
