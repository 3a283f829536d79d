import numpy as np
import pytest

from isingpulse import (
    ChainSpec,
    ControlPulse,
    Delay,
    HardPulse,
    PulseSequence,
    ShapedInterval,
    compare_methods,
    conventional_cascade,
    expectation_profile,
    fidelity,
    inept_cascade,
    integrate_step4,
    soliton_preparation,
    soliton_propagation_step,
    matrix_of,
    multiple_spin_order,
    pair_encoding,
    product_term,
    propagate,
    render_comparison,
    single_spin,
    soliton_midstep,
    soliton_operator,
    transfer_basis,
    verify_commuting_split,
)
from isingpulse.dynamics import reduced_sequence_replay
from isingpulse.sequences import geodesic_order_sequence
from tests.conftest import SQ2, TAU2

HALF_PI = np.pi / 2


class TestBasics:
    def test_free_evolution_two_spins(self):
        seq = PulseSequence(ChainSpec(2), (Delay(HALF_PI),))
        res = propagate(seq, single_spin(1, "x"))
        assert res.fidelity_to(product_term((1, "y"), (2, "z"))) == pytest.approx(1.0, abs=1e-12)

    def test_identity_sequence(self):
        seq = PulseSequence(ChainSpec(3), ())
        res = propagate(seq, single_spin(1, "x"))
        assert res.fidelity_to(single_spin(1, "x")) == pytest.approx(1.0)
        assert res.norm_drift < 1e-12

    def test_fidelity_pairs(self):
        chain = ChainSpec(3)
        x = single_spin(1, "x")
        assert fidelity(matrix_of(x, chain), x, chain) == pytest.approx(1.0)
        assert fidelity(matrix_of(x, chain), single_spin(1, "y"), chain) == pytest.approx(0.0)

    def test_fidelity_zero_operator(self):
        chain = ChainSpec(2)
        with pytest.raises(ValueError):
            fidelity(np.zeros((4, 4)), single_spin(1, "x"), chain)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            propagate(PulseSequence(ChainSpec(13), ()), single_spin(1, "x"))

    def test_non_finite_pulse_rejected(self):
        pulse = ControlPulse(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        object.__setattr__(pulse, "values", np.array([1.0, np.nan]))
        seq = PulseSequence(ChainSpec(2), (ShapedInterval(pulse, (2,)),))
        with pytest.raises(ValueError):
            propagate(seq, single_spin(1, "x"))


class TestConventionalCascade:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_full_transfer(self, n):
        res = propagate(conventional_cascade(n), single_spin(1, "x"))
        assert res.fidelity_to(multiple_spin_order(n)) == pytest.approx(1.0, abs=1e-9)
        assert res.norm_drift < 1e-8

    def test_local_rotation_to_all_z_order(self):
        # the cascade output maps onto the all-z order under one hard rotation
        n = 4
        seq = conventional_cascade(n)
        rot = PulseSequence(
            seq.chain,
            seq.elements + (HardPulse(tuple(range(1, n)), "x", HALF_PI),),
        )
        res = propagate(rot, single_spin(1, "x"))
        all_z = product_term(*[(m, "z") for m in range(1, n + 1)])
        assert abs(res.fidelity_to(all_z)) == pytest.approx(1.0, abs=1e-9)

    def test_expectation_peaks_sequential(self):
        n = 4
        basis = transfer_basis(n)
        times, vals = expectation_profile(conventional_cascade(n), single_spin(1, "x"), basis)
        peak_times = [times[np.argmax(vals[:, j])] for j in (0, 1, 3, 5)]
        assert all(a < b for a, b in zip(peak_times, peak_times[1:]))
        assert np.max(vals[:, 5]) == pytest.approx(1.0, abs=1e-9)


class TestHardPulseLimit:
    def test_finite_amplitude_limit(self):
        # a hard rotation is the infinite-amplitude limit of a shaped drive
        # with the coupling still on
        n, angle, amp = 3, HALF_PI, 1e3
        chain = ChainSpec(n)
        hard = PulseSequence(chain, (HardPulse((2,), "y", angle),))
        shaped = PulseSequence(
            chain,
            (ShapedInterval(ControlPulse.constant(amp, angle / amp).resample(64), (2,)),),
        )
        initial = product_term((1, "y"), (2, "z"))
        a = propagate(hard, initial).final_matrix
        b = propagate(shaped, initial).final_matrix
        assert np.max(np.abs(a - b)) < 1e-3


class TestShapedIntervals:
    def test_opening_pulse_window_values(self, solutions):
        # constant opening pulse on spin 2 of a 4-chain: the window
        # coordinates land exactly where the reduced model says
        first = solutions["first"]
        seq = PulseSequence(
            ChainSpec(4),
            (ShapedInterval(first.pulse.resample(1001), (2,)),),
        )
        basis = transfer_basis(4)[:4]
        res = propagate(seq, single_spin(1, "x"), basis=basis)
        th = first.theta_end
        expected = [0.0, SQ2 * np.cos(th), SQ2 * np.sin(th), SQ2]
        assert np.allclose(res.expectations[-1], expected, atol=1e-3)
        # the far-window coordinate x4 reaches 1/sqrt(2)
        assert res.expectations[-1][3] == pytest.approx(SQ2, abs=1e-3)

    def test_slice_refinement_converges(self, solutions):
        mid = solutions["intermediate"]
        chain = ChainSpec(4)
        start = float(SQ2) * (product_term((1, "y"), (2, "x")) + product_term((1, "y"), (2, "y"), (3, "z")))
        target = float(SQ2) * (
            product_term((1, "y"), (2, "y"), (3, "x"))
            + product_term((1, "y"), (2, "y"), (3, "y"), (4, "z"))
        )
        fids = []
        for samples in (501, 1001):
            seq = PulseSequence(chain, (ShapedInterval(mid.pulse.resample(samples), (3,)),))
            fids.append(propagate(seq, start).fidelity_to(target))
        assert abs(fids[1] - fids[0]) < 1e-6
        assert fids[1] == pytest.approx(1.0, abs=1e-6)

    def test_reduced_vs_full_window_profile(self, solutions):
        # full-chain expectations of the window coordinates track the
        # four-state integration within 1e-3 throughout the interval
        mid = solutions["intermediate"]
        chain = ChainSpec(4)
        seq = PulseSequence(chain, (ShapedInterval(mid.pulse.resample(1001), (3,)),))
        basis = transfer_basis(4)[2:6]
        start = float(SQ2) * (product_term((1, "y"), (2, "x")) + product_term((1, "y"), (2, "y"), (3, "z")))
        times, vals = expectation_profile(seq, start, basis)
        reduced = integrate_step4([SQ2, SQ2, 0.0, 0.0], mid.pulse, dt=1e-4)
        interp = np.stack(
            [np.interp(times, reduced.times, reduced.states[:, j]) for j in range(4)],
            axis=1,
        )
        assert np.max(np.abs(vals - interp)) < 1e-3

    def test_basis_norm_is_conserved(self, solutions):
        # the transfer coordinates span the reachable set: sum of squares = 1
        n = 5
        seq = geodesic_order_sequence(n, solutions, pulse_samples=501)
        times, vals = expectation_profile(seq, single_spin(1, "x"), transfer_basis(n))
        total = np.sum(vals**2, axis=1)
        assert np.max(np.abs(total - 1.0)) < 1e-6


class TestReducedReplay:
    @staticmethod
    def _compare(seq, n, dt, tol):
        # both series duplicate timestamps at hard-pulse instants (before and
        # after the jump); compare at the first occurrence of each time
        traj = reduced_sequence_replay(seq, dt=dt)
        times, vals = expectation_profile(seq, single_spin(1, "x"), transfer_basis(n))
        keep_full = np.r_[True, np.diff(times) > 0]
        keep_red = np.r_[True, np.diff(traj.times) > 0]
        t_red, x_red = traj.times[keep_red], traj.states[keep_red]
        interp = np.stack(
            [np.interp(times[keep_full], t_red, x_red[:, j]) for j in range(2 * n - 2)],
            axis=1,
        )
        assert np.max(np.abs(vals[keep_full] - interp)) < tol
        return traj

    def test_conventional_cascade_path(self):
        # hard-pulse limits in the ladder reproduce the cascade expectation path
        self._compare(conventional_cascade(4), 4, dt=1e-3, tol=1e-6)

    def test_geodesic_sequence_path(self, solutions):
        n = 5
        seq = geodesic_order_sequence(n, solutions, pulse_samples=1001)
        traj = self._compare(seq, n, dt=1e-4, tol=1e-3)
        assert traj.final[-1] == pytest.approx(1.0, abs=1e-6)


class TestHamiltonianBuild:
    def test_hermitian_at_every_sample(self):
        from isingpulse.simulator import control_generator, coupling_diagonal

        chain = ChainSpec(5)
        diag = coupling_diagonal(chain)
        assert np.allclose(diag.imag if np.iscomplexobj(diag) else 0.0, 0.0)
        G = control_generator(chain, (2, 4))
        for u in np.linspace(-2.0, 2.0, 5):
            H = np.diag(diag) + u * G
            assert np.allclose(H, H.conj().T)

    def test_decoupling_removes_bonds(self):
        from isingpulse.simulator import coupling_diagonal

        chain = ChainSpec(4)
        full = coupling_diagonal(chain)
        cut = coupling_diagonal(chain, frozenset({2}))
        only_bond34 = coupling_diagonal(ChainSpec(2))
        # with spin 2 decoupled only the (3,4) bond survives
        assert np.allclose(cut, np.kron(np.ones(4), only_bond34))
        assert not np.allclose(full, cut)


class TestCommutingSplit:
    def test_exact_zero(self):
        worst = verify_commuting_split(1, ChainSpec(6), np.linspace(0.0, 2.0, 7))
        assert worst == 0.0

    def test_free_case(self):
        assert verify_commuting_split(1, ChainSpec(6), [0.0]) == 0.0

    def test_negative_control(self):
        # perturbing one half with an extra transverse term breaks commutation
        from isingpulse.simulator import control_generator, split_hamiltonians

        chain = ChainSpec(6)
        Ha, Hb = split_hamiltonians(1, chain, 0.9)
        Hb_bad = Hb + control_generator(chain, (3,), "x")
        assert np.linalg.norm(Ha @ Hb_bad - Hb_bad @ Ha) > 0.1

    def test_bounds(self):
        with pytest.raises(ValueError):
            verify_commuting_split(3, ChainSpec(6), [0.5])


class TestIneptTransfers:
    def test_single_step(self):
        chain = ChainSpec(4)
        step = PulseSequence(chain, (HardPulse((1, 2), "y", HALF_PI), Delay(HALF_PI)))
        res = propagate(step, product_term((1, "x"), (2, "z")))
        assert res.fidelity_to(product_term((2, "x"), (3, "z"))) == pytest.approx(1.0, abs=1e-9)

    def test_rotation_sign(self):
        chain = ChainSpec(4)
        rot = PulseSequence(chain, (HardPulse((1, 2), "y", HALF_PI),))
        res = propagate(rot, product_term((1, "x"), (2, "z")))
        assert res.fidelity_to(product_term((1, "z"), (2, "x"))) == pytest.approx(-1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_end_to_end(self, n):
        res = propagate(inept_cascade(n), single_spin(1, "x"))
        assert res.fidelity_to(single_spin(n, "x")) == pytest.approx(1.0, abs=1e-9)


class TestSolitonMachinery:
    def test_preparation(self):
        res = propagate(soliton_preparation(6), single_spin(1, "x"))
        assert res.fidelity_to(soliton_operator(1)) == pytest.approx(1.0, abs=1e-9)

    def test_preparation_checkpoint(self):
        # after the first quarter-period split: equal weights 1/sqrt(2) on the
        # three-spin x operator and the four-spin order
        seq = soliton_preparation(6)
        partial = PulseSequence(seq.chain, seq.elements[:5])
        res = propagate(partial, single_spin(1, "x"))
        chain = seq.chain
        c1 = fidelity(res.final_matrix, product_term((1, "y"), (2, "y"), (3, "x")), chain)
        c2 = fidelity(
            res.final_matrix, product_term((1, "y"), (2, "y"), (3, "y"), (4, "z")), chain
        )
        assert c1 == pytest.approx(SQ2, abs=1e-9)
        assert c2 == pytest.approx(SQ2, abs=1e-9)

    def test_advance_step(self, intermediate_solution):
        seq = soliton_propagation_step(1, intermediate_solution, 6)
        res = propagate(seq, soliton_operator(1))
        assert res.fidelity_to(soliton_operator(2)) > 0.999999
        assert seq.total_duration == pytest.approx(TAU2, abs=1e-9)

    def test_outer_half_reaches_midstep(self, intermediate_solution):
        # under the outer half alone the soliton lands on the half-advanced sum
        from isingpulse.simulator import split_hamiltonians

        chain = ChainSpec(6)
        pulse = intermediate_solution.pulse.resample(1001)
        rho = matrix_of(soliton_operator(1), chain)
        for i in range(len(pulse.times) - 1):
            h = pulse.times[i + 1] - pulse.times[i]
            u = 0.5 * (pulse.values[i] + pulse.values[i + 1])
            Ha, _ = split_hamiltonians(1, chain, float(u))
            w, V = np.linalg.eigh(Ha)
            U = (V * np.exp(-1j * w * h)) @ V.conj().T
            rho = U @ rho @ U.conj().T
        assert fidelity(rho, soliton_midstep(1), chain) > 0.999999

    def test_pair_encoding_both_registers(self, intermediate_solution):
        seq = pair_encoding(intermediate_solution, 7, pulse_samples=501)
        fy = propagate(seq, single_spin(1, "y")).fidelity_to(soliton_operator(1))
        fx = propagate(seq, single_spin(1, "x")).fidelity_to(soliton_operator(3))
        assert fy > 0.99999
        assert fx > 0.99999

    def test_pair_encoding_window_checkpoint(self, intermediate_solution):
        # the parked register crosses the first advance as a clean window
        # transfer (up to the global sign fixed by the preparation phases)
        chain = ChainSpec(6)
        h1 = PulseSequence(
            chain, (ShapedInterval(intermediate_solution.pulse.resample(1001), (2, 4)),)
        )
        start = float(SQ2) * (single_spin(1, "y") - product_term((1, "x"), (2, "z")))
        target = float(-SQ2) * (
            product_term((1, "x"), (2, "x")) + product_term((1, "x"), (2, "y"), (3, "z"))
        )
        res = propagate(h1, start)
        assert res.fidelity_to(target) == pytest.approx(1.0, abs=1e-6)


class TestComparison:
    def test_report_content(self, solutions):
        rep = compare_methods(4, solutions)
        assert rep["coherence_transfer"]["step_ratio"] == pytest.approx(0.808, abs=2e-3)
        assert rep["order_creation"]["conventional"]["duration"] == pytest.approx(3 * HALF_PI)
        assert rep["order_creation"]["conventional"]["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert rep["order_creation"]["shaped"]["fidelity"] > 0.999
        text = render_comparison(rep)
        assert "order creation" in text and "0.808" in text
