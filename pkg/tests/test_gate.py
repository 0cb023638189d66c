"""Gate assembly, fidelity scoring, and the two-photon reduction helpers."""

import json
import math

import numpy as np
import pytest

from rydswap.dynamics import BlockadeModel, IntegratorConfig
from rydswap.gate import (
    OPPOSITE_SWAP,
    STANDARD_SWAP,
    assemble_gate_matrix,
    decay_estimate,
    evaluate_gate,
    fidelity,
    target_matrix,
    two_photon_reduce,
    two_photon_split,
)
from rydswap.presets import preset_lookup
from rydswap.waveform import FourierSeries, fourier_eval


def random_unitary(rng, n=4):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestTargets:
    def test_kind_strings(self):
        m, kind = target_matrix("standard")
        assert kind == "standard"
        np.testing.assert_array_equal(m, STANDARD_SWAP)
        m, kind = target_matrix("opposite")
        assert kind == "opposite"
        np.testing.assert_array_equal(m, OPPOSITE_SWAP)

    def test_custom_matrix_passthrough(self):
        u = np.eye(4, dtype=complex)
        m, kind = target_matrix(u)
        assert kind == "custom"
        np.testing.assert_array_equal(m, u)

    def test_rejects_unknowns(self):
        with pytest.raises(ValueError):
            target_matrix("swapish")
        with pytest.raises(ValueError):
            target_matrix(np.eye(3))

    def test_swap_matrices_are_permutations(self):
        np.testing.assert_array_equal(STANDARD_SWAP @ STANDARD_SWAP, np.eye(4))
        np.testing.assert_array_equal(OPPOSITE_SWAP @ OPPOSITE_SWAP, np.eye(4))
        assert STANDARD_SWAP[1, 2] == 1 and STANDARD_SWAP[0, 0] == 1
        assert OPPOSITE_SWAP[0, 3] == 1 and OPPOSITE_SWAP[1, 1] == 1


class TestAssembly:
    def test_standard_swap_from_channels(self):
        # singlet picks up a pi phase, triplet returns where it started
        U = assemble_gate_matrix(-1.0, np.eye(3))
        np.testing.assert_allclose(U, STANDARD_SWAP, atol=1e-15)

    def test_opposite_swap_from_channels(self):
        T = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
        U = assemble_gate_matrix(1.0, T)
        np.testing.assert_allclose(U, OPPOSITE_SWAP, atol=1e-15)

    def test_block_placement(self):
        T = np.arange(9, dtype=complex).reshape(3, 3)
        s = 0.5j
        U = assemble_gate_matrix(s, T)
        r2 = math.sqrt(2.0)
        assert U[0, 0] == T[0, 0]
        assert U[0, 3] == T[0, 2]
        assert U[3, 0] == T[2, 0]
        assert U[0, 1] == U[0, 2] == T[0, 1] / r2
        assert U[1, 0] == U[2, 0] == T[1, 0] / r2
        assert U[1, 1] == U[2, 2] == (T[1, 1] + s) / 2
        assert U[1, 2] == U[2, 1] == (T[1, 1] - s) / 2

    def test_rejects_wrong_block_shape(self):
        with pytest.raises(ValueError):
            assemble_gate_matrix(1.0, np.eye(4))


class TestFidelity:
    def test_self_fidelity_is_one(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            u = random_unitary(rng)
            assert fidelity(u, u) == pytest.approx(1.0, abs=1e-12)

    def test_identity_vs_swap(self):
        assert fidelity(np.eye(4), STANDARD_SWAP) == pytest.approx(0.4, abs=1e-12)

    def test_diagonal_sign_vs_swap(self):
        d = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
        assert fidelity(d, STANDARD_SWAP) == pytest.approx(0.2, abs=1e-12)

    def test_zero_map_scores_zero(self):
        assert fidelity(np.zeros((4, 4)), STANDARD_SWAP) == pytest.approx(0.0, abs=1e-15)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(1)
        u = random_unitary(rng)
        for theta in (0.3, 1.7, -2.2):
            f0 = fidelity(u, STANDARD_SWAP)
            f1 = fidelity(np.exp(1j * theta) * u, STANDARD_SWAP)
            assert f1 == pytest.approx(f0, abs=1e-12)


@pytest.fixture(scope="module")
def fig3_outcome():
    ws, bm, target = preset_lookup("fig3_amplitude_offres")
    return evaluate_gate(ws, bm, target=target)


class TestEvaluateGate:
    def test_preset_reaches_published_error(self, fig3_outcome):
        assert fig3_outcome.gate_error < 5e-4
        assert fig3_outcome.fidelity == pytest.approx(1.0 - fig3_outcome.gate_error)
        assert fig3_outcome.target_kind == "standard"

    def test_map_is_nearly_swap(self, fig3_outcome):
        U = fig3_outcome.actual_map
        assert U.shape == (4, 4)
        phase = U[1, 2] / abs(U[1, 2])
        np.testing.assert_allclose(U / phase, STANDARD_SWAP, atol=0.05)

    def test_bookkeeping(self, fig3_outcome):
        o = fig3_outcome
        assert o.tau == pytest.approx(0.25)
        assert o.norm_drift < 1e-9
        assert o.column_norms.shape == (4,)
        assert np.all(o.column_norms <= 1.0 + 1e-9)
        assert o.leakage == pytest.approx(1.0 - np.mean(o.column_norms**2), abs=1e-12)
        assert 0.0 < o.integrated_rydberg_population < o.tau

    def test_auto_resolves_target(self):
        ws, bm, _ = preset_lookup("fig3_amplitude_offres")
        out = evaluate_gate(ws, bm, target="auto", cfg=IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10))
        assert out.target_kind == "standard"
        assert out.gate_error < 1e-3

    def test_to_dict_serializes(self, fig3_outcome):
        d = fig3_outcome.to_dict()
        blob = json.loads(json.dumps(d))
        assert blob["target"] == "standard"
        assert blob["gate_error"] == pytest.approx(fig3_outcome.gate_error)
        assert np.asarray(blob["actual_map"]).shape == (4, 4, 2)


class TestDecay:
    def test_estimates(self, fig3_outcome):
        gamma = 1.0 / 540.0
        d = decay_estimate(fig3_outcome, gamma)
        assert d.coarse == pytest.approx(0.5 * gamma * 0.25, rel=1e-12)
        assert d.integrated == pytest.approx(
            gamma * fig3_outcome.integrated_rydberg_population, rel=1e-12
        )
        # averaged population never exceeds one, so the integrated estimate
        # is bounded by gamma * tau
        assert 0.0 < d.integrated < gamma * 0.25

    def test_rejects_negative_rate(self, fig3_outcome):
        with pytest.raises(ValueError):
            decay_estimate(fig3_outcome, -0.1)


class TestTwoPhoton:
    def setup_method(self):
        self.tau = 0.25
        self.a = FourierSeries(np.array([120.0, -30.0, 8.0], dtype=complex), self.tau)
        self.b = FourierSeries(np.array([150.0, 12.0, -20.0, 5.0], dtype=complex), self.tau)
        self.delta_e = 2 * math.pi * 1.0e4  # rad/us

    def test_effective_profile_matches_pointwise_product(self):
        res = two_photon_reduce(self.a, self.b, self.delta_e)
        t = np.linspace(0.0, self.tau, 777)
        want = fourier_eval(self.a, t) * fourier_eval(self.b, t) / (2 * self.delta_e)
        np.testing.assert_allclose(fourier_eval(res.omega_eff, t), want, atol=1e-10)

    def test_light_shifts(self):
        res = two_photon_reduce(self.a, self.b, self.delta_e)
        t = np.linspace(0.0, self.tau, 777)
        np.testing.assert_allclose(
            fourier_eval(res.shift_a, t),
            fourier_eval(self.a, t) ** 2 / (4 * self.delta_e),
            atol=1e-10,
        )
        np.testing.assert_allclose(
            fourier_eval(res.shift_b, t),
            fourier_eval(self.b, t) ** 2 / (4 * self.delta_e),
            atol=1e-10,
        )

    def test_resonant_intermediate_rejected(self):
        with pytest.raises(ValueError):
            two_photon_reduce(self.a, self.b, 0.0)

    def test_mismatched_periods_rejected(self):
        other = FourierSeries(np.array([100.0], dtype=complex), 0.5)
        with pytest.raises(ValueError):
            two_photon_reduce(self.a, other, self.delta_e)

    def test_marginal_detuning_warns(self):
        with pytest.warns(UserWarning, match="marginal"):
            two_photon_reduce(self.a, self.b, 2 * math.pi * 200.0)

    def test_split_round_trips_exactly(self):
        eff = FourierSeries(np.array([66.0, -20.0 + 3.0j, 5.0], dtype=complex), self.tau)
        leg_a, leg_b = two_photon_split(eff, self.delta_e, 2 * math.pi * 800.0)
        assert fourier_eval(leg_a, 0.11) == pytest.approx(2 * math.pi * 800.0)
        back = two_photon_reduce(leg_a, leg_b, self.delta_e)
        np.testing.assert_allclose(back.omega_eff.coeffs, eff.coeffs, rtol=1e-12)

    def test_split_rejects_degenerate_inputs(self):
        eff = FourierSeries(np.array([66.0], dtype=complex), self.tau)
        with pytest.raises(ValueError):
            two_photon_split(eff, 0.0, 1.0)
        with pytest.raises(ValueError):
            two_photon_split(eff, self.delta_e, 0.0)
