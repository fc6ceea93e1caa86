"""Coherent-state coefficient construction and the mean-level solver."""

from math import lgamma

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsedeco import CoherentSpec, coherent_coefficients, eta_for_mean_level, mean_level
from morsedeco.errors import ExcessiveTruncationError, InvalidParamsError

HI_S = 2 * 29.6013 - 1


def reference_coefficients(s: float, eta: complex, n_max: int) -> np.ndarray:
    """Direct evaluation of c_k via log-Gamma, independent of the recurrence."""
    ks = np.arange(n_max + 1)
    log_mag = ((1 + s) / 2) * np.log1p(-abs(eta) ** 2) + 0.5 * np.array(
        [lgamma(k + s + 1) - lgamma(k + 1) - lgamma(1 + s) for k in ks]
    ) + ks * np.log(abs(eta) if abs(eta) > 0 else 1.0)
    phase = np.exp(1j * ks * np.angle(eta)) if abs(eta) > 0 else np.ones(n_max + 1)
    c = np.exp(log_mag) * phase
    if abs(eta) == 0:
        c = np.zeros(n_max + 1, complex)
        c[0] = 1.0
    return c


class TestCoefficients:
    def test_matches_log_gamma_reference(self):
        eta = 0.251572
        ref = reference_coefficients(HI_S, eta, 29)
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=eta), 29)
        # reference is unnormalized over the truncation; renormalize it the same way
        ref = ref / np.linalg.norm(ref)
        np.testing.assert_allclose(state.coeffs, ref, atol=1e-13)

    def test_complex_eta_phases(self):
        eta = 0.2 * np.exp(1j * 0.8)
        ref = reference_coefficients(HI_S, eta, 29)
        ref = ref / np.linalg.norm(ref)
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=eta), 29)
        np.testing.assert_allclose(state.coeffs, ref, atol=1e-13)

    def test_normalized(self):
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=0.3), 29)
        assert np.sum(np.abs(state.coeffs) ** 2) == pytest.approx(1.0, abs=1e-14)

    def test_zero_displacement_is_ground_state(self):
        state = coherent_coefficients(CoherentSpec(s=HI_S, alpha=0.0), 29)
        expected = np.zeros(30)
        expected[0] = 1.0
        np.testing.assert_allclose(np.abs(state.coeffs), expected, atol=1e-15)

    def test_alpha_maps_through_tanh(self):
        alpha = 0.3
        via_alpha = coherent_coefficients(CoherentSpec(s=HI_S, alpha=alpha), 29)
        via_eta = coherent_coefficients(CoherentSpec(s=HI_S, eta=np.tanh(alpha)), 29)
        np.testing.assert_allclose(via_alpha.coeffs, via_eta.coeffs, atol=1e-14)

    def test_population_unimodal(self):
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=0.251572), 29)
        pops = np.abs(state.coeffs) ** 2
        k_peak = np.argmax(pops)
        assert np.all(np.diff(pops[: k_peak + 1]) > 0)
        assert np.all(np.diff(pops[k_peak:]) < 0)

    def test_excessive_truncation_raises(self):
        with pytest.raises(ExcessiveTruncationError):
            coherent_coefficients(CoherentSpec(s=HI_S, eta=0.9), 29)

    def test_leakage_recorded(self):
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=0.251572), 29)
        assert 0 <= state.leakage < 1e-6


class TestSpecValidation:
    def test_requires_exactly_one_amplitude(self):
        with pytest.raises(InvalidParamsError):
            CoherentSpec(s=HI_S)
        with pytest.raises(InvalidParamsError):
            CoherentSpec(s=HI_S, alpha=0.3, eta=0.2)

    def test_eta_magnitude_bound(self):
        with pytest.raises(InvalidParamsError):
            CoherentSpec(s=HI_S, eta=1.0)


class TestMeanLevel:
    def test_target_mean_is_met(self):
        eta = eta_for_mean_level(4.0, HI_S, 29)
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=eta), 29)
        mean, _ = mean_level(state)
        assert mean == pytest.approx(4.0, abs=1e-9)

    def test_untruncated_negative_binomial_mean(self):
        # for negligible leakage the mean approaches (s+1) |eta|^2 / (1 - |eta|^2)
        eta = eta_for_mean_level(4.0, HI_S, 29)
        nb_mean = (HI_S + 1) * eta ** 2 / (1 - eta ** 2)
        assert nb_mean == pytest.approx(4.0, abs=1e-3)

    def test_argmax_near_mean(self):
        eta = eta_for_mean_level(4.0, HI_S, 29)
        state = coherent_coefficients(CoherentSpec(s=HI_S, eta=eta), 29)
        _, k_peak = mean_level(state)
        assert k_peak in (3, 4)

    def test_unreachable_target_rejected(self):
        with pytest.raises(InvalidParamsError):
            eta_for_mean_level(40.0, HI_S, 29)
        with pytest.raises(InvalidParamsError):
            eta_for_mean_level(0.0, HI_S, 29)

    def test_high_target_does_not_underflow(self):
        # regression: the bisection bracket once underflowed the prefactor
        eta = eta_for_mean_level(25.0, HI_S, 29)
        assert 0 < eta < 1


@settings(max_examples=40, deadline=None)
@given(eta=st.floats(0.01, 0.45), s=st.floats(5.0, 80.0))
def test_recurrence_matches_reference_property(eta, s):
    n_max = 20
    ref = reference_coefficients(s, eta, n_max)
    ref = ref / np.linalg.norm(ref)
    state = coherent_coefficients(CoherentSpec(s=s, eta=eta), n_max,
                                  leakage_tol=np.inf)
    np.testing.assert_allclose(state.coeffs, ref, atol=1e-12)
