"""Revival time, probe placement, sweeps, and decay-law fitting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsedeco import (
    CoherentSpec,
    GridSpec,
    coherent_coefficients,
    eta_for_mean_level,
    find_peak,
    fit_bose,
    fit_exponential,
    morse_potential,
    revival_time,
    sweep_delta,
    sweep_temperature,
    unitary_evolve,
    wigner_transform,
)
from morsedeco.analysis import classical_turning_points, default_probes
from morsedeco.errors import InvalidParamsError


@pytest.fixture(scope="module")
def compass_reference(hi_basis):
    """Decoherence-free compass-state Wigner grid at one eighth of a revival."""
    s = 2 * hi_basis.params.lam - 1
    eta = eta_for_mean_level(4.0, s, hi_basis.n_max)
    state = coherent_coefficients(CoherentSpec(s=s, eta=eta), hi_basis.n_max)
    c = unitary_evolve(state.coeffs, hi_basis.energies, revival_time(hi_basis) / 8)
    rho = np.outer(c, c.conj())
    return rho, wigner_transform(rho, hi_basis, GridSpec())


class TestRevivalTime:
    def test_closed_form(self, hi_basis):
        p = hi_basis.params
        expected = 4 * np.pi * p.mu * p.r0 ** 2 / p.beta ** 2
        assert revival_time(hi_basis) == pytest.approx(expected, rel=1e-12)

    def test_hi_value(self, hi_basis):
        assert revival_time(hi_basis) == pytest.approx(4.89e4, rel=5e-3)

    def test_independent_of_reference_level(self, hi_basis):
        base = revival_time(hi_basis, nbar=4)
        for nbar in (1, 10, 20, hi_basis.n_max - 1):
            assert revival_time(hi_basis, nbar=nbar) == pytest.approx(base, rel=1e-9)

    def test_bad_level_rejected(self, hi_basis):
        with pytest.raises(InvalidParamsError):
            revival_time(hi_basis, nbar=0)
        with pytest.raises(InvalidParamsError):
            revival_time(hi_basis, nbar=hi_basis.n_max)


class TestTurningPoints:
    def test_roots_of_potential(self, hi_basis):
        for level in (0, 4, 12, 25):
            x_in, x_out = classical_turning_points(hi_basis, level)
            E = hi_basis.energies[level]
            assert x_in < 0 < x_out
            assert morse_potential(hi_basis.params, x_in) == pytest.approx(E, abs=1e-12)
            assert morse_potential(hi_basis.params, x_out) == pytest.approx(E, abs=1e-12)

    def test_orbit_widens_with_energy(self, hi_basis):
        widths = [np.diff(classical_turning_points(hi_basis, n))[0]
                  for n in range(hi_basis.n_states)]
        assert np.all(np.diff(widths) > 0)


class TestDefaultProbes:
    def test_probes_lock_onto_lobes(self, hi_basis, compass_reference):
        _, W0 = compass_reference
        left, right, central = default_probes(W0, hi_basis)
        x_in, x_out = classical_turning_points(hi_basis, 4)
        assert left.x0 == pytest.approx(x_in, abs=0.07)
        assert right.x0 == pytest.approx(x_out, abs=0.07)
        assert left.sign == right.sign == 1
        assert central.sign == -1
        # the probes must re-find their extrema with the tracking window
        assert find_peak(W0, left).amplitude > 0.05
        assert find_peak(W0, right).amplitude > 0.05
        assert find_peak(W0, central).amplitude < -0.15

    def test_central_probe_location(self, hi_basis, compass_reference):
        _, W0 = compass_reference
        _, _, central = default_probes(W0, hi_basis)
        # the dominant negative extremum of the interference core
        assert central.x0 == pytest.approx(0.047, abs=0.02)
        assert central.p0 == pytest.approx(-5.1, abs=0.5)


class TestSweeps:
    def test_zero_coupling_matches_reference(self, hi_basis, hi_xmatrix,
                                             compass_reference):
        rho8, W0 = compass_reference
        # rebuild the t = 0 state and sweep the single point delta = 0
        s = 2 * hi_basis.params.lam - 1
        eta = eta_for_mean_level(4.0, s, hi_basis.n_max)
        state = coherent_coefficients(CoherentSpec(s=s, eta=eta), hi_basis.n_max)
        rho0 = np.outer(state.coeffs, state.coeffs.conj())
        probes = default_probes(W0, hi_basis)
        t8 = revival_time(hi_basis) / 8
        res = sweep_delta(hi_basis, hi_xmatrix, rho0, [0.0],
                          temperature=0.07, t_snap=t8, probes=probes)
        assert res.axis_name == "delta"
        ref = find_peak(W0, probes[2]).amplitude
        assert res.central[0] == pytest.approx(ref, rel=1e-8)
        assert res.left[0] == pytest.approx(find_peak(W0, probes[0]).amplitude,
                                            rel=1e-8)

    def test_temperature_sweep_requires_probes(self, hi_basis, hi_xmatrix):
        rho0 = np.zeros((hi_basis.n_states, hi_basis.n_states), dtype=complex)
        rho0[0, 0] = 1.0
        with pytest.raises(InvalidParamsError):
            sweep_temperature(hi_basis, hi_xmatrix, rho0, [1.0, 2.0],
                              delta=100.0, t_snap=1.0)


class TestExponentialFit:
    def test_exact_recovery(self):
        delta = np.linspace(0.0, 2.2e3, 12)
        y = 0.5847 * np.exp(-0.3585 * delta / 1e3)
        fit = fit_exponential(delta, y)
        assert fit.params["A"] == pytest.approx(0.5847, rel=1e-8)
        assert fit.params["c"] == pytest.approx(0.3585, rel=1e-8)
        assert fit.accepted

    def test_sign_insensitive(self):
        delta = np.linspace(0.0, 2.2e3, 12)
        y = -0.2 * np.exp(-0.7 * delta / 1e3)   # negative-peak series
        fit = fit_exponential(delta, y)
        assert fit.params["A"] == pytest.approx(0.2, rel=1e-8)
        assert fit.params["c"] == pytest.approx(0.7, rel=1e-8)

    def test_noisy_recovery(self, rng):
        delta = np.linspace(0.0, 2.2e3, 24)
        y = 0.3 * np.exp(-0.5 * delta / 1e3) * (1 + 1e-3 * rng.standard_normal(24))
        fit = fit_exponential(delta, y)
        assert fit.params["A"] == pytest.approx(0.3, rel=0.01)
        assert fit.params["c"] == pytest.approx(0.5, rel=0.02)
        assert fit.accepted

    def test_nan_points_dropped(self):
        delta = np.linspace(0.0, 2.0e3, 10)
        y = 0.4 * np.exp(-0.6 * delta / 1e3)
        y[7:] = np.nan                       # peak lost at strong coupling
        fit = fit_exponential(delta, y)
        assert fit.params["c"] == pytest.approx(0.6, rel=1e-8)

    def test_too_few_points_rejected(self):
        with pytest.raises(InvalidParamsError):
            fit_exponential([0.0, 500.0, 1000.0], [0.3, 0.2, 0.1])

    def test_bad_model_not_accepted(self, rng):
        delta = np.linspace(0.0, 2.2e3, 16)
        y = 0.3 / (1.0 + 5.0 * delta / 1e3)   # algebraic, not exponential
        fit = fit_exponential(delta, y)
        assert not fit.accepted

    @settings(max_examples=25, deadline=None)
    @given(A=st.floats(0.05, 1.0), c=st.floats(0.05, 2.0))
    def test_recovery_property(self, A, c):
        delta = np.linspace(0.0, 2.2e3, 12)
        fit = fit_exponential(delta, A * np.exp(-c * delta / 1e3))
        assert fit.params["A"] == pytest.approx(A, rel=1e-6)
        assert fit.params["c"] == pytest.approx(c, rel=1e-6)


class TestBoseFit:
    def test_exact_recovery(self):
        T = np.geomspace(0.07, 13.4, 13)
        y = 0.5799 * np.exp(-0.0127 / np.expm1(0.6688 / T))
        fit = fit_bose(T, y)
        assert fit.params["a"] == pytest.approx(0.5799, rel=1e-6)
        assert fit.params["b"] == pytest.approx(0.0127, rel=1e-4)
        assert fit.params["T_c"] == pytest.approx(0.6688, rel=1e-4)
        assert fit.accepted

    def test_noisy_recovery(self, rng):
        T = np.geomspace(0.07, 13.4, 26)
        y = 0.2 * np.exp(-0.03 / np.expm1(0.9 / T))
        y *= 1 + 5e-4 * rng.standard_normal(len(T))
        fit = fit_bose(T, y)
        assert fit.params["a"] == pytest.approx(0.2, rel=0.01)
        assert fit.params["T_c"] == pytest.approx(0.9, rel=0.1)

    def test_too_few_points_rejected(self):
        with pytest.raises(InvalidParamsError):
            fit_bose([0.1, 1.0, 2.0, 4.0, 8.0], [0.5, 0.4, 0.3, 0.2, 0.1])

    def test_constant_series_rejected(self):
        with pytest.raises(InvalidParamsError):
            fit_bose(np.geomspace(0.1, 10, 8), np.full(8, 0.3))

    def test_high_temperature_tail_is_exponential(self):
        # for T >> Tc the occupation grows ~ T/Tc, so ln y is ~ linear in T
        a, b, Tc = 0.5799, 0.0127, 0.6688
        T = np.linspace(20 * Tc, 60 * Tc, 9)
        y = a * np.exp(-b / np.expm1(Tc / T))
        slopes = np.diff(np.log(y)) / np.diff(T)
        assert np.ptp(slopes) / np.abs(slopes).mean() < 0.02
        assert slopes.mean() == pytest.approx(-b / Tc, rel=0.05)
