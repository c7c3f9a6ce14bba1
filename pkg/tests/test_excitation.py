"""
Tests de las corrientes de excitación.
"""

from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dominio.enls import extract_coeffs
from dominio.exceptions import PreconditionException, ValidationException
from dominio.excitacion import (
    EnvelopeSpec,
    FactoryExcitacion,
    FactoryPerfil,
    GaussianProfile,
    SechProfile,
    SuperGaussianProfile,
    bidirectional_current,
    check_disjoint_cutoffs,
    corrective_current,
    corrective_response,
    current_amplitude,
    cutoff,
    envelope_source_data,
    linear_response,
    measure_bandwidth,
    soliton_amplitude,
    window_profile,
)
from dominio.modelo import SyntheticSusceptibility, jet_at, make_synthetic
from dominio.rectificacion import RectifyMap

PI = np.pi
K_STAR = PI / 3


@pytest.fixture(scope="module")
def model():
    return make_synthetic({"family": "2-cos"}, SyntheticSusceptibility(q_plus=1j, s=0.5))


@pytest.fixture(scope="module")
def rect(model):
    return RectifyMap(model, jet_at(model, 1, K_STAR), 2, domain_radius=0.1)


@pytest.fixture(scope="module")
def rect_mirror(model):
    return RectifyMap(model, jet_at(model, 1, -K_STAR), 2, domain_radius=0.1)


@pytest.fixture
def exc():
    return FactoryExcitacion.obtener_excitacion({"h": {"family": "gauss"}}, alpha=0.0025, beta=0.05, rho=0.0025)


@pytest.mark.unit
class TestEnvelopeSpec:
    """Rampa temporal psi0 / psi"""

    def test_unit_integral(self):
        spec = EnvelopeSpec(tau0=0.1)
        value, _ = integrate.quad(lambda t: float(spec.psi0(t)), 0.0, 0.1, epsabs=1e-14, limit=200)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_primitive_limits(self):
        spec = EnvelopeSpec(tau0=0.1)
        assert float(spec.psi(-0.01)) == 0.0
        assert float(spec.psi(0.0)) == 0.0
        assert float(spec.psi(0.1)) == 1.0
        assert float(spec.psi(0.35)) == 1.0

    def test_primitive_is_monotone(self):
        values = EnvelopeSpec().psi(np.linspace(0.0, 0.1, 101))
        assert np.all(np.diff(values) >= 0.0)
        assert np.all((values >= 0.0) & (values <= 1.0))

    def test_derivative_matches_difference(self):
        spec = EnvelopeSpec()
        tau = np.linspace(0.02, 0.08, 7)
        h = 1e-6
        numeric = (spec.psi0(tau + h) - spec.psi0(tau - h)) / (2 * h)
        assert np.allclose(spec.dpsi0(tau), numeric, rtol=1e-5, atol=1e-6)

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValidationException):
            EnvelopeSpec(tau0=0.0)


@pytest.mark.unit
class TestCutoff:
    """Corte Psi0 en cuasimomento"""

    def test_plateau_and_support(self):
        assert np.all(cutoff(np.linspace(-0.05, 0.05, 11), 0.1) == 1.0)
        assert np.all(cutoff(np.array([0.1, -0.1, 0.2]), 0.1) == 0.0)

    @given(st.floats(min_value=-0.2, max_value=0.2, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_even(self, eta):
        assert float(cutoff(eta, 0.1)) == float(cutoff(-eta, 0.1))


@pytest.mark.unit
class TestProfiles:
    """Perfiles h y sus transformadas"""

    def test_default_gaussian_transform(self):
        profile = FactoryPerfil.obtener_perfil({"family": "gauss"})
        q = np.linspace(-3, 3, 13)
        assert np.allclose(profile.h_hat(q), np.exp(-q**2), atol=1e-15)

    @pytest.mark.parametrize("profile", [GaussianProfile(1.3, 0.8), SechProfile(0.7, 1.5), SuperGaussianProfile(1.0, 1.0, 2)])
    def test_transform_matches_quadrature(self, profile):
        for q in (0.0, 0.4, 1.1):
            re, _ = integrate.quad(lambda x: float(profile.h(x)) * np.cos(q * x), -60, 60, limit=400)
            assert float(np.real(profile.h_hat(q))) == pytest.approx(re / (2 * PI), abs=1e-9)

    def test_mirrored_transform_is_conjugate(self):
        profile = GaussianProfile()
        q = np.linspace(-2, 2, 9)
        assert np.allclose(profile.signed_h_hat(-1, q), np.conj(profile.signed_h_hat(1, -q)))

    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationException):
            FactoryPerfil.obtener_perfil({"family": "lorentz"})

    def test_soliton_amplitude_rejects_defocusing(self):
        assert soliton_amplitude(0.5, 1.0, 1.0, 0.1) == pytest.approx(0.1)
        with pytest.raises(ValidationException):
            soliton_amplitude(0.5, 1.0, -1.0, 0.1)


@pytest.mark.unit
class TestCurrentAmplitude:
    """Amplitud de la corriente de un doblete"""

    def test_vanishes_after_ramp(self, exc, rect):
        k = K_STAR + np.linspace(-0.05, 0.05, 5)
        assert np.all(current_amplitude(exc, rect, 1, k, 1.5 * exc.envelope.tau0) == 0)

    def test_vanishes_outside_cutoff(self, exc, rect):
        k = np.array([K_STAR + 0.11, K_STAR - 0.2, -K_STAR])
        assert np.all(current_amplitude(exc, rect, 1, k, 0.05) == 0)

    def test_reality_pairing(self, exc, rect):
        eta = np.linspace(-0.09, 0.09, 19)
        plus = current_amplitude(exc, rect, 1, K_STAR + eta, 0.04)
        minus = current_amplitude(exc, rect, -1, -K_STAR - eta, 0.04)
        assert np.allclose(minus, np.conj(plus), atol=1e-12)

    def test_linear_response_is_integrated_current(self, exc, rect):
        k = K_STAR + np.array([0.0, 0.01, -0.02])
        for tau in (0.03, 0.07, 0.2):
            expected = np.array([
                -integrate.quad(lambda s: float(np.real(current_amplitude(exc, rect, 1, kk, s))), 0.0, tau, limit=200)[0]
                / exc.rho
                for kk in k
            ])
            assert np.allclose(np.real(linear_response(exc, rect, 1, k, tau)), expected, atol=1e-9)

    def test_linear_response_frozen_after_ramp(self, exc, rect):
        k = K_STAR + np.linspace(-0.05, 0.05, 7)
        assert np.allclose(linear_response(exc, rect, 1, k, 0.5), window_profile(exc, rect, 1, k))

    def test_gaussian_tail_outside_beta_window(self, exc, rect):
        narrow = exc.with_scales(beta=0.005)
        far = K_STAR + np.array([0.051, -0.06, 0.08, -0.095])
        assert np.all(np.abs(linear_response(narrow, rect, 1, far, 1.0)) < 1e-12)

    def test_rejects_map_at_other_carrier(self, exc, model):
        other = RectifyMap(model, jet_at(model, 1, 1.0), 2)
        with pytest.raises(PreconditionException):
            current_amplitude(exc, other, 1, np.array([K_STAR]), 0.05)


@pytest.mark.unit
class TestBidirectionalCurrent:
    """Corriente del cuadruplete"""

    def test_empty_second_doublet_reduces(self, exc, rect, rect_mirror):
        silent = exc.with_scales(k_star=-K_STAR, profile=GaussianProfile(amplitude=0.0))
        k = np.linspace(-PI, PI, 401, endpoint=False)
        both = bidirectional_current(exc, silent, rect, rect_mirror, 1, k, 0.05)
        assert np.allclose(both, current_amplitude(exc, rect, 1, k, 0.05))

    def test_picks_term_near_minus_k_star(self, exc, rect, rect_mirror):
        other = exc.with_scales(k_star=-K_STAR, profile=SechProfile())
        k = -K_STAR + np.linspace(-0.05, 0.05, 11)
        both = bidirectional_current(exc, other, rect, rect_mirror, 1, k, 0.05)
        assert np.allclose(both, current_amplitude(other, rect_mirror, 1, k, 0.05))

    def test_reality_on_grid(self, exc, rect, rect_mirror):
        other = exc.with_scales(k_star=-K_STAR, profile=SechProfile(0.5, 1.2))
        k = np.linspace(-PI, PI, 512, endpoint=False)
        plus = bidirectional_current(exc, other, rect, rect_mirror, 1, k, 0.05)
        minus = bidirectional_current(exc, other, rect, rect_mirror, -1, -k, 0.05)
        assert np.allclose(minus, np.conj(plus), atol=1e-12)

    def test_overlapping_cutoffs_rejected(self):
        with pytest.raises(PreconditionException):
            check_disjoint_cutoffs(0.05, 0.1, 0.1)
        check_disjoint_cutoffs(K_STAR, 0.1, 0.1)


@pytest.mark.unit
class TestEnvelopeSourceData:
    """Datos espectrales de la envolvente"""

    def test_matches_modal_window(self, exc, rect):
        xi = np.linspace(-0.08, 0.08, 17)
        eta = rect.forward(xi)
        assert np.allclose(envelope_source_data(exc, rect, 1, xi), window_profile(exc, rect, 1, K_STAR + eta), atol=1e-13)

    def test_zero_outside_window(self, exc, rect):
        assert np.all(envelope_source_data(exc, rect, 1, np.array([0.15, -0.3])) == 0)


@pytest.mark.unit
class TestBandwidth:
    """Ancho de banda de la portadora con rampa"""

    def test_constant_stable_over_rho(self):
        spec = EnvelopeSpec()
        constants = [measure_bandwidth(spec, rho, omega0=1.5)["C"] for rho in (1e-3, 1e-2, 1e-1)]
        assert max(constants) / min(constants) == pytest.approx(1.0, abs=5e-2)
        assert all(c > 0 for c in constants)


@dataclass(frozen=True)
class _SquareRamp:
    """Rampa con psi = psi**3 y derivada constante."""

    tau0: float = 0.1

    def psi0(self, tau):
        return np.where((np.asarray(tau) > 0) & (np.asarray(tau) < self.tau0), 1.0 / self.tau0, 0.0)

    def psi(self, tau):
        return np.where(np.asarray(tau) > 0, 1.0, 0.0)


@pytest.mark.integration
class TestCorrectiveCurrent:
    """Corriente correctiva J1"""

    @pytest.fixture(scope="class")
    def setup(self, model, rect):
        exc = FactoryExcitacion.obtener_excitacion({"h": {"family": "gauss"}}, alpha=0.0025, beta=0.05, rho=0.0025)
        coeffs = extract_coeffs(model, jet_at(model, 1, K_STAR), rect, nu=2, sigma=0, alpha=exc.alpha)
        return exc, coeffs, corrective_response(exc, rect, coeffs, n_points=1024)

    def test_zero_without_nonlinearity(self, setup, rect):
        exc, coeffs, response = setup
        k = K_STAR + np.linspace(-0.05, 0.05, 5)
        assert np.all(corrective_current(exc.with_scales(alpha=0.0), rect, coeffs, 1, k, 0.05, response) == 0)

    def test_zero_after_ramp(self, setup, rect):
        exc, coeffs, response = setup
        k = K_STAR + np.linspace(-0.05, 0.05, 5)
        assert np.all(corrective_current(exc, rect, coeffs, 1, k, exc.envelope.tau0, response) == 0)

    def test_square_ramp_keeps_only_response_term(self, setup, rect):
        exc, coeffs, response = setup
        square = exc.with_scales(envelope=_SquareRamp())
        k = K_STAR + np.linspace(-0.04, 0.04, 5)
        tau = 0.05
        xi = rect.inverse(k - K_STAR)
        expected = exc.alpha * cutoff(k - K_STAR, exc.pi0) * (-exc.rho / 0.1) * response.spectrum_at(1, xi, tau / exc.rho)
        assert np.allclose(corrective_current(square, rect, coeffs, 1, k, tau, response), expected, rtol=1e-12, atol=0)

    def test_nonzero_during_ramp(self, setup, rect):
        exc, coeffs, response = setup
        values = corrective_current(exc, rect, coeffs, 1, np.array([K_STAR]), 0.05, response)
        assert np.abs(values[0]) > 0
