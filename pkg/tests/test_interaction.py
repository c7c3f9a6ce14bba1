"""
Tests de la autointeracción: cuadrupletes, fase, oráculo y desarrollos.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dominio.enls import extract_coeffs
from dominio.exceptions import ConvergenceException, PreconditionException, ValidationException
from dominio.excitacion import DoubletExcitation, EnvelopeSpec, FactoryPerfil
from dominio.interaccion import (
    FM,
    NO_FM_OPUESTO,
    NO_FM_TERCER_ARMONICO,
    VIOLA_VELOCIDAD,
    InteractionIntegrand,
    Quadruplet,
    ScaledPhase,
    boundary_terms,
    classify_quadruplet,
    convolution_oracle,
    critical_point,
    fm_integrand,
    harmonic_expand,
    multi_indices,
    nonfm_estimate,
    phase_evaluation,
    phase_value,
    quad_oracle,
    rectified_integral,
    spatial_integral,
    sphm_expand,
    split_time,
    weak_dispersion_expand,
)
from dominio.modelo import ExponentialKernel, InstantaneousKernel, TabulatedKernel, jet_at, make_synthetic
from dominio.rectificacion import RectifyMap

PI = np.pi
K_STAR = PI / 3.0
GAUSS = "exp(-q1**2 - q2**2)"


def _slope(x, y):
    return np.polyfit(np.log10(x), np.log10(y), 1)[0]


@pytest.fixture(scope="module")
def cos_model():
    return make_synthetic({"family": "2-cos"})


@pytest.fixture(scope="module")
def cos_setup(cos_model):
    jet = jet_at(cos_model, 1, K_STAR)
    rect = RectifyMap(cos_model, jet, 2, domain_radius=0.1)
    coeffs = extract_coeffs(cos_model, jet, rect, nu=2, sigma=0)
    return jet, rect, coeffs


def _excitation(beta=0.05, rho=0.0025):
    return DoubletExcitation(FactoryPerfil.obtener_perfil({"family": "gauss"}), beta=beta, rho=rho)


@pytest.mark.unit
class TestQuadruplets:
    """Clasificación de cuadrupletes por reglas de selección"""

    def test_third_harmonic_phase(self, cos_model):
        quad = Quadruplet.build((1, 1, 1, 1), (1, 1, 1, 1), (PI, K_STAR, K_STAR, K_STAR))
        assert phase_value(cos_model, quad) == pytest.approx(-1.5, abs=1e-14)
        verdict = classify_quadruplet(cos_model, K_STAR, 1, quad)
        assert verdict.label == NO_FM_TERCER_ARMONICO
        assert not verdict.frequency_matched

    def test_canonical_is_frequency_matched(self, cos_model):
        quad = Quadruplet.canonical(1, 1, K_STAR)
        assert phase_value(cos_model, quad) == pytest.approx(0.0, abs=1e-14)
        verdict = classify_quadruplet(cos_model, K_STAR, 1, quad)
        assert verdict.label == FM
        assert verdict.gvm_margin == pytest.approx(0.0, abs=1e-12)
        assert verdict.doublets == (1, 1, 1, 1)

    def test_mixed_doublets_violate_group_velocity(self, cos_model):
        quad = Quadruplet.build((1, 1, 1, -1), (1, 1, 1, 1), (K_STAR, -K_STAR, K_STAR, K_STAR))
        verdict = classify_quadruplet(cos_model, K_STAR, 1, quad)
        assert verdict.label == VIOLA_VELOCIDAD
        assert verdict.frequency_matched

    def test_opposite_sign_end(self, cos_model):
        quad = Quadruplet.build((-1, -1, 1, 1), (1, 1, 1, 1), (K_STAR, -K_STAR, K_STAR, K_STAR))
        assert classify_quadruplet(cos_model, K_STAR, 1, quad).label == NO_FM_OPUESTO

    def test_momentum_mismatch_rejected(self):
        with pytest.raises(ValidationException):
            Quadruplet.build((1, 1, 1, -1), (1, 1, 1, 1), (K_STAR, K_STAR, K_STAR, K_STAR))

    def test_unlocalized_origin_rejected(self, cos_model):
        quad = Quadruplet.build((1, 1, 1, -1), (1, 1, 1, 1), (1.5, 0.0, 1.5, 0.0))
        with pytest.raises(PreconditionException):
            classify_quadruplet(cos_model, K_STAR, 1, quad)

    @given(
        k1=st.floats(min_value=-1.0, max_value=1.0),
        k2=st.floats(min_value=-1.0, max_value=1.0),
        k3=st.floats(min_value=-1.0, max_value=1.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_phase_symmetric_in_origins(self, k1, k2, k3):
        model = make_synthetic({"family": "2-cos"})
        end = k1 + k2 + k3
        quad = Quadruplet.build((1, 1, -1, 1), (1, 1, 1, 1), (end, k1, k2, k3))
        swapped = Quadruplet.build((1, -1, 1, 1), (1, 1, 1, 1), (end, k2, k1, k3))
        assert phase_value(model, quad) == pytest.approx(phase_value(model, swapped), abs=1e-13)


@pytest.mark.unit
class TestScaledPhase:
    """Fase rectificada, punto crítico y hessiano"""

    def test_quadratic_band_critical_point(self):
        model = make_synthetic({"family": "k^2/2"})
        report = critical_point(jet_at(model, 1, 1.0), 2, 0.0, 0.05)
        assert report.gradient_residual <= 1e-12
        assert report.determinant == pytest.approx(-1.0, abs=1e-12)
        assert report.probe_distance < 1e-5
        assert report.ring_gradient > 0.0
        assert report.q_flat == (0.0, 0.0, 0.0, -0.0)

    def test_off_diagonal_matches_curvature(self, cos_setup):
        jet, _, _ = cos_setup
        report = critical_point(jet, 4, 0.5, 0.05)
        assert report.off_diagonal == pytest.approx(report.expected_off_diagonal, rel=1e-12)

    def test_offset_outside_cutoff(self, cos_setup):
        jet, _, _ = cos_setup
        with pytest.raises(PreconditionException):
            critical_point(jet, 2, 3.0, 0.05)

    def test_bilinear_form_at_second_order(self, cos_setup):
        jet, _, _ = cos_setup
        phase = ScaledPhase.from_jet(jet, 2, 0.05)
        q1, q2 = np.array([0.3, -1.2]), np.array([0.7, 2.0])
        assert np.allclose(phase(q1, q2), 2.0 * jet.gammas(2)[2] * q1 * q2, atol=1e-12)

    def test_phase_replacement_improves_with_order(self, cos_model):
        jet = jet_at(cos_model, 1, K_STAR)
        gaps = []
        for nu in (2, 4):
            rect = RectifyMap(cos_model, jet, nu, domain_radius=0.1)
            evaluation = phase_evaluation(cos_model, rect, nu, 0.05, 0.8, -0.4)
            gaps.append(abs(evaluation.phi - evaluation.rectified_phi))
        assert gaps[1] < gaps[0]
        at_origin = phase_evaluation(cos_model, RectifyMap(cos_model, jet, 2), 2, 0.05, 0.0, 0.0)
        assert at_origin.phi == pytest.approx(0.0, abs=1e-14)


@pytest.mark.unit
class TestQuadratureOracle:
    """Oráculo de cuadratura oscilatoria"""

    def test_no_oscillation(self):
        integrand = InteractionIntegrand.from_sympy("0", GAUSS)
        envelope = EnvelopeSpec()
        taus = np.array([0.05, 0.2])
        result = quad_oracle(integrand, 1.0, taus, rho=1.0, envelope=envelope)
        for tau, value in zip(taus, result.values):
            expected, _ = integrate.quad(lambda s: float(envelope.psi(s)) ** 3, 0.0, tau, epsabs=1e-13)
            assert value == pytest.approx(PI * expected, abs=1e-8)

    def test_odd_amplitude_vanishes(self):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", "q1*" + GAUSS)
        result = spatial_integral(integrand, [0.5, 2.0])
        assert np.allclose(result.values, 0.0, atol=1e-9)

    def test_swap_symmetry(self):
        integrand = InteractionIntegrand.from_sympy("q1**2 + 0.3*q2", "(1 + q1)*" + GAUSS)
        direct = spatial_integral(integrand, 1.5).values
        swapped = spatial_integral(integrand.swapped(), 1.5).values
        assert np.allclose(direct, swapped, atol=1e-9)

    def test_zero_amplitude(self):
        integrand = InteractionIntegrand.from_sympy("q1*q2", "0")
        result = quad_oracle(integrand, 0.5, [0.0, 0.3])
        assert np.all(result.values == 0.0)

    def test_zero_time(self):
        integrand = InteractionIntegrand.from_sympy("q1*q2", GAUSS)
        assert np.all(quad_oracle(integrand, 0.5, [0.0]).values == 0.0)

    def test_invalid_arguments(self):
        integrand = InteractionIntegrand.from_sympy("q1*q2", GAUSS)
        with pytest.raises(ValidationException):
            quad_oracle(integrand, 0.0, [0.1])
        with pytest.raises(ValidationException):
            quad_oracle(integrand, 1.0, [-0.1])
        with pytest.raises(ValidationException):
            InteractionIntegrand.from_sympy("q1*z", GAUSS)

    def test_no_decay(self):
        integrand = InteractionIntegrand.from_sympy("q1", "1")
        with pytest.raises(ConvergenceException):
            spatial_integral(integrand, 1.0)

    @pytest.mark.slow
    def test_bilinear_gaussian(self):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", GAUSS)
        value = complex(spatial_integral(integrand, 10.0).values[0])
        assert value.real == pytest.approx(PI / np.sqrt(101.0), abs=1e-8)
        assert value.imag == pytest.approx(0.0, abs=1e-8)


@pytest.mark.unit
class TestRectifiedIntegral:
    """Integral FM rectificada"""

    def test_symbolic_integrand(self, cos_setup):
        _, _, coeffs = cos_setup
        integrand = fm_integrand(coeffs, _excitation())
        assert integrand.symbolic
        assert integrand.center == (0.0, 0.0)

    def test_sigma_above_order(self, cos_setup):
        _, _, coeffs = cos_setup
        with pytest.raises(PreconditionException):
            fm_integrand(coeffs, _excitation(), sigma=1)

    @pytest.mark.slow
    def test_gaussian_closed_form(self, cos_setup):
        _, _, coeffs = cos_setup
        exc = _excitation()
        tau = 0.3
        result = rectified_integral(coeffs, exc, 0, [tau])
        p0 = coeffs.amplitudes[1][(0, 0, 0)]

        def spatial(s):
            lam = s / exc.theta
            return PI / np.sqrt(3.0 + lam**2 / 16.0 + 0.5j * lam)

        def part(s, take):
            return take(float(exc.envelope.psi(s)) ** 3 * spatial(s))

        re, _ = integrate.quad(part, 0.0, tau, args=(np.real,), epsabs=1e-12, limit=200)
        im, _ = integrate.quad(part, 0.0, tau, args=(np.imag,), epsabs=1e-12, limit=200)
        expected = p0 * complex(re, im) / exc.rho
        assert complex(result.values[0]) == pytest.approx(expected, rel=1e-6)


@pytest.mark.unit
class TestStationaryPhase:
    """Desarrollo de fase estacionaria"""

    def test_leading_term(self):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", GAUSS)
        expansion = sphm_expand(integrand, 0.1, 0)
        assert complex(expansion.values[0]) == pytest.approx(PI * 0.1, rel=1e-12)
        exact = PI / np.sqrt(101.0)
        assert (expansion.values[0].real - exact) / exact == pytest.approx(np.sqrt(1.01) - 1.0, rel=1e-9)

    def test_constant_amplitude_has_single_term(self):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", "1")
        expansion = sphm_expand(integrand, 0.1, 3)
        assert np.allclose(expansion.coefficients[1:], 0.0, atol=1e-14)
        assert expansion.prefactor == pytest.approx(PI, rel=1e-12)

    def test_theta_above_threshold(self):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", GAUSS)
        with pytest.raises(PreconditionException):
            sphm_expand(integrand, 0.5, 0)

    def test_degenerate_hessian(self):
        integrand = InteractionIntegrand.from_sympy("q1**2", GAUSS)
        with pytest.raises(PreconditionException):
            sphm_expand(integrand, 0.1, 0)

    def test_numeric_amplitude_limited_to_leading_term(self):
        base = InteractionIntegrand.from_sympy("2*q1*q2", GAUSS)
        numeric = base.with_amplitude(lambda a, b: 1.0)
        with pytest.raises(ValidationException):
            sphm_expand(numeric, 0.1, 1)
        assert complex(sphm_expand(numeric, 0.1, 0).values[0]) == pytest.approx(PI * 0.1, rel=1e-5)

    def test_split_time(self):
        assert split_time(1e-4, 0.05) == pytest.approx(1e-4 / 0.05**2.5, rel=1e-12)
        with pytest.raises(PreconditionException):
            split_time(0.01, 0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize("n_terms", [0, 1, 2])
    def test_truncation_order(self, n_terms):
        integrand = InteractionIntegrand.from_sympy("2*q1*q2", "(1 + q1*q2)*" + GAUSS)
        thetas = np.array([1e-3, 1e-2, 1e-1])
        errors = []
        for theta in thetas:
            lam = 1.0 / theta
            exact = PI / np.sqrt(1.0 + lam**2) + 1j * PI * lam / (2.0 * (1.0 + lam**2) ** 1.5)
            value = complex(sphm_expand(integrand, theta, n_terms).values[0])
            errors.append(abs(value - exact) / abs(exact))
        assert _slope(thetas, errors) == pytest.approx(n_terms + 1, abs=0.3)


@pytest.mark.unit
class TestWeakDispersion:
    """Régimen de dispersión débil"""

    def test_budget(self, cos_setup):
        _, _, coeffs = cos_setup
        beta = 0.05
        exc = _excitation(beta=beta, rho=beta**2)
        result = weak_dispersion_expand(coeffs, exc, [0.05])
        assert result.budget["phase_replacement"] == pytest.approx(beta * 0.05, rel=1e-12)
        assert result.budget["amplitude"] == pytest.approx(beta, rel=1e-12)
        assert result.budget["data"] == pytest.approx(beta**2, rel=1e-12)

    def test_strong_dispersion_rejected(self, cos_setup):
        _, _, coeffs = cos_setup
        with pytest.raises(PreconditionException):
            weak_dispersion_expand(coeffs, _excitation(beta=0.05, rho=1e-5), [0.05])


@pytest.mark.unit
class TestNonFmEstimate:
    """Términos de borde de interacciones no FM"""

    def test_boundary_term_scales_with_mismatch(self):
        slow = InteractionIntegrand.from_sympy("1.5", GAUSS)
        fast = InteractionIntegrand.from_sympy("3.0", GAUSS)
        k1_slow, k2_slow, found = boundary_terms(slow, 0.5, 1e-3)
        k1_fast, _, _ = boundary_terms(fast, 0.5, 1e-3)
        assert abs(k1_slow) == pytest.approx(PI / 1.5, rel=1e-8)
        assert abs(k1_fast) / abs(k1_slow) == pytest.approx(0.5, rel=1e-8)
        assert k2_slow == 0j
        assert found == pytest.approx(1.5)

    def test_second_term_during_ramp(self):
        integrand = InteractionIntegrand.from_sympy("1.5", GAUSS)
        _, small, _ = boundary_terms(integrand, 0.05, 1e-3)
        _, large, _ = boundary_terms(integrand, 0.05, 1e-2)
        assert abs(small) / abs(large) == pytest.approx(0.1, rel=1e-8)

    def test_near_resonance(self):
        integrand = InteractionIntegrand.from_sympy("1e-5", GAUSS)
        with pytest.raises(PreconditionException):
            boundary_terms(integrand, 0.5, 1e-3)

    def test_third_harmonic(self, cos_model):
        quad = Quadruplet.build((1, 1, 1, 1), (1, 1, 1, 1), (PI, K_STAR, K_STAR, K_STAR))
        estimate = nonfm_estimate(cos_model, quad, _excitation(), 0.5)
        assert estimate.label == NO_FM_TERCER_ARMONICO
        assert estimate.phi == pytest.approx(-1.5, abs=1e-14)
        assert estimate.rho_k2 == 0j
        assert np.isfinite(estimate.k1) and abs(estimate.k1) > 0.0

    def test_frequency_matched_rejected(self, cos_model):
        with pytest.raises(PreconditionException):
            nonfm_estimate(cos_model, Quadruplet.canonical(1, 1, K_STAR), _excitation(), 0.5)


@pytest.mark.unit
class TestHarmonicExpansion:
    """Desarrollo armónico de la respuesta con memoria"""

    def test_exponential_coefficients(self):
        expansion = harmonic_expand(ExponentialKernel(c=1.0), (0.0, 0.0, 0.0), 2)
        assert expansion.coefficient((0, 0, 0)) == pytest.approx(1.0)
        assert expansion.coefficient((1, 0, 0)) == pytest.approx(-1.0)
        assert len(expansion.coefficients) == len(multi_indices(2)) == 10

    def test_instantaneous(self):
        expansion = harmonic_expand(InstantaneousKernel(), (1.0, 1.0, -1.0), 1)
        assert expansion.coefficient((0, 0, 0)) == 1.0
        assert expansion.coefficient((0, 1, 0)) == 0j

    def test_tabulated_matches_exponential(self):
        t = np.linspace(0.0, 40.0, 4001)
        tabulated = TabulatedKernel(t, np.exp(-t))
        omegas = (0.5, 0.5, -0.5)
        exact = harmonic_expand(ExponentialKernel(c=1.0, r0=1.0), omegas, 2)
        approx = harmonic_expand(tabulated, omegas, 2)
        for l, value in exact.coefficients.items():
            assert approx.coefficients[l] == pytest.approx(value, abs=1e-6)

    def test_tabulated_order_limit(self):
        t = np.linspace(0.0, 40.0, 4001)
        with pytest.raises(ValidationException):
            harmonic_expand(TabulatedKernel(t, np.exp(-t)), (0.0, 0.0, 0.0), 5)

    def test_series_value_requires_derivatives(self):
        with pytest.raises(ValidationException):
            harmonic_expand(ExponentialKernel(), (0.0, 0.0, 0.0), 1, derivatives=[[1.0, 0.0]] * 3)

    @pytest.mark.slow
    def test_truncation_error_order(self):
        kernel = ExponentialKernel(c=1.0)
        omegas = (0.5, 0.5, -0.5)
        rhos = np.array([0.01, 0.02, 0.04])
        errors = []
        for rho in rhos:
            t = 0.3 / rho
            envelopes = [lambda s: np.exp(-s**2)] * 3
            exact = convolution_oracle(kernel, omegas, envelopes, rho, t)
            series = harmonic_expand(kernel, omegas, 0, derivatives=[[np.exp(-0.09)]] * 3, rho=rho)
            errors.append(abs(series.value - exact))
        assert _slope(rhos, errors) == pytest.approx(1.0, abs=0.2)
