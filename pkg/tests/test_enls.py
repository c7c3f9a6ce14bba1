"""
Tests de las ecuaciones de envolvente.
"""

from dataclasses import replace

import numpy as np
import pytest

from dominio.enls import (
    EnvelopeGrid,
    FirstNonlinearResponse,
    LinearRampSource,
    OrderSpec,
    alpha_pi,
    extract_coeffs,
    frame_phase,
    initial_state,
    integrate_bidirectional,
    integrate_enls,
    integrate_transport,
    nls_coefficients,
    rational_form_residual,
    reduce_scaling,
    rescale,
    rescale_coefficients,
    to_source_form,
    unscale,
)
from dominio.exceptions import (
    NumericalException,
    PreconditionException,
    StepRejectedException,
    ValidationException,
)
from dominio.excitacion import EnvelopeSpec, soliton_amplitude
from dominio.modelo import ExponentialKernel, SyntheticSusceptibility, jet_at, make_synthetic
from dominio.rectificacion import RectifyMap

PI = np.pi
# alpha con alpha_pi = 1
ALPHA_UNIDAD = 1.0 / (3.0 * (2.0 * PI) ** 2)


@pytest.fixture(scope="module")
def grid():
    return EnvelopeGrid(length=40.0, n_points=256)


def _gauss(grid, amplitude=1.0, width=1.0):
    return amplitude * np.exp(-grid.x**2 / (2.0 * width**2)) + 0j


def _soliton_coeffs():
    return nls_coefficients((0.0, 0.0, 0.5), 1j, ALPHA_UNIDAD)


def _slope(x, y):
    return np.polyfit(np.log10(x), np.log10(y), 1)[0]


@pytest.mark.unit
class TestEnvelopeGrid:
    """Malla periódica y convención de Fourier"""

    def test_invalid_sizes(self):
        with pytest.raises(ValidationException):
            EnvelopeGrid(length=10.0, n_points=63)
        with pytest.raises(ValidationException):
            EnvelopeGrid(length=-1.0, n_points=64)

    def test_gaussian_spectrum(self, grid):
        z = _gauss(grid)
        expected = np.exp(-grid.xi**2 / 2.0) / np.sqrt(2.0 * PI)
        assert np.allclose(grid.fourier(z), expected, atol=1e-12)
        assert complex(grid.fourier_at(z, 0.0)) == pytest.approx(1.0 / np.sqrt(2.0 * PI), abs=1e-12)

    def test_inverse(self, grid):
        z = _gauss(grid) * np.exp(0.7j * grid.x)
        assert np.allclose(grid.inverse(grid.fourier(z)), z, atol=1e-13)

    def test_fourier_at_matches_grid(self, grid):
        z = _gauss(grid, width=2.0)
        assert np.allclose(grid.fourier_at(z, grid.xi[:20]), grid.fourier(z)[:20], atol=1e-12)

    def test_for_beta(self):
        g = EnvelopeGrid.for_beta(0.05, 512)
        assert g.length == pytest.approx(800.0)

    def test_frame_phase(self):
        gammas = (1.5, 0.8, 0.5)
        assert float(frame_phase(gammas, 1, 2.0, "lab")) == 0.0
        assert float(frame_phase(gammas, -1, 2.0, "rotating")) == pytest.approx(-1.5)
        assert float(frame_phase(gammas, 1, 2.0, "comoving")) == pytest.approx(3.1)
        with pytest.raises(ValidationException):
            frame_phase(gammas, 1, 0.0, "spinning")


@pytest.mark.unit
class TestExtractCoeffs:
    """Extracción de coeficientes"""

    def test_quadratic_family(self):
        model = make_synthetic({"family": "k^2/2"})
        jet = jet_at(model, 1, 1.0)
        coeffs = extract_coeffs(model, jet, RectifyMap(model, jet, 2, domain_radius=0.1))
        assert coeffs.gammas == pytest.approx((0.5, 1.0, 0.5), abs=1e-10)
        assert coeffs.Q_plus == pytest.approx(1j, abs=1e-12)
        assert coeffs.Q_minus == pytest.approx(-1j, abs=1e-12)

    def test_constant_susceptibility_has_no_first_order_terms(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        coeffs = extract_coeffs(model, jet, RectifyMap(model, jet, 3, domain_radius=0.1), nu=3, sigma=1)
        assert all(abs(a) < 1e-10 for a in coeffs.a1(1))
        assert all(abs(a) < 1e-10 for a in coeffs.a1(-1))

    def test_weighted_susceptibility_value(self):
        model = make_synthetic({"family": "2-cos"}, SyntheticSusceptibility(q_plus=1j, s=0.5))
        jet = jet_at(model, 1, PI / 3)
        coeffs = extract_coeffs(model, jet, RectifyMap(model, jet, 2, domain_radius=0.1))
        # cuatro pesos exp(-0.25)
        assert coeffs.Q_plus == pytest.approx(1j * np.exp(-1.0), abs=1e-12)

    def test_instantaneous_kernel_quintic(self):
        model = make_synthetic({"family": "2-cos"}, SyntheticSusceptibility(q_plus=1j, q5=0.3j))
        jet = jet_at(model, 1, PI / 3)
        coeffs = extract_coeffs(model, jet, RectifyMap(model, jet, 2, domain_radius=0.1))
        assert coeffs.delta1[1] == 0
        assert coeffs.delta2[1] == 0
        assert coeffs.delta5(1) == pytest.approx(coeffs.q5[1])
        assert coeffs.q5[1] == pytest.approx(3j, abs=1e-12)

    def test_kernel_override_adds_memory(self):
        model = make_synthetic({"family": "2-cos"}, SyntheticSusceptibility(q_plus=1j))
        jet = jet_at(model, 1, PI / 3)
        rect = RectifyMap(model, jet, 2, domain_radius=0.1)
        coeffs = extract_coeffs(model, jet, rect, chi_kernel=ExponentialKernel(2.0))
        assert abs(coeffs.delta1[1]) > 0.0
        assert coeffs.delta5(1) != pytest.approx(coeffs.q5[1])

    def test_alpha_normalization(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        coeffs = extract_coeffs(model, jet, RectifyMap(model, jet, 2), alpha=0.01)
        assert coeffs.alpha_pi == pytest.approx(0.03 * (2.0 * PI) ** 2)
        assert coeffs.with_alpha(ALPHA_UNIDAD).alpha_pi == pytest.approx(1.0)

    def test_invalid_orders(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        rect = RectifyMap(model, jet, 2)
        with pytest.raises(PreconditionException):
            extract_coeffs(model, jet, rect, nu=2, sigma=1)
        with pytest.raises(PreconditionException):
            extract_coeffs(model, jet, rect, nu=5)

    def test_mismatched_jet(self):
        model = make_synthetic({"family": "2-cos"})
        rect = RectifyMap(model, jet_at(model, 1, PI / 3), 2)
        with pytest.raises(PreconditionException):
            extract_coeffs(model, jet_at(model, 1, 1.0), rect)

    def test_short_jet_rejected(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        rect = RectifyMap(model, jet, 2)
        corto = replace(jet, derivs=jet.derivs[:3])
        extract_coeffs(model, corto, rect, nu=2)
        with pytest.raises(PreconditionException) as exc_info:
            extract_coeffs(model, corto, rect, nu=3)
        assert exc_info.value.context["derivs"] == 3

    def test_symbol_and_truncation(self):
        coeffs = nls_coefficients((1.0, 0.5, 0.25, 0.125), 1j, 0.0)
        assert float(coeffs.symbol(1, 2.0)) == pytest.approx(1.0 + 1.0 + 1.0 + 1.0)
        assert float(coeffs.symbol(-1, 2.0)) == pytest.approx(-(1.0 - 1.0 + 1.0 - 1.0))
        assert coeffs.truncated(nu=2).gammas == (1.0, 0.5, 0.25)
        assert float(coeffs.symbol(1, 2.0, nu=2)) == pytest.approx(3.0)


@pytest.mark.unit
class TestOrderSpec:
    """Selección de términos"""

    def test_from_mapping(self):
        order = OrderSpec.from_any({"nu": 3, "sigma": 1, "quintic": True})
        assert order == OrderSpec(3, 1, True)
        assert OrderSpec.from_any(None) == OrderSpec()

    def test_orders_above_coefficients(self, grid):
        state = initial_state(grid, _gauss(grid))
        with pytest.raises(PreconditionException):
            integrate_enls(_soliton_coeffs(), state, {"nu": 3})


@pytest.mark.integration
class TestIntegrateEnls:
    """Integración de la ecuación de envolvente"""

    def test_linear_gaussian(self, grid):
        coeffs = nls_coefficients((0.0, 0.0, 0.5), 1j, 0.0)
        final = integrate_enls(coeffs, initial_state(grid, _gauss(grid)), t_end=1.0, dt=0.1)
        centre = grid.n_points // 2
        assert abs(final.z_plus[centre]) == pytest.approx(2.0 ** -0.25, abs=1e-10)
        exact = np.exp(-grid.x**2 / (2.0 * (1.0 + 1j))) / np.sqrt(1.0 + 1j)
        assert np.max(np.abs(final.z_plus - exact)) < 1e-10

    def test_soliton_is_stationary(self, grid):
        coeffs = _soliton_coeffs()
        amplitude = soliton_amplitude(0.5, coeffs.alpha_pi, 1.0, 1.0)
        assert amplitude == pytest.approx(1.0)
        state = initial_state(grid, amplitude / np.cosh(grid.x) + 0j)
        final = integrate_enls(coeffs, state, t_end=1.0, dt=0.01)
        assert abs(final.peak() - amplitude) <= 1e-3
        assert final.diagnostics["norm_drift"] <= 1e-8
        exact = amplitude / np.cosh(grid.x) * np.exp(0.5j)
        assert np.max(np.abs(final.z_plus - exact)) < 1e-3

    def test_conjugation_closure(self, grid):
        final = integrate_enls(_soliton_coeffs(), initial_state(grid, _gauss(grid)), t_end=1.0, dt=0.05)
        assert final.diagnostics["conjugation_defect"] <= 1e-10
        assert final.conjugation_defect() <= 1e-10

    def test_strang_second_order(self, grid):
        coeffs = _soliton_coeffs()
        state = initial_state(grid, _gauss(grid))
        reference = integrate_enls(coeffs, state, t_end=1.0, dt=0.0025, method="ifrk4")
        steps = np.array([0.1, 0.05, 0.025])
        errors = [
            np.max(np.abs(integrate_enls(coeffs, state, t_end=1.0, dt=h, phase_limit=0.5).z_plus - reference.z_plus))
            for h in steps
        ]
        assert _slope(steps, errors) == pytest.approx(2.0, abs=0.3)

    def test_lawson_matches_strang(self, grid):
        coeffs = _soliton_coeffs()
        state = initial_state(grid, _gauss(grid))
        a = integrate_enls(coeffs, state, t_end=1.0, dt=0.01, method="ifrk4")
        b = integrate_enls(coeffs, state, t_end=1.0, dt=0.01, method="strang")
        assert np.max(np.abs(a.z_plus - b.z_plus)) < 1e-3

    @pytest.mark.parametrize("frame,tol", [("rotating", 1e-10), ("comoving", 1e-8)])
    def test_frames_agree(self, grid, frame, tol):
        coeffs = nls_coefficients((1.5, 0.8, 0.5), 1j, ALPHA_UNIDAD)
        lab = integrate_enls(coeffs, initial_state(grid, _gauss(grid)), t_end=1.0, dt=0.05)
        moved = integrate_enls(coeffs, initial_state(grid, _gauss(grid), frame=frame), t_end=1.0, dt=0.05)
        assert moved.frame == frame
        assert np.max(np.abs(moved.in_frame("lab").z_plus - lab.z_plus)) < tol
        xi = np.linspace(-1.0, 1.0, 7)
        assert np.allclose(moved.spectrum_at(1, xi, "lab"), lab.spectrum_at(1, xi), atol=tol)

    def test_snapshots(self, grid):
        final = integrate_enls(_soliton_coeffs(), initial_state(grid, _gauss(grid)), t_end=1.0, dt=0.05,
                               snapshot_times=(0.0, 0.5))
        assert [s.t for s in final.snapshots] == [0.0, 0.5]
        assert final.t == 1.0
        assert final.diagnostics["steps"] == 20

    def test_step_rejection(self, grid):
        state = initial_state(grid, 1.0 / np.cosh(grid.x) + 0j)
        with pytest.raises(StepRejectedException):
            integrate_enls(_soliton_coeffs(), state, t_end=1.0, dt=0.5)
        final = integrate_enls(_soliton_coeffs(), state, t_end=1.0, dt=0.5, refinement=10)
        assert final.diagnostics["refinement"] == 10

    def test_resolution_check(self):
        coarse = EnvelopeGrid(length=40.0, n_points=64)
        with pytest.raises(PreconditionException):
            integrate_enls(_soliton_coeffs(), initial_state(coarse, _gauss(coarse)), beta=1.0)

    def test_unknown_method(self, grid):
        with pytest.raises(ValidationException):
            integrate_enls(_soliton_coeffs(), initial_state(grid, _gauss(grid)), method="euler")

    def test_quintic_reduction_without_memory(self, grid):
        coeffs = replace(_soliton_coeffs(), q5={1: 0.2j, -1: -0.2j})
        final = integrate_enls(coeffs, initial_state(grid, _gauss(grid)), {"quintic": True}, t_end=0.5, dt=0.01)
        assert final.diagnostics["rational_residual"] == pytest.approx(0.0, abs=1e-12)

    def test_rational_residual_direct(self, grid):
        coeffs = replace(_soliton_coeffs(), q5={1: 0.2j, -1: -0.2j})
        state = initial_state(grid, _gauss(grid, amplitude=2.0))
        assert rational_form_residual(coeffs, state) == pytest.approx(0.0, abs=1e-12)

    def test_quintic_reduction_with_memory(self, grid):
        small = alpha_pi(1e-4)
        coeffs = replace(
            _soliton_coeffs(), alpha_pi=small, delta1={1: 0.3j, -1: -0.3j}, delta2={1: 0.1, -1: 0.1},
        )
        final = integrate_enls(coeffs, initial_state(grid, _gauss(grid)), {"quintic": True}, t_end=0.5, dt=0.05)
        # el resto es de orden alpha_pi**3
        assert 0.0 < final.diagnostics["rational_residual"] < 10.0 * small**3

    def test_ramped_linear_source(self, grid):
        coeffs = nls_coefficients((0.0, 0.0, 0.5), 1j, 0.0)
        h_hat = {1: grid.fourier(_gauss(grid)), -1: grid.fourier(_gauss(grid))}
        source = LinearRampSource(coeffs, grid, h_hat, EnvelopeSpec(tau0=0.1), rho=0.01)
        zeros = np.zeros(grid.n_points, dtype=complex)
        final = integrate_enls(coeffs, initial_state(grid, zeros), t_end=20.0, dt=0.1, method="ifrk4", source=source)
        gap = np.max(np.abs(grid.fourier(final.z_plus) - source.linear_response(1, 20.0)))
        assert gap <= 1e-8 * np.max(np.abs(h_hat[1]))


@pytest.mark.integration
class TestBidirectional:
    """Dobletes en k_star y -k_star"""

    K_STAR = PI / 3

    def _pair(self, grid, gammas=(1.5, 0.0, 0.5), delta=0j):
        plus = replace(
            nls_coefficients(gammas, 1j, ALPHA_UNIDAD, k_star=self.K_STAR),
            delta_cross={1: complex(delta), -1: np.conj(complex(delta))},
        )
        minus = replace(plus, k_star=-self.K_STAR)
        states = (
            initial_state(grid, _gauss(grid), frame="rotating"),
            initial_state(grid, _gauss(grid, amplitude=0.5, width=1.5), frame="rotating"),
        )
        return plus, minus, states

    def test_decoupled_without_cross_coefficient(self, grid):
        plus, minus, states = self._pair(grid)
        a, b = integrate_bidirectional(plus, minus, states, t_end=1.0, dt=0.05)
        alone_a = integrate_enls(plus, states[0], t_end=1.0, dt=0.05, method="ifrk4")
        alone_b = integrate_enls(minus, states[1], t_end=1.0, dt=0.05, method="ifrk4")
        assert np.max(np.abs(a.z_plus - alone_a.z_plus)) <= 1e-10
        assert np.max(np.abs(b.z_plus - alone_b.z_plus)) <= 1e-10
        assert a.diagnostics["coupling_integral"] == 0.0

    def test_switch_off_coupling(self, grid):
        plus, minus, states = self._pair(grid, delta=0.5)
        a, _ = integrate_bidirectional(plus, minus, states, t_end=1.0, dt=0.05, coupling=False)
        alone = integrate_enls(plus, states[0], t_end=1.0, dt=0.05, method="ifrk4")
        assert np.max(np.abs(a.z_plus - alone.z_plus)) <= 1e-10

    def test_conjugation_with_coupling(self, grid):
        plus, minus, states = self._pair(grid, delta=0.5 + 0.2j)
        a, b = integrate_bidirectional(plus, minus, states, t_end=1.0, dt=0.02)
        assert a.diagnostics["conjugation_defect"] <= 1e-10
        assert b.diagnostics["conjugation_defect"] <= 1e-10
        assert a.diagnostics["coupling_integral"] > 0.0

    def test_rotation_suppresses_cross_term(self, grid):
        slow = integrate_bidirectional(*self._pair(grid, gammas=(0.0, 0.0, 0.5), delta=0.5), t_end=2.0, dt=0.01)
        fast = integrate_bidirectional(*self._pair(grid, gammas=(20.0, 0.0, 0.5), delta=0.5), t_end=2.0, dt=0.01)
        assert fast[0].diagnostics["coupling_integral"] < 0.2 * slow[0].diagnostics["coupling_integral"]

    def test_carriers_must_be_opposite(self, grid):
        plus, _, states = self._pair(grid)
        with pytest.raises(PreconditionException):
            integrate_bidirectional(plus, plus, states)

    def test_states_must_share_frame(self, grid):
        plus, minus, states = self._pair(grid)
        with pytest.raises(PreconditionException):
            integrate_bidirectional(plus, minus, (states[0], replace(states[1], frame="lab")))

    def test_comoving_not_supported(self, grid):
        plus, minus, states = self._pair(grid)
        moved = tuple(replace(s, frame="comoving") for s in states)
        with pytest.raises(ValidationException):
            integrate_bidirectional(plus, minus, moved)


@pytest.mark.integration
class TestSourceForm:
    """Forma con fuente"""

    GRID = EnvelopeGrid(length=100.0, n_points=256)

    def _run(self):
        coeffs = nls_coefficients((0.0, 0.0, 0.1), 1j, 0.01 * ALPHA_UNIDAD)
        return coeffs, initial_state(self.GRID, _gauss(self.GRID, width=5.0))

    def test_equivalence_after_ramp(self):
        coeffs, run = self._run()
        result = to_source_form(coeffs, run, EnvelopeSpec(tau0=0.1), rho=0.005)
        assert result.residual_after_ramp <= 1e-8
        assert result.start_residual == 0.0
        assert result.times[-1] == pytest.approx(40.0)
        assert np.max(np.abs(result.v.z_plus - result.z.z_plus)) <= 1e-8

    def test_unresolved_ramp_fails(self):
        coeffs, run = self._run()
        with pytest.raises(NumericalException):
            to_source_form(coeffs, run, EnvelopeSpec(tau0=0.1), rho=0.5, dt=0.5)


@pytest.mark.unit
class TestReduceScaling:
    """Escalas reducidas"""

    COEFFS = replace(nls_coefficients((1.0, 0.5, 0.5, 0.1, 0.01), 1j, 1e-3), sigma=2)

    def test_weak_dispersion_is_transport(self):
        reduced = reduce_scaling(self.COEFFS, {"varkappa1": 1})
        assert reduced.kind == "transport"
        assert not reduced.keeps("gamma2")
        assert not reduced.keeps("gamma3")
        assert reduced.keeps("gamma1")
        assert reduced.keeps("Q")
        assert reduced.order_spec.nu == 1

    def test_classical_nls(self):
        reduced = reduce_scaling(self.COEFFS, 2.0)
        assert reduced.kind == "nls"
        assert reduced.keeps("gamma2")
        assert reduced.keeps("Q")
        assert reduced.order_spec == OrderSpec(2, 0, False)

    def test_strong_dispersion_drops_coupling(self):
        reduced = reduce_scaling(self.COEFFS, {"varkappa1": 3})
        dropped = {t.name: t for t in reduced.dropped}
        assert dropped["delta_cross"].absolute_order == 6.0
        assert dropped["delta5"].absolute_order == 6.0
        assert reduced.keeps("gamma3")
        assert not reduced.coupling
        assert reduced.apply(self.COEFFS).delta_cross == {1: 0j, -1: 0j}

    def test_finer_accuracy_keeps_more(self):
        reduced = reduce_scaling(self.COEFFS, {"varkappa1": 2}, accuracy=2.5)
        assert reduced.keeps("gamma4")
        assert reduced.keeps("a1")
        assert reduced.keeps("delta5")
        assert reduced.kind == "enls"

    def test_to_dict_tags_orders(self):
        entries = reduce_scaling(self.COEFFS, 2).to_dict()["dropped"]
        assert all(e["accumulated_order"] >= 1.0 for e in entries)

    def test_invalid_exponent(self):
        with pytest.raises(ValidationException):
            reduce_scaling(self.COEFFS, {"varkappa1": 0})


@pytest.mark.unit
class TestTransport:
    """Solución exacta de la ecuación de transporte"""

    def test_grid_shift_and_phase(self, grid):
        gamma1 = 2.0 * grid.dx
        coeffs = nls_coefficients((0.3, gamma1), 1j, ALPHA_UNIDAD)
        z0 = _gauss(grid)
        final = integrate_transport(coeffs, initial_state(grid, z0), 1.0)
        shifted = np.roll(z0, 2)
        expected = shifted * np.exp(1j * np.abs(shifted) ** 2 - 0.3j)
        assert np.max(np.abs(final.z_plus - expected)) < 1e-10

    def test_matches_split_step(self, grid):
        coeffs = nls_coefficients((0.0, 0.3), -0.2 + 1j, ALPHA_UNIDAD)
        state = initial_state(grid, _gauss(grid, width=2.0))
        exact = integrate_transport(coeffs, state, 1.0)
        numeric = integrate_enls(coeffs, state, {"nu": 1}, t_end=1.0, dt=0.01)
        assert np.max(np.abs(exact.z_plus - numeric.z_plus)) < 1e-6

    def test_requires_lab_frame(self, grid):
        with pytest.raises(PreconditionException):
            integrate_transport(_soliton_coeffs(), initial_state(grid, _gauss(grid), frame="rotating"), 1.0)


@pytest.mark.unit
class TestRescale:
    """Variables escaladas"""

    def test_coefficients(self):
        coeffs = replace(_soliton_coeffs(), q5={1: 0.2j, -1: -0.2j})
        scaled = rescale_coefficients(coeffs, beta=0.1, rho=0.01)
        assert scaled.gammas == pytest.approx((0.0, 0.0, 0.5))
        assert scaled.alpha_pi == pytest.approx(100.0)
        assert scaled.q5[1] == pytest.approx(0.002j)

    def test_invalid_scales(self):
        with pytest.raises(ValidationException):
            rescale_coefficients(_soliton_coeffs(), beta=0.0, rho=0.1)

    def test_scaled_run_matches(self, grid):
        beta, rho = 0.2, 0.05
        coeffs = nls_coefficients((0.7, 0.4, 0.5), 1j, ALPHA_UNIDAD)
        state = initial_state(grid, _gauss(grid))
        direct = integrate_enls(coeffs, state, t_end=1.0, dt=0.05)
        scaled_coeffs, scaled_state = rescale(coeffs, state, beta, rho)
        assert scaled_state.grid.length == pytest.approx(beta * grid.length)
        scaled = integrate_enls(scaled_coeffs, scaled_state, t_end=rho * 1.0, dt=rho * 0.05)
        back = unscale(scaled, beta, rho, coeffs.gammas)
        assert back.t == pytest.approx(1.0)
        assert back.grid.length == pytest.approx(grid.length)
        assert np.max(np.abs(back.z_plus - direct.z_plus)) <= 1e-9


@pytest.mark.integration
class TestFirstNonlinearResponse:
    """Primera respuesta no lineal"""

    def test_matches_small_alpha_difference(self, grid):
        alpha = 1e-5
        coeffs = nls_coefficients((0.0, 0.0, 0.5), 1j, alpha)
        z0 = _gauss(grid)
        h_hat = {1: grid.fourier(z0), -1: grid.fourier(np.conj(z0))}
        response = FirstNonlinearResponse(coeffs, grid, h_hat, dt=0.05)
        state = initial_state(grid, z0)
        nonlinear = integrate_enls(coeffs, state, t_end=2.0, dt=0.05, method="ifrk4")
        linear = integrate_enls(coeffs, state, alpha=0.0, t_end=2.0, dt=0.05, method="ifrk4")
        predicted = alpha * response.spectrum(1, 2.0)
        measured = grid.fourier(nonlinear.z_plus - linear.z_plus)
        assert np.max(np.abs(measured - predicted)) <= 1e-2 * np.max(np.abs(predicted))

    def test_vanishes_at_start(self, grid):
        coeffs = _soliton_coeffs()
        h_hat = {1: grid.fourier(_gauss(grid)), -1: grid.fourier(_gauss(grid))}
        response = FirstNonlinearResponse(coeffs, grid, h_hat)
        assert np.all(response.slow(1, 0.0) == 0)
        assert response.describe()["nu"] == 2
