"""
Tests del paquete dominio.modelo: bandas sintéticas, solver de Hill,
susceptibilidades, jets y genericidad.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dominio.exceptions import (
    ConvergenceException,
    DegenerateBandException,
    PreconditionException,
    ValidationException,
)
from dominio.modelo import (
    ExponentialKernel,
    FactoryDispersion,
    SyntheticSusceptibility,
    check_generic,
    hill_bands,
    jet_at,
    make_synthetic,
)
from dominio.modelo.diferencias import central_derivative, partial_derivatives
from dominio.modelo.hill import fourier_coefficients

PI = np.pi


@pytest.fixture(scope="module")
def two_cos():
    return make_synthetic({"family": "2-cos"})


@pytest.fixture(scope="module")
def relativistic():
    return make_synthetic({"family": "sqrt(1+k^2)"})


@pytest.fixture(scope="module")
def free_hill():
    return hill_bands({"constant": 1.0}, n_bands=3, n_k=64)


@pytest.mark.unit
class TestSyntheticFamilies:
    """Familias sintéticas con nombre"""

    def test_two_cos_value(self, two_cos):
        assert two_cos.omega(1, PI / 3) == pytest.approx(1.5, abs=1e-14)

    def test_alias_with_unicode_minus(self):
        model = make_synthetic({"family": "2−cos"})
        assert model.omega(1, 0.0) == pytest.approx(1.0)

    def test_relativistic_value(self, relativistic):
        assert relativistic.omega(1, 1.0) == pytest.approx(1.4142136, abs=1e-7)

    def test_quadratic_alias(self):
        model = make_synthetic({"family": "k^2/2"})
        assert model.omega(1, 2.0) == pytest.approx(2.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=-PI, max_value=PI))
    def test_evenness(self, k):
        for spec in ({"family": "2-cos"}, {"family": "sqrt(1+k^2)"}, {"family": "cos-poly", "params": {"coeffs": [3.0, -1.0, 0.5]}}):
            model = make_synthetic(spec)
            assert abs(model.omega(1, k) - model.omega(1, -k)) <= 1e-12

    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationException) as info:
            make_synthetic({"family": "tan"})
        assert info.value.context["field"] == "model.family"

    def test_odd_polynomial_rejected(self):
        with pytest.raises(ValidationException) as info:
            make_synthetic({"family": "poly", "params": {"coeffs": [0.0, 1.0, 0.5]}})
        assert "omega_n(-k)" in info.value.context["validation_rule"]

    def test_unordered_bands_rejected(self):
        spec = {"family": "2-cos", "params": {"a": 5.0}, "extra_bands": [{"family": "2-cos"}]}
        with pytest.raises(ValidationException):
            make_synthetic(spec)

    def test_stacked_bands(self):
        spec = {"family": "2-cos", "extra_bands": [{"family": "2-cos", "params": {"a": 6.0, "b": -0.5}}]}
        model = make_synthetic(spec)
        table = model.band_table(np.linspace(-PI, PI, 11))
        assert table.shape == (11, 2)
        assert np.all(table[:, 1] >= table[:, 0])

    def test_factory_builds_synthetic(self):
        model = FactoryDispersion.obtener_modelo({"family": "2-cos", "params": {"a": 2.0, "b": 1.0}})
        assert model.provenance == "synthetic"


@pytest.mark.unit
class TestHillSolver:
    """Solver de ondas planas del operador de Hill"""

    def test_fourier_coefficients_of_half_cell(self):
        coeffs = fourier_coefficients({"piecewise": [[0.0, 1.0], [0.5, 3.0]]}, 2)
        assert coeffs[2] == pytest.approx(2.0)
        assert abs(coeffs[3]) == pytest.approx(2.0 / PI)
        assert coeffs[4] == pytest.approx(0.0, abs=1e-14)

    def test_constant_potential_folded_free_bands(self, free_hill):
        k = np.linspace(-PI, PI, 33)
        assert np.max(np.abs(free_hill.omega(1, k) - np.abs(k))) <= 1e-8
        assert np.max(np.abs(free_hill.omega(2, k) - (2 * PI - np.abs(k)))) <= 1e-8

    def test_evenness_on_grid(self):
        model = hill_bands({"piecewise": [[0.0, 1.0], [0.3, 4.0]]}, n_bands=3, n_k=32)
        k = model.k_grid
        for n in (1, 2, 3):
            assert np.max(np.abs(model.omega(n, k) - model.omega(n, -k))) <= 1e-12

    def test_band_even_off_grid(self):
        model = hill_bands({"piecewise": [[0.0, 1.0], [0.3, 4.0]]}, n_bands=2, n_k=16)
        k = np.array([0.137, 1.9, 2.71, 3.05])
        for n in (1, 2):
            np.testing.assert_array_equal(model.omega(n, k), model.omega(n, -k))

    def test_degenerate_points_flagged(self, free_hill):
        # bandas 1 y 2 se tocan en el borde de la zona
        points = free_hill.metadata["degenerate_points"]
        assert any(p["band"] == 1 and abs(abs(p["k"]) - PI) < 1e-12 for p in points)

    def test_quartic_overlap_of_constant_modes(self):
        model = hill_bands({"constant": 2.0}, n_bands=2, n_k=16, coupling=(0.0, 1.0))
        q = model.mode_overlap((1, 1, 1, -1), (1, 1, 1, 1), (0.0, 0.0, 0.0, 0.0))
        assert complex(q) == pytest.approx(0.25j, abs=1e-10)

    def test_unit_weight_overlap(self):
        model = hill_bands({"constant": 2.0}, n_bands=2, n_k=16, weight="unit")
        q = model.mode_overlap((1, 1, 1, -1), (1, 1, 1, 1), (0.0, 0.0, 0.0, 0.0))
        assert complex(q) == pytest.approx(1j, abs=1e-10)

    def test_overlap_reality(self):
        model = hill_bands({"piecewise": [[0.0, 1.0], [0.5, 2.0]]}, n_bands=2, n_k=16)
        ks = (0.4, 0.3, 0.2, -0.1)
        plus = complex(model.mode_overlap((1, 1, 1, -1), (1, 1, 1, 1), ks))
        minus = complex(model.mode_overlap((-1, -1, -1, 1), (1, 1, 1, 1), tuple(-k for k in ks)))
        assert minus == pytest.approx(plus.conjugate(), abs=1e-10)

    def test_non_positive_potential_rejected(self):
        with pytest.raises(ValidationException):
            hill_bands({"piecewise": [[0.0, 1.0], [0.5, -3.0]]}, n_bands=1, n_k=16)

    def test_small_grid_rejected(self):
        with pytest.raises(ValidationException):
            hill_bands({"constant": 1.0}, n_bands=1, n_k=8)


@pytest.mark.unit
class TestSusceptibility:
    """Susceptibilidades modales sintéticas"""

    def test_origin_slot_permutation(self):
        provider = SyntheticSusceptibility(q_plus=0.3 + 1j, s=0.7, kernel=ExponentialKernel(c=2.0))
        model = make_synthetic({"family": "2-cos"}, provider)
        bands = (1, 1, 1, 1)
        reference = complex(model.mode_overlap((1, 1, 1, -1), bands, (0.9, 0.2, 0.5, 0.2)))
        for signs, ks in [
            ((1, 1, -1, 1), (0.9, 0.2, 0.2, 0.5)),
            ((1, -1, 1, 1), (0.9, 0.2, 0.2, 0.5)),
            ((1, 1, 1, -1), (0.9, 0.5, 0.2, 0.2)),
        ]:
            assert complex(model.mode_overlap(signs, bands, ks)) == pytest.approx(reference, abs=1e-12)

    def test_reality_of_synthetic_provider(self):
        provider = SyntheticSusceptibility(q_plus=0.3 + 1j, s=0.7, kernel=ExponentialKernel(c=2.0))
        model = make_synthetic({"family": "2-cos"}, provider)
        plus = complex(model.mode_overlap((1, 1, 1, -1), (1, 1, 1, 1), (0.9, 0.3, 0.3, -0.3)))
        minus = complex(model.mode_overlap((-1, -1, -1, 1), (1, 1, 1, 1), (-0.9, -0.3, -0.3, 0.3)))
        assert minus == pytest.approx(plus.conjugate(), abs=1e-12)

    def test_memory_coefficient_of_exponential_kernel(self):
        provider = SyntheticSusceptibility(q_plus=1j, kernel=ExponentialKernel(c=1.0))
        value = provider.value((1, 1, 1, -1), (1, 1, 1, 1), (0.0,) * 4, (0.0, 0.0, 0.0))
        memory = provider.memory_coefficient((1, 1, 1, -1), (1, 1, 1, 1), (0.0,) * 4, (0.0, 0.0, 0.0), 1)
        assert complex(memory) == pytest.approx(-complex(value))

    def test_instantaneous_memory_vanishes(self):
        provider = SyntheticSusceptibility(q_plus=1j)
        memory = provider.memory_coefficient((1, 1, 1, -1), (1, 1, 1, 1), (0.1,) * 4, (1.0, 1.0, -1.0), 2)
        assert complex(memory) == 0.0


@pytest.mark.unit
class TestDerivatives:
    """Diferencias centrales con extrapolación de Richardson"""

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_central_derivative_of_cosine(self, order):
        value, error = central_derivative(np.cos, 0.4, order, 1e-3 * 2 * PI)
        exact = [np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin, np.cos][order](0.4)
        assert value.real == pytest.approx(exact, abs=1e-6)
        assert error < 1e-5

    def test_partial_derivatives_of_product(self):
        value, grad, hess = partial_derivatives(lambda x: x[0] * x[1] ** 2, [1.0, 2.0], 2, 1e-3)
        assert value == pytest.approx(4.0)
        assert grad == pytest.approx(np.array([4.0, 4.0]), abs=1e-9)
        assert hess[0, 1] == pytest.approx(4.0, abs=1e-6)
        assert hess[1, 1] == pytest.approx(2.0, abs=1e-6)


@pytest.mark.unit
class TestJets:
    """Jets de Taylor de una banda"""

    def test_relativistic_jet(self, relativistic):
        jet = jet_at(relativistic, 1, 1.0)
        assert jet.derivs[:3] == pytest.approx((1.4142136, 0.7071068, 0.3535534), abs=1e-7)

    def test_quadratic_jet_is_exact(self):
        jet = jet_at(make_synthetic({"family": "k^2/2"}), 1, 1.0)
        assert jet.derivs == pytest.approx((0.5, 1.0, 1.0, 0.0, 0.0), abs=1e-15)

    def test_jet_parity(self, two_cos):
        plus = jet_at(two_cos, 1, PI / 3)
        minus = jet_at(two_cos, 1, -PI / 3)
        for j in range(5):
            assert minus.derivs[j] == pytest.approx((-1) ** j * plus.derivs[j], abs=1e-8)
        assert minus.derivs == pytest.approx(plus.mirrored().derivs)

    def test_grid_band_matches_analytic(self, free_hill):
        jet = jet_at(free_hill, 2, 1.0, order=2)
        assert not jet.analytic
        assert jet.derivs[0] == pytest.approx(2 * PI - 1.0, abs=1e-8)
        assert abs(jet.derivs[1] + 1.0) <= jet.errors[1] + 1e-8
        assert abs(jet.derivs[2]) <= jet.errors[2] + 1e-6

    def test_degenerate_band_rejected(self, free_hill):
        with pytest.raises(DegenerateBandException):
            jet_at(free_hill, 2, 0.0, order=2)

    def test_stencil_outside_zone_rejected(self, free_hill):
        with pytest.raises(PreconditionException):
            jet_at(free_hill, 1, 3.13, order=2)

    def test_tight_tolerance_raises_convergence(self):
        model = hill_bands({"piecewise": [[0.0, 1.0], [0.5, 9.0]]}, n_bands=2, n_k=16)
        with pytest.raises(ConvergenceException):
            jet_at(model, 1, 1.0, order=4, tolerance=1e-30)

    def test_boundary_k_star_rejected(self, two_cos):
        with pytest.raises(PreconditionException):
            jet_at(two_cos, 1, PI)


@pytest.mark.unit
class TestGenericity:
    """Condiciones de genericidad del punto portador"""

    def test_two_cos_at_third_of_pi(self, two_cos):
        report = check_generic(two_cos, 1, PI / 3)
        assert report.generic
        assert report.margins["third_harmonic"] == pytest.approx(1.5)

    def test_zero_k_star_fails_velocity(self, two_cos):
        report = check_generic(two_cos, 1, 0.0)
        assert not report.verdicts["velocity"]
        assert "velocity" in report.failed()

    def test_half_pi_passes_modpi(self, two_cos):
        report = check_generic(two_cos, 1, PI / 2)
        assert report.verdicts["modpi"]

    def test_two_band_default_is_generic(self):
        model = make_synthetic(
            {"family": "2-cos", "extra_bands": [{"family": "2-cos", "params": {"a": 6.0, "b": -0.5}}]}
        )
        report = check_generic(model, 1, PI / 3)
        assert report.generic
        assert set(report.margins) >= {"band_gap", "velocity_gap"}
