"""
Tests de las variables rectificantes.
"""

import numpy as np
import pytest

from dominio.exceptions import PreconditionException
from dominio.modelo import jet_at, make_synthetic
from dominio.rectificacion import RectifyMap, gamma_poly, y_forward, y_inverse

PI = np.pi

FAMILIES = [
    ({"family": "sqrt(1+k^2)"}, 1.0),
    ({"family": "2-cos"}, PI / 3),
    ({"family": "cos-poly", "params": {"coeffs": [3.0, -1.0, 0.5]}}, 1.2),
]


def _rect(spec, k_star, nu, radius=0.1):
    model = make_synthetic(spec)
    return RectifyMap(model, jet_at(model, 1, k_star), nu, domain_radius=radius)


def _slope(x, y):
    return np.polyfit(np.log10(x), np.log10(y), 1)[0]


@pytest.mark.unit
class TestGammaPoly:
    """Polinomio de Taylor de la banda"""

    def test_relativistic_second_order(self):
        model = make_synthetic({"family": "sqrt(1+k^2)"})
        jet = jet_at(model, 1, 1.0)
        assert float(gamma_poly(jet, 2, 0.1)) == pytest.approx(1.4866921, abs=1e-7)

    def test_constant_term(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        assert float(gamma_poly(jet, 4, 0.0)) == pytest.approx(1.5)

    def test_quadratic_family_is_its_polynomial(self):
        model = make_synthetic({"family": "k^2/2"})
        jet = jet_at(model, 1, 1.0)
        eta = np.linspace(-0.5, 0.5, 11)
        assert np.allclose(gamma_poly(jet, 2, eta), model.omega(1, 1.0 + eta), atol=1e-14)


@pytest.mark.unit
class TestInverseMap:
    """Mapa inverso Y^{-1}"""

    def test_first_order_relativistic(self):
        model = make_synthetic({"family": "sqrt(1+k^2)"})
        jet = jet_at(model, 1, 1.0)
        xi = float(y_inverse(model, jet, 1, 0.1))
        assert xi == pytest.approx(0.1023797, abs=1e-7)
        assert float(gamma_poly(jet, 1, xi)) == pytest.approx(float(model.omega(1, 1.1)), abs=1e-14)

    def test_quadratic_family_identity(self):
        model = make_synthetic({"family": "k^2/2"})
        jet = jet_at(model, 1, 1.0)
        eta = np.linspace(-0.1, 0.1, 21)
        assert np.allclose(y_inverse(model, jet, 2, eta), eta, atol=1e-14)

    def test_radical_reduces_to_linear_map(self):
        model = make_synthetic({"family": "2-cos"})
        eta = np.linspace(-0.1, 0.1, 9)
        for eps in (1e-8, 1e-10):
            jet = jet_at(model, 1, PI / 2 - eps)
            gap = np.max(np.abs(y_inverse(model, jet, 2, eta) - y_inverse(model, jet, 1, eta)))
            assert gap <= 1e-9

    @pytest.mark.parametrize("spec,k_star", FAMILIES)
    @pytest.mark.parametrize("nu", [1, 2, 3, 4])
    def test_closeness_to_identity(self, spec, k_star, nu):
        rect = _rect(spec, k_star, nu)
        low = 1e-3 if nu <= 2 else 2e-2
        eta = np.geomspace(low, 1e-1, 8)
        defect = np.abs(rect.inverse(eta) - eta)
        assert _slope(eta, defect) == pytest.approx(nu + 1, abs=0.3)

    def test_identity_switch(self):
        rect = _rect({"family": "2-cos"}, PI / 3, 3)
        switched = RectifyMap(rect.model, rect.jet, 3, identity=True)
        eta = np.array([-0.05, 0.02])
        assert np.array_equal(switched.inverse(eta), eta)
        assert np.array_equal(switched.forward(eta), eta)

    def test_domain_violation(self):
        rect = _rect({"family": "2-cos"}, PI / 3, 2)
        with pytest.raises(PreconditionException):
            rect.inverse(0.2)

    def test_negative_discriminant(self):
        # el término cuártico lleva la banda por debajo del mínimo de la parábola
        model = make_synthetic({"family": "poly", "params": {"coeffs": [0.0, 0.0, 0.5, 0.0, 2.0]}})
        jet = jet_at(model, 1, 0.05)
        with pytest.raises(PreconditionException) as info:
            y_inverse(model, jet, 2, np.array([-0.05]), radius=0.1)
        assert "discriminant" in info.value.context["invariant"]

    def test_zero_velocity_rejected(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, 0.0)
        with pytest.raises(PreconditionException):
            y_inverse(model, jet, 1, 0.05)


@pytest.mark.unit
class TestForwardMap:
    """Mapa directo Y y su residuo"""

    @pytest.mark.parametrize("spec,k_star", FAMILIES)
    @pytest.mark.parametrize("nu", [1, 2, 3, 4])
    def test_rectification_residual(self, spec, k_star, nu):
        rect = _rect(spec, k_star, nu)
        xi = np.linspace(-0.1, 0.1, 41)
        assert np.max(np.abs(rect.residual(xi))) <= 1e-10

    def test_round_trip(self):
        rect = _rect({"family": "sqrt(1+k^2)"}, 1.0, 3)
        eta = np.linspace(-0.09, 0.09, 19)
        assert np.max(np.abs(rect.forward(rect.inverse(eta)) - eta)) <= 1e-10

    def test_fixed_point(self):
        rect = _rect({"family": "2-cos"}, PI / 3, 4)
        assert float(rect.forward(0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_two_cos_residual_at_point(self):
        model = make_synthetic({"family": "2-cos"})
        jet = jet_at(model, 1, PI / 3)
        eta = float(y_forward(model, jet, 2, 0.05))
        assert abs(float(model.omega(1, PI / 3 + eta)) - float(gamma_poly(jet, 2, 0.05))) <= 1e-10

    def test_signed_maps_through_doublet(self):
        rect = _rect({"family": "2-cos"}, PI / 3, 3)
        xi = np.linspace(-0.08, 0.08, 9)
        minus = rect.signed_forward(-1, xi)
        assert np.allclose(minus, -rect.forward(-xi), atol=1e-12)
        # omega(-k_star + Y_-(xi)) = gamma_nu(-xi)
        values = rect.model.omega(1, -PI / 3 + minus)
        assert np.allclose(values, rect.gamma(-xi), atol=1e-12)

    def test_residual_sweep_rows(self):
        rows = _rect({"family": "2-cos"}, PI / 3, 2).residual_sweep(11)
        assert len(rows) == 11
        assert max(abs(r[2]) for r in rows) <= 1e-10
