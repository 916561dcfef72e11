import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptberry import (
    MField,
    ParamPoint,
    TangentVector,
    build_eta,
    build_h,
    build_hamiltonian,
    build_lambda,
    build_metric,
    build_v,
    eigensystem,
)
from ptberry.hermitian_map import eta_field, eta_prefactor, hermitian_picture

from .conftest import random_valid_points
from .test_pt_model import points

H_FD = 1e-6


class TestEta:
    @settings(max_examples=300)
    @given(points(max_ratio=0.99))
    def test_square_root_of_metric(self, X):
        eta, eta_inv = build_eta(X)
        scale = abs(X.a) / X.root
        assert np.allclose(eta @ eta, build_metric(X), atol=1e-12 * scale)
        assert np.allclose(eta, eta.conj().T, atol=1e-14 * scale)
        assert np.linalg.eigvalsh(eta).min() > 0
        assert np.linalg.det(eta) == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(eta @ eta_inv, np.eye(2), atol=1e-10)

    def test_matches_principal_square_root(self):
        scipy_linalg = pytest.importorskip("scipy.linalg")
        for X in random_valid_points(2, 30, 0.99):
            eta, _ = build_eta(X)
            assert np.allclose(eta, scipy_linalg.sqrtm(build_metric(X)), atol=1e-10)

    def test_identity_when_hermitian(self):
        eta, _ = build_eta(ParamPoint(0, 3, 0, 0.4, 1.0))
        assert eta_prefactor(ParamPoint(0, 3, 0, 0.4)) == pytest.approx(0.5)
        assert np.allclose(eta, np.eye(2))


class TestH:
    @settings(max_examples=300)
    @given(points(max_ratio=0.99))
    def test_closed_form_is_similarity_image(self, X):
        h = build_h(X)
        eta, eta_inv = build_eta(X)
        scale = 1 + abs(X.epsilon) + abs(X.a) ** 2 / X.root
        assert np.allclose(eta @ build_hamiltonian(X) @ eta_inv, h, atol=1e-11 * scale)
        assert np.allclose(h, h.conj().T, atol=1e-14 * scale)

    def test_spectrum_matches_h(self):
        for X in random_valid_points(4, 50):
            es = eigensystem(X)
            ev = np.linalg.eigvalsh(build_h(X))
            assert np.allclose(ev, [es.e_minus, es.e_plus], atol=1e-12 * (1 + abs(X.a)))

    def test_eta_maps_eigenvectors(self):
        X = ParamPoint(0.3, 1.2, 0.7, 1.0, 0.5, 0.9)
        es = eigensystem(X)
        eta, _ = build_eta(X)
        h = build_h(X)
        for branch in "+-":
            chi = eta @ es.state(branch)
            assert np.vdot(chi, chi).real == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(h @ chi, es.energy(branch) * chi, atol=1e-12)


class TestV:
    @settings(max_examples=150)
    @given(points(), st.floats(-5, 5), st.floats(-5, 5))
    def test_hermitian(self, X, d_theta, d_phi):
        v = build_v(X, TangentVector(d_theta, d_phi))
        scale = abs(X.a) / X.root * (1 + abs(d_theta) + abs(d_phi))
        assert np.allclose(v, v.conj().T, atol=1e-12 * scale)

    def test_linear_in_velocity(self):
        X = ParamPoint(0, -1.4, 0.6, 0.8, 2.0, 1.3)
        v1, v2 = TangentVector(0.4, -0.2), TangentVector(-1.0, 3.0)
        total = build_v(X, TangentVector(0.4 - 2.0, -0.2 + 6.0))
        assert np.allclose(total, build_v(X, v1) + 2 * build_v(X, v2), atol=1e-13)
        assert np.allclose(build_v(X, TangentVector()), 0)

    def test_vanishes_in_hermitian_limit(self):
        assert np.allclose(build_v(ParamPoint(0, 1, 0, 0.7), TangentVector(1, 1)), 0)

    def test_vanishes_for_compatible_m(self):
        X = ParamPoint(0, 1.0, 0.5, 1.1, 0.3, 0.6)
        eta, eta_inv = build_eta(X)

        def d_eta(dt, dp):
            return (eta_field(X, X.theta + dt, X.phi + dp) - eta_field(X, X.theta - dt, X.phi - dp)) / (2 * H_FD)

        m = MField(eta_inv @ d_eta(H_FD, 0), eta_inv @ d_eta(0, H_FD))
        assert np.allclose(build_v(X, TangentVector(0.7, 1.9), m=m), 0, atol=1e-8)
        assert not np.allclose(build_v(X, TangentVector(0.7, 1.9)), 0, atol=1e-3)

    def test_generates_transformed_dynamics(self):
        # i d/dt (eta psi) = (eta Lambda eta^-1 + i eta_dot eta^-1)(eta psi)
        for X in random_valid_points(9, 20):
            vel = TangentVector(0.8, -1.7)
            eta, eta_inv = build_eta(X)
            plus = eta_field(X, X.theta + vel.d_theta * H_FD, X.phi + vel.d_phi * H_FD)
            minus = eta_field(X, X.theta - vel.d_theta * H_FD, X.phi - vel.d_phi * H_FD)
            eta_dot = (plus - minus) / (2 * H_FD)
            expected = eta @ build_lambda(X, vel) @ eta_inv + 1j * eta_dot @ eta_inv
            scale = (1 + abs(X.epsilon) + abs(X.a)) * abs(X.a) / X.root
            assert np.allclose(build_h(X) + build_v(X, vel), expected, atol=1e-7 * scale)

    def test_bundle(self, example_point):
        pic = hermitian_picture(example_point, TangentVector(0, 1))
        assert np.allclose(pic.eta @ pic.eta_inv, np.eye(2))
        assert np.allclose(pic.h, build_h(example_point))
        assert np.allclose(pic.v, build_v(example_point, TangentVector(0, 1)))
