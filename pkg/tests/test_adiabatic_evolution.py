import numpy as np
import pytest
from scipy.integrate import solve_ivp

from ptberry import (
    EvolutionConfig,
    LoopPath,
    NonAdiabaticError,
    ParamPoint,
    ResolutionError,
    TangentVector,
    adiabaticity_diagnostics,
    connection_analytic,
    evolve_loop,
    integrate,
    unitarity_drift,
)
from ptberry.adiabatic_evolution import (
    eigenvector_gradient,
    hamiltonian_gradient,
    propagate,
)
from ptberry.metric_dynamics import lambda_field
from ptberry.pt_model import build_hamiltonian, eigenvector_field, hamiltonian_field

H_FD = 1e-6


def loop_at(theta0, a=1.0, ratio=0.5, delta=0.0, epsilon=0.0, winding=1):
    X = ParamPoint(epsilon, a, ratio * a, theta0, 0.0, delta)
    return LoopPath.latitude(X, theta0, winding)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(total_time=0, steps=1000), dict(total_time=1, steps=10),
                                        dict(total_time=1, steps=1000, branch="x"),
                                        dict(total_time=1, steps=1000, record_stride=0)])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EvolutionConfig(**kwargs)

    def test_dt(self):
        assert EvolutionConfig(10.0, 1000).dt == pytest.approx(0.01)

    def test_resolution_guard(self):
        loop = loop_at(1.0, epsilon=2.0)
        with pytest.raises(ResolutionError):
            evolve_loop(loop, EvolutionConfig(1000.0, 1000))


class TestPropagator:
    def test_matches_adaptive_reference_solver(self):
        loop = LoopPath.polygon(ParamPoint(0.3, 1.0, 0.6, 1.0, 0.0, 0.8),
                                [(0.6, 0.0), (1.4, 0.3), (1.1, 1.5)])
        cfg = EvolutionConfig(total_time=15.0, steps=6000, record_stride=1000)
        X = loop.base
        psi0 = eigenvector_field(X, 0.6, 0.0, "+")
        traj = integrate(loop, cfg, psi0)

        def rhs(t, y):
            s = t / cfg.total_time
            theta, phi = loop.point(s)
            vt, vp = loop.velocity(s)
            L = lambda_field(X, theta, phi, vt / cfg.total_time, vp / cfg.total_time)
            return -1j * L @ y

        knots = np.concatenate([[0.0], np.cumsum(loop.segment_lengths)]) / loop.length * cfg.total_time
        y = psi0.astype(complex)
        for t0, t1 in zip(knots[:-1], knots[1:]):
            y = solve_ivp(rhs, (t0, t1), y, rtol=1e-12, atol=1e-12, method="DOP853").y[:, -1]
        assert np.allclose(traj.states[-1], y, atol=1e-8)

    def test_record_layout(self):
        cfg = EvolutionConfig(total_time=10.0, steps=1005, record_stride=100)
        traj = integrate(loop_at(1.0), cfg, eigenvector_field(loop_at(1.0).start, 1.0, 0.0, "+"))
        assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(10.0)
        assert len(traj.times) == 1 + 10 + 1
        assert traj.states.shape == (12, 2) and traj.params.shape == (12, 2)
        assert np.allclose(np.diff(traj.times[:-1]), 100 * cfg.dt)

    def test_metric_norm_conserved(self):
        loop = loop_at(1.0, ratio=0.8, delta=1.1)
        report = evolve_loop(loop, EvolutionConfig(200.0, 40_000))
        assert report.unitarity_drift <= 1e-10

    def test_dropping_metric_term_breaks_norm(self):
        loop = loop_at(1.0, ratio=0.8, delta=1.1)
        X = loop.base
        cfg = EvolutionConfig(200.0, 40_000)
        psi0 = eigenvector_field(X, 1.0, 0.0, "+")

        def h_only(theta, phi, v_theta, v_phi):
            return hamiltonian_field(X, theta, phi)

        traj = propagate(h_only, loop, cfg, psi0, picture="pt")
        assert unitarity_drift(traj) > 1e-3

    def test_fourth_order_convergence(self):
        loop = loop_at(1.0, ratio=0.7, delta=0.4)
        psi0 = eigenvector_field(loop.start, 1.0, 0.0, "+")
        finals = [integrate(loop, EvolutionConfig(50.0, n, record_stride=n), psi0).states[-1]
                  for n in (2000, 4000, 8000)]
        ratio = np.linalg.norm(finals[0] - finals[1]) / np.linalg.norm(finals[1] - finals[2])
        assert 12 <= ratio <= 20


class TestPhases:
    def test_residual_shrinks_like_inverse_time(self):
        residuals = [evolve_loop(loop_at(np.pi / 3), EvolutionConfig(T, 100 * int(T))).residual
                     for T in (250.0, 500.0, 1000.0)]
        assert residuals[0] > residuals[1] > residuals[2]
        for r0, r1 in zip(residuals[:-1], residuals[1:]):
            assert 1.6 <= r0 / r1 <= 2.5

    def test_dynamical_phase(self):
        loop = loop_at(1.0, epsilon=0.4)
        report = evolve_loop(loop, EvolutionConfig(100.0, 20_000))
        assert report.dynamical_phase == pytest.approx(-(0.4 + loop.base.root) * 100.0)
        assert np.exp(1j * report.total_phase) == pytest.approx(
            np.exp(1j * (report.dynamical_phase + report.geometric_phase)))

    @pytest.mark.parametrize("theta0,sign", [(0.0, 1), (np.pi, -1)])
    def test_degenerate_loop_at_poles(self, theta0, sign):
        loop = loop_at(theta0)
        report = evolve_loop(loop, EvolutionConfig(200.0, 20_000))
        assert report.geometric_phase == pytest.approx(np.pi * (1 + sign * loop.base.u), abs=1e-6)

    def test_hermitian_south_pole_loop(self):
        # the - eigenvector has no fixed gauge here; the transition probability
        # must still be reported
        loop = loop_at(np.pi, ratio=0.0)
        report = evolve_loop(loop, EvolutionConfig(200.0, 20_000))
        assert report.final_transition_prob <= 1e-12
        assert report.geometric_phase == pytest.approx(0.0, abs=1e-6)

    def test_minus_branch(self):
        loop = loop_at(1.0, ratio=0.6, delta=0.4)
        report = evolve_loop(loop, EvolutionConfig(4000.0, 400_000, branch="-"))
        assert report.analytic_phase == pytest.approx(np.pi * (1 - loop.base.u * np.cos(1.0)), abs=1e-8)
        assert report.residual <= 2e-3

    def test_non_adiabatic_run_rejected(self):
        X = ParamPoint(0, 1.0, 0.0, 0.3)
        loop = LoopPath.polygon(X, [(0.3, 0.0), (2.8, 0.0)])
        with pytest.raises(NonAdiabaticError):
            evolve_loop(loop, EvolutionConfig(2.0, 1000))

    def test_report_dict_keys(self):
        report = evolve_loop(loop_at(1.0), EvolutionConfig(50.0, 10_000))
        d = report.as_dict()
        assert d["picture"] == "pt"
        assert set(d) >= {"geometric_phase", "analytic_phase", "residual", "unitarity_drift",
                          "final_transition_prob"}


class TestDiagnostics:
    def test_eigenvector_gradient_matches_finite_differences(self):
        X = ParamPoint(0, -1.3, 0.5, 1.2, 0.7, 2.0)
        for branch in "+-":
            d_theta, d_phi = eigenvector_gradient(X, X.theta, X.phi, branch)
            fd_t = (eigenvector_field(X, X.theta + H_FD, X.phi, branch)
                    - eigenvector_field(X, X.theta - H_FD, X.phi, branch)) / (2 * H_FD)
            fd_p = (eigenvector_field(X, X.theta, X.phi + H_FD, branch)
                    - eigenvector_field(X, X.theta, X.phi - H_FD, branch)) / (2 * H_FD)
            assert np.allclose(d_theta, fd_t, atol=1e-8)
            assert np.allclose(d_phi, fd_p, atol=1e-8)

    def test_hamiltonian_gradient_matches_finite_differences(self):
        X = ParamPoint(0.5, 1.1, -0.4, 0.9, 2.2, 0.3)
        d_theta, d_phi = hamiltonian_gradient(X, X.theta, X.phi)
        fd_t = (build_hamiltonian(X.at(X.theta + H_FD, X.phi))
                - build_hamiltonian(X.at(X.theta - H_FD, X.phi))) / (2 * H_FD)
        fd_p = (build_hamiltonian(X.at(X.theta, X.phi + H_FD))
                - build_hamiltonian(X.at(X.theta, X.phi - H_FD))) / (2 * H_FD)
        assert np.allclose(d_theta, fd_t, atol=1e-8)
        assert np.allclose(d_phi, fd_p, atol=1e-8)

    def test_diagonal_rate_is_connection(self):
        X = ParamPoint(0, 1.0, 0.5, np.pi / 3, 0.4, 0.7)
        v = TangentVector(0.3, 2 * np.pi)
        g, _ = adiabaticity_diagnostics(X, v)
        c = connection_analytic(X)
        assert (1j * g).real == pytest.approx(c.f_theta * v.d_theta + c.f_phi * v.d_phi, abs=1e-12)
        assert abs((1j * g).imag) < 1e-12

    def test_transition_probability_bounded_by_first_order_envelope(self):
        loop = loop_at(np.pi / 3)
        _, coupling = adiabaticity_diagnostics(loop.start, TangentVector(0.0, 2 * np.pi))
        envelope = 4 * abs(coupling) ** 2 / (2 * loop.base.root) ** 2
        for T in (500.0, 700.0, 1000.0):
            report = evolve_loop(loop, EvolutionConfig(T, 100 * int(T)))
            assert report.final_transition_prob * T**2 <= 1.05 * envelope
