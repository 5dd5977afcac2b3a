"""Tests for the residual norms, initial split, and error bounds."""

import numpy as np
import pytest

from sgrkdg.chaos import StochasticBasis, UniformDistribution
from sgrkdg.system import FluxLaw, RandomField
from sgrkdg.dg import DGSpace, NumericalFlux, uniform_mesh, project_initial
from sgrkdg.timestepping import rk3_7, march
from sgrkdg.reconstruction import SpaceTimeReconstruction
from sgrkdg.estimator import (
    QuadratureConfig,
    residual_norms,
    residual_pointwise,
    initial_error_split,
    compute_bound,
    exact_error,
)

DIST = UniformDistribution(1.0, 3.0)


def _advection_pipeline(N=2, M=16, T=0.2, dt=0.01, quad=QuadratureConfig()):
    basis = StochasticBasis(DIST, N, n_quad=quad.n_stochastic)
    mesh = uniform_mesh(0.0, 2.0, M)
    space = DGSpace(mesh, 2, n_quad=quad.n_space_per_element)
    flux = FluxLaw.advection(2.0)
    g = RandomField(lambda t, x, xi: np.asarray(xi)
                    * (1.0 - 0.5 * np.cos(np.pi * np.asarray(x))))
    u0 = project_initial(g, space, basis, "radau_plus")
    nf = NumericalFlux("upwind", flux)
    traj = march(u0, rk3_7(), dt, T, nf, RandomField.zero())
    rec = SpaceTimeReconstruction(traj, nf)
    return rec, flux, basis, g


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(n_time_per_interval=0)


def test_report_fields_nonnegative():
    rec, flux, basis, _ = _advection_pipeline(T=0.06)
    rr = residual_norms(rec, flux, RandomField.zero(), basis)
    assert rr.r_st_sq >= 0 and rr.r_stoch_sq >= 0 and rr.r_sts_sq >= 0
    assert np.all(rr.per_mode_r_st_sq >= 0)
    assert np.all(rr.element_r_st_density >= 0)
    assert np.all(rr.element_r_stoch_density >= 0)
    assert rr.r_sts_sq == pytest.approx(rr.per_mode_r_st_sq.sum(), rel=1e-9)


def test_steady_constant_has_zero_residual():
    # constant data is an exact steady solution; all residuals vanish
    basis = StochasticBasis(DIST, 1)
    mesh = uniform_mesh(0.0, 2.0, 8)
    space = DGSpace(mesh, 2)
    flux = FluxLaw.advection(2.0)
    g = RandomField(lambda t, x, xi: 1.5 + 0.0 * np.asarray(x) * np.asarray(xi))
    u0 = project_initial(g, space, basis, "radau_plus")
    nf = NumericalFlux("upwind", flux)
    traj = march(u0, rk3_7(), 0.01, 0.05, nf, RandomField.zero())
    rec = SpaceTimeReconstruction(traj, nf)
    rr = residual_norms(rec, flux, RandomField.zero(), basis)
    assert rr.r_sts_sq < 1e-24
    e0_st, e0_stoch = initial_error_split(g, rec, basis)
    assert e0_st < 1e-24 and e0_stoch < 1e-24


def test_pointwise_residual_small_for_resolved_advection():
    rec, flux, basis, _ = _advection_pipeline(M=32, T=0.1, dt=0.005)
    r = residual_pointwise(rec, flux, RandomField.zero(), 0.05, 0.63, 2.1)
    assert abs(r) < 1e-2


def test_pythagoras_identity_burgers_polynomial_source():
    # polynomial-in-xi data: the direct tail must equal the Pythagoras gap
    basis = StochasticBasis(DIST, 2)
    mesh = uniform_mesh(0.0, 2.0, 8)
    space = DGSpace(mesh, 2)
    flux = FluxLaw.burgers()
    g = RandomField(lambda t, x, xi: np.asarray(xi) * np.cos(np.pi * np.asarray(x)),
                    poly_degree_xi=1)
    S = RandomField(lambda t, x, xi: np.asarray(xi) ** 2 * np.sin(np.pi * np.asarray(x)),
                    poly_degree_xi=2)
    u0 = project_initial(g, space, basis, "gl_interp")
    nf = NumericalFlux("lax_wendroff", flux)
    traj = march(u0, rk3_7(), 0.004, 0.05, nf, S)
    rec = SpaceTimeReconstruction(traj, nf)
    rr = residual_norms(rec, flux, S, basis)
    gap = rr.r_sts_sq - rr.r_st_sq
    assert rr.tail_direct_sq is not None
    assert abs(rr.tail_direct_sq - gap) <= 1e-8 * max(rr.r_sts_sq, 1e-30)


def test_advection_has_no_stochastic_residual():
    # linear flux and linear-in-xi data keep the system inside the chaos span
    rec, flux, basis, _ = _advection_pipeline(T=0.1)
    rr = residual_norms(rec, flux, RandomField.zero(), basis)
    assert rr.r_stoch_sq <= 1e-18


def test_initial_split_analytic_value_for_N0():
    # E0_stoch = Var(xi) * ||1 - 0.5cos(pi x)||^2 = (1/3) * 2.25 = 0.75
    rec, flux, basis, g = _advection_pipeline(N=0, T=0.02)
    e0_st, e0_stoch = initial_error_split(g, rec, basis)
    assert abs(e0_stoch - 0.75) < 1e-10
    assert e0_st < 1e-9


def test_exact_error_zero_for_matching_fixture():
    rec, flux, basis, _ = _advection_pipeline(T=0.04)
    field = rec.traj.states[-1]
    space = field.space
    from sgrkdg.dg import ref_basis

    def fixture(t, x, xi):
        # chaos-expand the numerical field itself
        x = np.asarray(x, dtype=float)
        xi_arr = np.asarray(xi, dtype=float)
        out = np.zeros(np.broadcast(x, xi_arr).shape)
        xb = np.broadcast_to(x, out.shape)
        xib = np.broadcast_to(xi_arr, out.shape)
        psi = basis.eval_all(basis.max_degree, xib.ravel())
        flat = np.empty(out.size)
        for i, (xx, pp) in enumerate(zip(xb.ravel(), psi.T)):
            k = space.mesh.locate(xx)
            r = 2.0 * (xx - space.mesh.vertices[k]) / space.mesh.widths[k] - 1.0
            phi = ref_basis(space.degree, np.array([r]))[:, 0]
            flat[i] = np.einsum("jn,j,n->", field.data[k], phi, pp)
        return flat.reshape(out.shape)

    err = exact_error(field, fixture, basis, QuadratureConfig(), 0.04)
    assert err < 1e-12


def test_exponential_factor_advection_closed_form():
    # C_f'' = 0 for advection: exp_factor = exp(0.25 * (T - t_start))
    rec, flux, basis, _ = _advection_pipeline(T=0.2)
    rr = residual_norms(rec, flux, RandomField.zero(), basis)
    rep = compute_bound(rec, rr, flux)
    assert rep.c_fpp == 0.0
    assert abs(rep.exp_factor - np.exp(0.05)) < 1e-12


def test_bound_dominates_error():
    rec, flux, basis, _ = _advection_pipeline(T=0.2)
    rr = residual_norms(rec, flux, RandomField.zero(), basis)
    e0 = initial_error_split(
        RandomField(lambda t, x, xi: np.asarray(xi)
                    * (1.0 - 0.5 * np.cos(np.pi * np.asarray(x)))), rec, basis)
    rr.e0_st, rr.e0_stoch = e0
    exact = lambda t, x, xi: (np.asarray(xi)
                              * (1.0 - 0.5 * np.cos(np.pi * (np.asarray(x) - 2 * t))))
    err = exact_error(rec.traj.states[-1], exact, basis, QuadratureConfig(), 0.2)
    rep = compute_bound(rec, rr, flux, exact_error_sq=err ** 2)
    assert rep.bound_numerical >= err ** 2
    assert rep.effectivity is not None and rep.effectivity >= 1.0


def test_quadrature_refinement_stability():
    # doubling all quadrature orders moves smooth-run norms by < 1e-6 relative
    base_quad = QuadratureConfig()
    fine_quad = QuadratureConfig(16, 50, 160)
    results = []
    for quad in (base_quad, fine_quad):
        rec, flux, basis, _ = _advection_pipeline(T=0.1, quad=quad)
        rr = residual_norms(rec, flux, RandomField.zero(), basis, quad)
        results.append((rr.r_st_sq, rr.r_sts_sq))
    for a, b in zip(*results):
        assert abs(a - b) < 1e-6 * abs(b)


def test_shock_split_quadrature_analytic_oracle():
    # zero field vs a moving step: the split quadrature integrates the jump
    # exactly, error^2 = E[ (s(xi) t + 1) (1 + xi)^2 + (1 - s(xi) t) (0.5 + xi)^2 ]
    dist = UniformDistribution(-0.2, 0.2)
    basis = StochasticBasis(dist, 2)
    mesh = uniform_mesh(-1.0, 1.0, 32)
    space = DGSpace(mesh, 2)
    t = 0.1

    def exact(tt, x, xi):
        x, xi = np.asarray(x, dtype=float), np.asarray(xi, dtype=float)
        return np.where(x <= (1.5 + 2 * xi) * tt, 1.0 + xi, 0.5 + xi)

    from sgrkdg.dg import SGCoefficientField
    field = SGCoefficientField(np.zeros((32, 3, 3)), space, basis)
    quad = QuadratureConfig()
    split = exact_error(field, exact, basis, quad, t,
                        shock_locator=lambda xi: (1.5 + 2 * xi) * t)
    nodes, weights = basis.nodes, basis.weights
    s = 1.5 + 2 * nodes
    oracle_sq = float(weights @ ((s * t + 1) * (1 + nodes) ** 2
                                 + (1 - s * t) * (0.5 + nodes) ** 2))
    assert abs(split ** 2 - oracle_sq) < 1e-12 * oracle_sq
