"""Tests for flux laws and the Galerkin-projected (chaos) flux."""

import numpy as np
import pytest

from sgrkdg.chaos import StochasticBasis, UniformDistribution, gauss_quadrature
from sgrkdg.system import (
    FluxLaw,
    RandomField,
    sg_flux,
    sg_flux_exact_mode,
    sg_flux_jacobian_apply,
    sg_flux_tail_modes,
    project_source,
    source_modes,
)

BASIS = StochasticBasis(UniformDistribution(1.0, 3.0), 3)


def test_flux_law_values():
    adv = FluxLaw.advection(2.0)
    assert adv.f(3.0) == 6.0
    assert adv.df(3.0) == 2.0
    assert adv.d2f(3.0) == 0.0
    bur = FluxLaw.burgers()
    assert bur.f(3.0) == 4.5
    assert bur.df(3.0) == 3.0
    assert bur.d2f(3.0) == 1.0


def test_advection_sg_flux_is_diagonal():
    u = np.array([1.0, -0.5, 0.25, 0.1])
    np.testing.assert_allclose(sg_flux(FluxLaw.advection(2.0), BASIS, u), 2.0 * u)


def test_burgers_sg_flux_matches_direct_quadrature():
    rng = np.random.default_rng(7)
    u = rng.standard_normal((5, 4))
    modes = sg_flux(FluxLaw.burgers(), BASIS, u)
    # oracle: pointwise evaluation of u(xi)^2/2 projected by quadrature
    nodes, weights = gauss_quadrature(200, BASIS.dist)
    psi = BASIS.eval_all(3, nodes)
    u_vals = u @ psi
    oracle = 0.5 * (u_vals ** 2) @ (weights[:, None] * psi.T)
    assert np.abs(modes - oracle).max() < 1e-11


def test_exact_modes_extend_to_2N_and_vanish_beyond():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(4)
    flux = FluxLaw.burgers()
    nodes, weights = gauss_quadrature(200, BASIS.dist)
    psi_hi = BASIS.eval_all(6, nodes)
    u_vals = u @ psi_hi[:4]
    for l in range(7):
        oracle = float(weights @ (0.5 * u_vals ** 2 * psi_hi[l]))
        assert abs(sg_flux_exact_mode(flux, BASIS, u, l) - oracle) < 1e-12
    assert sg_flux_exact_mode(flux, BASIS, u, 7) == 0.0
    assert sg_flux_exact_mode(FluxLaw.advection(1.0), BASIS, u, 5) == 0.0


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    u = rng.standard_normal(4)
    v = rng.standard_normal(4)
    flux = FluxLaw.burgers()
    eps = 1e-7
    fd = (sg_flux(flux, BASIS, u + eps * v) - sg_flux(flux, BASIS, u - eps * v)) / (2 * eps)
    assert np.abs(sg_flux_jacobian_apply(flux, BASIS, u, v) - fd).max() < 1e-6


def test_tail_modes_match_exact_modes():
    rng = np.random.default_rng(5)
    u = rng.standard_normal(4)
    flux = FluxLaw.burgers()
    tail = sg_flux_tail_modes(flux, BASIS, u, u)
    assert tail.shape == (3,)
    for i, l in enumerate(range(4, 7)):
        # v = u: v^T C_l u = 2 * (u^T C_l u / 2) = 2 * mode_l of f
        assert abs(tail[i] - 2.0 * sg_flux_exact_mode(flux, BASIS, u, l)) < 1e-13


def test_tail_modes_advection_zero():
    u = np.ones((2, 4))
    tail = sg_flux_tail_modes(FluxLaw.advection(1.0), BASIS, u, u)
    assert tail.shape == (2, 3)
    assert np.all(tail == 0.0)


def test_project_source_mode_range():
    S = RandomField(lambda t, x, xi: np.asarray(xi) * 0.0 + 1.0)
    assert abs(project_source(S, BASIS, 0.0, 0.5, 0) - 1.0) < 1e-14
    with pytest.raises(ValueError):
        project_source(S, BASIS, 0.0, 0.5, 7)


def test_source_modes_shapes_and_values():
    S = RandomField(lambda t, x, xi: np.asarray(x) * np.asarray(xi))
    x = np.linspace(0, 1, 6).reshape(2, 3)
    modes = source_modes(S, BASIS, 0.0, x, 4)
    assert modes.shape == (2, 3, 4)
    # x * xi has chaos modes x * (2, 1/sqrt(3), 0, 0)
    np.testing.assert_allclose(modes[..., 0], 2.0 * x, atol=1e-13)
    np.testing.assert_allclose(modes[..., 1], x / np.sqrt(3.0), atol=1e-13)
    assert np.abs(modes[..., 2:]).max() < 1e-13


def test_zero_field_shortcuts():
    Z = RandomField.zero()
    assert Z.is_zero
    assert np.all(source_modes(Z, BASIS, 0.0, np.ones((2, 2)), 4) == 0.0)
    assert project_source(Z, BASIS, 0.0, 0.3, 1) == 0.0
