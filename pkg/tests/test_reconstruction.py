"""Tests for the temporal Hermite and space-time reconstructions."""

import numpy as np
import pytest

from sgrkdg.chaos import StochasticBasis, UniformDistribution
from sgrkdg.system import FluxLaw, RandomField
from sgrkdg.dg import (
    DGSpace,
    NumericalFlux,
    SGCoefficientField,
    uniform_mesh,
    project_initial,
)
from sgrkdg.timestepping import Trajectory, rk3_7, march
from sgrkdg.reconstruction import (
    TemporalReconstruction,
    SpaceTimeReconstruction,
    spatial_reconstruct,
)

DIST = UniformDistribution(1.0, 3.0)
BASIS = StochasticBasis(DIST, 2)


def _cubic_trajectory(space, basis, n_steps=4, dt=0.1):
    """Trajectory whose coefficients follow a known cubic in time."""
    rng = np.random.default_rng(1)
    shape = (space.mesh.n_elements, space.n_modes, basis.max_degree + 1)
    a, b, c, d = (rng.standard_normal(shape) for _ in range(4))
    poly = lambda t: a + b * t + c * t ** 2 + d * t ** 3
    dpoly = lambda t: b + 2 * c * t + 3 * d * t ** 2
    times = dt * np.arange(n_steps + 1)
    states = [SGCoefficientField(poly(t), space, basis) for t in times]
    derivs = [SGCoefficientField(dpoly(t), space, basis) for t in times]
    traj = Trajectory(times, states, derivs, space, basis, "upwind", [])
    return traj, poly, dpoly


def test_hermite_reproduces_cubics():
    space = DGSpace(uniform_mesh(0.0, 2.0, 3), 2)
    traj, poly, dpoly = _cubic_trajectory(space, BASIS)
    rec = TemporalReconstruction(traj)
    for t in [0.03, 0.17, 0.25, 0.399]:
        u, du = rec.eval(t)
        assert np.abs(u - poly(t)).max() < 1e-13
        assert np.abs(du - dpoly(t)).max() < 1e-12


def test_temporal_range_errors():
    space = DGSpace(uniform_mesh(0.0, 2.0, 3), 2)
    traj, _, _ = _cubic_trajectory(space, BASIS)
    rec = TemporalReconstruction(traj)
    with pytest.raises(ValueError):
        rec.eval(-0.1)
    with pytest.raises(ValueError):
        rec.eval(0.41)


def _advection_reconstruction(M=16, T=0.2, dt=0.01):
    mesh = uniform_mesh(0.0, 2.0, M)
    space = DGSpace(mesh, 2)
    g = RandomField(lambda t, x, xi: np.asarray(xi)
                    * (1.0 - 0.5 * np.cos(np.pi * np.asarray(x))))
    u0 = project_initial(g, space, BASIS, "radau_plus")
    nf = NumericalFlux("upwind", FluxLaw.advection(2.0))
    traj = march(u0, rk3_7(), dt, T, nf, RandomField.zero())
    return SpaceTimeReconstruction(traj, nf)


def test_lift_interface_continuity():
    rec = _advection_reconstruction()
    pe = rec.space.phi_ends
    for t in [0.0, 0.055, 0.13, 0.2]:
        st, dst = rec.lift_at(t)
        for arr in (st, dst):
            right = np.einsum("kjn,j->kn", arr, pe[:, 1])
            left = np.einsum("kjn,j->kn", arr, pe[:, 0])
            assert np.abs(np.roll(right, 1, axis=0) - left).max() < 1e-11


def test_lift_orthogonality_to_low_modes():
    # modes 0..p-1 of the lift coincide with the temporal reconstruction
    rec = _advection_reconstruction()
    for t in [0.04, 0.11]:
        st, _ = rec.lift_at(t)
        ut, _ = rec.temporal.eval(t)
        assert np.abs(st[:, :2, :] - ut[:, :2, :]).max() < 1e-12


def test_lift_matches_upwind_trace():
    rec = _advection_reconstruction()
    t = 0.07
    st, _ = rec.lift_at(t)
    ut, _ = rec.temporal.eval(t)
    pe = rec.space.phi_ends
    # upwind: the lift takes the left-neighbor's right trace at each interface
    u_minus = np.roll(np.einsum("kjn,j->kn", ut, pe[:3, 1]), 1, axis=0)
    lift_left = np.einsum("kjn,j->kn", st, pe[:, 0])
    assert np.abs(lift_left - u_minus).max() < 1e-12


def test_lift_is_identity_on_continuous_fields():
    # a globally continuous field (constant per chaos mode) lifts to itself
    mesh = uniform_mesh(0.0, 2.0, 6)
    space = DGSpace(mesh, 2)
    data = np.zeros((6, 3, 3))
    data[:, 0, :] = np.array([1.0, 0.5, -0.2]) * np.sqrt(2.0)
    field = SGCoefficientField(data, space, BASIS)
    nf = NumericalFlux("upwind", FluxLaw.advection(2.0))
    st = spatial_reconstruct(field, nf)
    assert np.abs(st[:, :3, :] - data).max() < 1e-12
    assert np.abs(st[:, 3, :]).max() < 1e-12


def test_eval_derivatives_match_finite_differences():
    rec = _advection_reconstruction()
    t, x, xi = 0.093, 0.71, 2.3
    eps = 1e-6
    dt_fd = (rec.eval(t + eps, x, xi) - rec.eval(t - eps, x, xi)) / (2 * eps)
    dx_fd = (rec.eval(t, x + eps, xi) - rec.eval(t, x - eps, xi)) / (2 * eps)
    assert abs(rec.eval(t, x, xi, "dt") - dt_fd) < 1e-5
    assert abs(rec.eval(t, x, xi, "dx") - dx_fd) < 1e-5
    with pytest.raises(ValueError):
        rec.eval(t, x, xi, "d2x")


def test_start_time_snaps_to_nearest_node():
    mesh = uniform_mesh(0.0, 2.0, 8)
    space = DGSpace(mesh, 2)
    g = RandomField(lambda t, x, xi: np.asarray(xi) * np.cos(np.pi * np.asarray(x)))
    u0 = project_initial(g, space, BASIS, "gl_interp")
    nf = NumericalFlux("lax_wendroff", FluxLaw.burgers())
    traj = march(u0, rk3_7(), 0.008, 0.08, nf, RandomField.zero())
    rec = SpaceTimeReconstruction(traj, nf, start_time=0.008)
    assert rec.start_index == 1
    assert rec.t_start == pytest.approx(0.008)
    assert list(rec.intervals())[0] == 1
    with pytest.raises(ValueError):
        rec.lift_at(0.004)


def test_lipschitz_bound_on_known_profile():
    rec = _advection_reconstruction(M=32)
    # |d/dx u| = |0.5 pi xi sin(...)| <= 1.5 pi at t = 0
    bound = rec.lipschitz_bound_dx(0.0)
    assert 0.9 * 1.5 * np.pi < bound < 1.1 * 1.5 * np.pi
