"""Space-time reconstruction of RK-DG trajectories.

The time direction uses the piecewise-cubic two-point Hermite interpolant of
the accepted states and their stored spatial-operator values, so it is C^1
at the time nodes.  At each query time the spatial lifting raises the DG
degree by one: low modes are kept (L2 orthogonality against degree p-1) and
the top two modes are solved from the interface conditions
u_st(x_k^+-) = w(trace_-, trace_+), which makes the lift globally continuous.
"""

from dataclasses import dataclass

import numpy as np

from .chaos import StochasticBasis
from .dg import (
    SGCoefficientField,
    NumericalFlux,
    DGSpace,
    ref_basis,
    ref_basis_deriv,
    _interface_widths,
    UPWIND,
    LAX_WENDROFF,
)
from .system import sg_flux, sg_flux_jacobian_apply
from .timestepping import Trajectory

__all__ = ["TemporalReconstruction", "SpaceTimeReconstruction", "spatial_reconstruct"]


def _hermite_weights(tau: np.ndarray):
    """Cubic Hermite value weights (h00, h10, h01, h11) at tau in [0, 1]."""
    t2, t3 = tau * tau, tau * tau * tau
    return (2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + tau, -2 * t3 + 3 * t2, t3 - t2)


def _hermite_dweights(tau: np.ndarray):
    t2 = tau * tau
    return (6 * t2 - 6 * tau, 3 * t2 - 4 * tau + 1, -6 * t2 + 6 * tau, 3 * t2 - 2 * tau)


class TemporalReconstruction:
    """Piecewise-cubic-in-time Hermite interpolant of a trajectory."""

    def __init__(self, traj: Trajectory):
        if len(traj.states) != len(traj.derivatives):
            raise ValueError("trajectory must store a derivative per node")
        self.traj = traj

    @property
    def t_start(self) -> float:
        return float(self.traj.times[0])

    @property
    def t_end(self) -> float:
        return float(self.traj.times[-1])

    def interval_of(self, t: float) -> int:
        times = self.traj.times
        tol = 1e-12 * max(1.0, abs(self.t_end))
        if t < times[0] - tol or t > times[-1] + tol:
            raise ValueError(f"t = {t} outside reconstructed range "
                             f"[{times[0]}, {times[-1]}]")
        n = int(np.searchsorted(times, t, side="right") - 1)
        return min(max(n, 0), len(times) - 2)

    def eval_batch(self, n: int, ts: np.ndarray):
        """Values and time derivatives at times ts inside interval n.

        Returns (u, du_dt), each of shape (len(ts), M, p+1, N+1).
        """
        traj = self.traj
        dt = traj.dt_of_interval(n)
        tau = (np.asarray(ts, dtype=float) - traj.times[n]) / dt
        u0, u1 = traj.states[n].data, traj.states[n + 1].data
        d0, d1 = traj.derivatives[n].data, traj.derivatives[n + 1].data
        h00, h10, h01, h11 = (w[:, None, None, None] for w in _hermite_weights(tau))
        g00, g10, g01, g11 = (w[:, None, None, None] for w in _hermite_dweights(tau))
        u = h00 * u0 + h10 * dt * d0 + h01 * u1 + h11 * dt * d1
        du = (g00 * u0 + g10 * dt * d0 + g01 * u1 + g11 * dt * d1) / dt
        return u, du

    def eval(self, t: float):
        n = self.interval_of(t)
        u, du = self.eval_batch(n, np.array([t]))
        return u[0], du[0]


def _lift_tensors(ut: np.ndarray, dut: np.ndarray, space: DGSpace,
                  basis: StochasticBasis, numflux: NumericalFlux):
    """Degree-(p+1) continuous lift of batched DG tensors (B, M, p+1, N+1).

    Returns (st, dst) of shape (B, M, p+2, N+1); dst is the exact time
    derivative of the lift (chain rule through the interface trace w).
    """
    p = space.degree
    mesh = space.mesh
    phi_ends = space.phi_ends  # (p+2, 2)
    # one-sided traces at the M periodic interfaces
    right = np.einsum("bkjn,j->bkn", ut, phi_ends[: p + 1, 1])
    left = np.einsum("bkjn,j->bkn", ut, phi_ends[: p + 1, 0])
    u_minus = np.roll(right, 1, axis=1)
    u_plus = left
    d_right = np.einsum("bkjn,j->bkn", dut, phi_ends[: p + 1, 1])
    d_left = np.einsum("bkjn,j->bkn", dut, phi_ends[: p + 1, 0])
    d_minus = np.roll(d_right, 1, axis=1)
    d_plus = d_left

    h_if = _interface_widths(mesh)
    w = numflux.trace(basis, u_minus, u_plus, h_if)
    if numflux.kind == UPWIND:
        dw = d_minus
    elif numflux.kind == LAX_WENDROFF:
        jm = sg_flux_jacobian_apply(numflux.flux, basis, u_minus, d_minus)
        jp = sg_flux_jacobian_apply(numflux.flux, basis, u_plus, d_plus)
        dw = 0.5 * (d_minus + d_plus) - 0.5 * numflux.dt / h_if[:, None] * (jp - jm)
    else:
        raise ValueError(f"unknown numerical flux kind {numflux.kind!r}")

    B, M, _, nc = ut.shape
    st = np.zeros((B, M, p + 2, nc))
    dst = np.zeros_like(st)
    if p >= 1:
        st[:, :, :p, :] = ut[:, :, :p, :]
        dst[:, :, :p, :] = dut[:, :, :p, :]
    # endpoint conditions: element k matches w at interfaces k (left) and k+1 (right)
    w_left, w_right = w, np.roll(w, -1, axis=1)
    dw_left, dw_right = dw, np.roll(dw, -1, axis=1)
    part_l = np.einsum("bkjn,j->bkn", st[:, :, :p, :], phi_ends[:p, 0])
    part_r = np.einsum("bkjn,j->bkn", st[:, :, :p, :], phi_ends[:p, 1])
    dpart_l = np.einsum("bkjn,j->bkn", dst[:, :, :p, :], phi_ends[:p, 0])
    dpart_r = np.einsum("bkjn,j->bkn", dst[:, :, :p, :], phi_ends[:p, 1])
    # 2x2 system in the top two modes
    a, b = phi_ends[p, 0], phi_ends[p + 1, 0]
    c, d = phi_ends[p, 1], phi_ends[p + 1, 1]
    det = a * d - b * c
    r1, r2 = w_left - part_l, w_right - part_r
    st[:, :, p, :] = (d * r1 - b * r2) / det
    st[:, :, p + 1, :] = (a * r2 - c * r1) / det
    s1, s2 = dw_left - dpart_l, dw_right - dpart_r
    dst[:, :, p, :] = (d * s1 - b * s2) / det
    dst[:, :, p + 1, :] = (a * s2 - c * s1) / det
    return st, dst


def spatial_reconstruct(field: SGCoefficientField, numflux: NumericalFlux) -> np.ndarray:
    """Continuous degree-(p+1) lift of a single DG field; shape (M, p+2, N+1)."""
    ut = field.data[None]
    st, _ = _lift_tensors(ut, np.zeros_like(ut), field.space, field.basis, numflux)
    return st[0]


@dataclass
class _IntervalCache:
    n: int = -1
    t: float = np.nan
    st: np.ndarray = None
    dst: np.ndarray = None


class SpaceTimeReconstruction:
    """Queryable Lipschitz reconstruction of a trajectory from a start node.

    The trajectory node nearest `start_time` becomes the reconstruction
    origin; residual time integrals are taken from there.
    """

    def __init__(self, traj: Trajectory, numflux: NumericalFlux, start_time: float = 0.0):
        self.traj = traj
        self.temporal = TemporalReconstruction(traj)
        self.numflux = numflux
        self.basis = traj.basis
        self.space = traj.space
        self.start_index = int(np.argmin(np.abs(traj.times - start_time)))
        self._cache = _IntervalCache()

    @property
    def t_start(self) -> float:
        return float(self.traj.times[self.start_index])

    @property
    def t_end(self) -> float:
        return float(self.traj.times[-1])

    def intervals(self):
        """Indices of the time intervals covered by the reconstruction."""
        return range(self.start_index, len(self.traj.times) - 1)

    def lift_interval(self, n: int, ts: np.ndarray):
        """Lifted coefficients and their time derivative at times ts in interval n."""
        ut, dut = self.temporal.eval_batch(n, ts)
        nf = self.numflux.with_dt(self.traj.dt_of_interval(n))
        return _lift_tensors(ut, dut, self.space, self.basis, nf)

    def lift_at(self, t: float):
        tol = 1e-12 * max(1.0, abs(self.t_end))
        if t < self.t_start - tol:
            raise ValueError(f"t = {t} before reconstruction start {self.t_start}")
        if not (self._cache.t == t):
            n = max(self.temporal.interval_of(t), self.start_index)
            st, dst = self.lift_interval(n, np.array([t]))
            self._cache = _IntervalCache(n, t, st[0], dst[0])
        return self._cache.st, self._cache.dst

    def eval(self, t: float, x: float, xi: float, which: str = "value") -> float:
        """Chaos-expanded value, d/dt, or d/dx of the reconstruction."""
        st, dst = self.lift_at(t)
        mesh = self.space.mesh
        xw = float(mesh.wrap(x))
        k = mesh.locate(xw)
        h = mesh.widths[k]
        r = np.clip(2.0 * (xw - mesh.vertices[k]) / h - 1.0, -1.0, 1.0)
        p1 = self.space.degree + 1
        if which == "value":
            coeffs, basis_vals, jac = st, ref_basis(p1, np.array([r]))[:, 0], 1.0
        elif which == "dt":
            coeffs, basis_vals, jac = dst, ref_basis(p1, np.array([r]))[:, 0], 1.0
        elif which == "dx":
            coeffs, basis_vals, jac = st, ref_basis_deriv(p1, np.array([r]))[:, 0], 2.0 / h
        else:
            raise ValueError(f"unknown query {which!r}")
        psi = self.basis.eval_all(self.basis.max_degree, np.array([xi]))[:, 0]
        return float(jac * np.einsum("jn,j,n->", coeffs[k], basis_vals, psi))

    def sup_dx_batch(self, st: np.ndarray, n_x_samples: int = 50,
                     n_xi_samples: int = 80) -> np.ndarray:
        """Sampled sup of |d/dx| of the chaos expansion of lifted tensors.

        `st` has shape (B, M, p+2, N+1); returns one sup per batch entry.
        The sample grid is a Chebyshev set per element augmented with both
        element endpoints, and the stochastic nodes augmented with the
        support endpoints (Legendre extrema sit at the boundary).
        """
        p1 = self.space.degree + 1
        r = np.concatenate(([-1.0], np.cos(np.pi * np.arange(n_x_samples) /
                                           max(n_x_samples - 1, 1))[::-1], [1.0]))
        dphi = ref_basis_deriv(p1, r)  # (p+2, R)
        dvals = np.einsum("bkjn,jr->bkrn", st, dphi) \
            * (2.0 / self.space.mesh.widths)[None, :, None, None]
        dist = self.basis.dist
        xi_nodes, _ = np.polynomial.legendre.leggauss(n_xi_samples)
        xi = np.concatenate(([dist.lower], dist.lower + 0.5 * dist.width * (xi_nodes + 1),
                             [dist.upper]))
        psi = self.basis.eval_all(self.basis.max_degree, xi)  # (N+1, Z)
        vals = np.einsum("bkrn,nz->bkrz", dvals, psi)
        return np.abs(vals).reshape(len(st), -1).max(axis=1)

    def lipschitz_bound_dx(self, t: float, n_x_samples: int = 50,
                           n_xi_samples: int = 80) -> float:
        """Sampled sup of |d/dx of the chaos-expanded reconstruction| at time t."""
        st, _ = self.lift_at(t)
        return float(self.sup_dx_batch(st[None], n_x_samples, n_xi_samples)[0])
