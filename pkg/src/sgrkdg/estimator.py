"""Residual norms, the initial-error split, and the computable error bounds.

The squared residual norm splits orthogonally into the chaos modes 0..N
(the space-time part, computed mode by mode) and the tail (the stochastic
part, recovered as the Pythagoras difference against the direct quadrature
of the full residual).  For Burgers the tail modes N+1..2N are also computed
directly from the triple-product contraction as an independent cross-check.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chaos import StochasticBasis, gauss_quadrature
from .dg import SGCoefficientField, ref_basis, ref_basis_deriv
from .system import (
    FluxLaw,
    RandomField,
    sg_flux_jacobian_apply,
    sg_flux_tail_modes,
    source_modes,
    BURGERS,
)
from .reconstruction import SpaceTimeReconstruction

log = logging.getLogger(__name__)

__all__ = [
    "QuadratureConfig",
    "ResidualReport",
    "EstimatorReport",
    "residual_pointwise",
    "residual_norms",
    "initial_error_split",
    "compute_bound",
    "exact_error",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss orders: per time interval, per element, and in the random variable."""

    n_time_per_interval: int = 8
    n_space_per_element: int = 25
    n_stochastic: int = 80
    linf_oversample: int = 2

    def __post_init__(self):
        if min(self.n_time_per_interval, self.n_space_per_element,
               self.n_stochastic, self.linf_oversample) < 1:
            raise ValueError("quadrature orders must be >= 1")


@dataclass
class ResidualReport:
    """Squared residual norms over (t_start, t_end) x domain x probability space."""

    r_st_sq: float
    r_stoch_sq: float
    r_sts_sq: float
    e0_st: float = 0.0
    e0_stoch: float = 0.0
    per_mode_r_st_sq: np.ndarray = None
    tail_direct_sq: Optional[float] = None
    element_r_st_density: np.ndarray = None
    element_r_stoch_density: np.ndarray = None
    warnings: list = field(default_factory=list)

    @property
    def total_sq(self) -> float:
        return self.r_sts_sq + self.e0_st + self.e0_stoch


@dataclass
class EstimatorReport:
    """Error-bound components of the relative-entropy estimate."""

    bound_reconstruction: float
    bound_numerical: float
    exp_factor: float
    c_fpp: float
    recon_vs_numerical_sq: float
    exact_error_sq: Optional[float] = None

    @property
    def effectivity(self) -> Optional[float]:
        if self.exact_error_sq is None or self.exact_error_sq == 0.0:
            return None
        return float(np.sqrt(self.bound_numerical / self.exact_error_sq))


def residual_pointwise(rec: SpaceTimeReconstruction, flux: FluxLaw, S: RandomField,
                       t: float, x: float, xi: float) -> float:
    """Strong-form defect d/dt u + f'(u) d/dx u - S at a single point."""
    u = rec.eval(t, x, xi, "value")
    ut = rec.eval(t, x, xi, "dt")
    ux = rec.eval(t, x, xi, "dx")
    s = float(S(t, np.array([x]), np.array([xi]))[0]) if not S.is_zero else 0.0
    return ut + float(flux.df(u)) * ux - s


def _stochastic_rule(basis: StochasticBasis, n_points: int):
    if n_points == basis.n_quad:
        return basis.nodes, basis.weights, basis.psi_table[: basis.max_degree + 1]
    nodes, weights = gauss_quadrature(n_points, basis.dist)
    psi = basis.eval_all(basis.max_degree, nodes)
    return nodes, weights, psi


def residual_norms(rec: SpaceTimeReconstruction, flux: FluxLaw, S: RandomField,
                   basis: StochasticBasis, quad: QuadratureConfig = QuadratureConfig(),
                   t_start: Optional[float] = None,
                   t_end: Optional[float] = None) -> ResidualReport:
    """Accumulate all residual norms over the reconstructed time range."""
    traj = rec.traj
    space = rec.space
    mesh = space.mesh
    p = space.degree
    n_chaos = basis.max_degree + 1
    t_start = rec.t_start if t_start is None else t_start
    t_end = rec.t_end if t_end is None else t_end
    if t_start < rec.t_start - 1e-12:
        raise ValueError("t_start precedes the reconstruction origin")

    rt, rw = np.polynomial.legendre.leggauss(quad.n_time_per_interval)
    rx, wx = np.polynomial.legendre.leggauss(quad.n_space_per_element)
    phi = ref_basis(p + 1, rx)          # (p+2, Q)
    dphi = ref_basis_deriv(p + 1, rx)
    xi_nodes, xi_w, psi = _stochastic_rule(basis, quad.n_stochastic)
    # chaos projection of source samples, all modes 0..2N in one product
    psi_full = basis.eval_all(2 * basis.max_degree, xi_nodes)  # (2N+1, Z)
    wpsi_full = (xi_w * psi_full).T                             # (Z, 2N+1)
    h = mesh.widths
    x_pts = mesh.vertices[:-1, None] + 0.5 * h[:, None] * (rx[None, :] + 1.0)

    per_mode = np.zeros(n_chaos)
    r_sts_sq = 0.0
    tail_sq = 0.0 if flux.kind == BURGERS else None
    el_st = np.zeros(mesh.n_elements)
    el_sts = np.zeros(mesh.n_elements)

    for n in rec.intervals():
        a = max(float(traj.times[n]), t_start)
        b = min(float(traj.times[n + 1]), t_end)
        if b - a <= 1e-15:
            continue
        tq = 0.5 * (a + b) + 0.5 * (b - a) * rt
        tw = 0.5 * (b - a) * rw
        st, dst = rec.lift_interval(n, tq)  # (B, M, p+2, N+1)

        u = np.einsum("bkjn,jq->bkqn", st, phi)
        du_dt = np.einsum("bkjn,jq->bkqn", dst, phi)
        du_dx = np.einsum("bkjn,jq->bkqn", st, dphi) * (2.0 / h)[None, :, None, None]

        flux_div = sg_flux_jacobian_apply(flux, basis, u, du_dx)
        if S.is_zero:
            s_vals = None
            s_all = None
            r_modes = du_dt + flux_div  # (B, M, Q, N+1)
        else:
            # one pointwise source sweep per interval feeds both the modal
            # and the direct quadratures
            s_vals = S(tq[:, None, None, None], x_pts[None, :, :, None],
                       xi_nodes[None, None, None, :])  # (B, M, Q, Z)
            s_all = s_vals @ wpsi_full                  # modes 0..2N
            r_modes = du_dt + flux_div - s_all[..., :n_chaos]

        cell_w = 0.5 * h  # element Jacobian dx = (h/2) dr
        per_mode += np.einsum("b,bkqn,k,q->n", tw, r_modes ** 2, cell_w, wx)
        el_st += np.einsum("b,bkqn,k,q->k", tw, r_modes ** 2, cell_w, wx)

        # direct quadrature of the chaos-expanded residual
        u_sts_t = du_dt @ psi
        u_sts_x = du_dx @ psi
        u_sts = u @ psi
        r_sts = u_sts_t + flux.df(u_sts) * u_sts_x
        if s_vals is not None:
            r_sts -= s_vals
        r_sts_sq += float(np.einsum("b,bkqz,k,q,z->", tw, r_sts ** 2, cell_w, wx, xi_w))
        el_sts += np.einsum("b,bkqz,k,q,z->k", tw, r_sts ** 2, cell_w, wx, xi_w)

        if tail_sq is not None and basis.max_degree >= 1:
            tail = sg_flux_tail_modes(flux, basis, u, du_dx)  # modes N+1..2N
            if s_all is not None:
                tail = tail - s_all[..., n_chaos:]
            tail_sq += float(np.einsum("b,bkql,k,q->", tw, tail ** 2, cell_w, wx))

    r_st_sq = float(per_mode.sum())
    gap = r_sts_sq - r_st_sq
    warnings = []
    if gap < -1e-9 * max(r_sts_sq, 1e-30):
        msg = (f"negative Pythagoras gap {gap:.3e} beyond tolerance "
               f"(r_sts_sq = {r_sts_sq:.3e}); clamping to zero")
        warnings.append(msg)
        log.warning(msg)
    r_stoch_sq = max(gap, 0.0)
    return ResidualReport(
        r_st_sq=r_st_sq,
        r_stoch_sq=r_stoch_sq,
        r_sts_sq=r_sts_sq,
        per_mode_r_st_sq=per_mode,
        tail_direct_sq=tail_sq,
        element_r_st_density=el_st,
        element_r_stoch_density=np.maximum(el_sts - el_st, 0.0),
        warnings=warnings,
    )


def initial_error_split(u0: RandomField, rec: SpaceTimeReconstruction,
                        basis: StochasticBasis,
                        quad: QuadratureConfig = QuadratureConfig()):
    """(E0_st, E0_stoch): projection error of the data at the reconstruction origin.

    E0_stoch is the chaos-truncation tail of the data, computed stably as a
    direct quadrature of the pointwise tail; E0_st compares the truncated
    chaos modes with the lifted reconstruction at the origin.
    """
    space = rec.space
    mesh = space.mesh
    p = space.degree
    n_chaos = basis.max_degree + 1
    t0 = rec.t_start
    rx, wx = np.polynomial.legendre.leggauss(quad.n_space_per_element)
    h = mesh.widths
    x_pts = mesh.vertices[:-1, None] + 0.5 * h[:, None] * (rx[None, :] + 1.0)
    cell_w = 0.5 * h

    xi_nodes, xi_w, psi = _stochastic_rule(basis, quad.n_stochastic)
    vals = u0(t0, x_pts[..., None], xi_nodes[None, None, :])  # (M, Q, Z)
    g_modes = source_modes(u0, basis, t0, x_pts, n_chaos)     # (M, Q, N+1)
    truncated = g_modes @ psi                                  # (M, Q, Z)
    e0_stoch = float(np.einsum("kqz,k,q,z->", (vals - truncated) ** 2,
                               cell_w, wx, xi_w))

    st, _ = rec.lift_at(t0)
    phi = ref_basis(p + 1, rx)
    rec_vals = np.einsum("kjn,jq->kqn", st, phi)  # (M, Q, N+1)
    e0_st = float(np.einsum("kqn,k,q->", (g_modes - rec_vals) ** 2, cell_w, wx))
    return e0_st, e0_stoch


def compute_bound(rec: SpaceTimeReconstruction, residuals: ResidualReport,
                  flux: FluxLaw, quad: QuadratureConfig = QuadratureConfig(),
                  s: Optional[float] = None, m3_proxy: Optional[float] = None,
                  exact_error_sq: Optional[float] = None) -> EstimatorReport:
    """Error bounds at time s from the accumulated residuals.

    The curvature constant is maximized over the convex hull of
    [-m3_proxy, m3_proxy] and the sampled range of the reconstruction; with
    no proxy given, the sampled range is inflated by 10%.
    """
    traj = rec.traj
    s = rec.t_end if s is None else s

    st_final, _ = rec.lift_at(s)
    if s == rec.t_end:
        u_final = traj.states[-1].data
    else:
        u_final, _ = rec.temporal.eval(s)
    p = rec.space.degree
    diff = st_final.copy()
    diff[:, : p + 1, :] -= u_final
    recon_vs_num_sq = float(np.einsum("kjn,k->", diff ** 2, 0.5 * rec.space.mesh.widths))

    # curvature bound over the relevant solution range; the reference basis
    # peaks at the endpoints with |phi_j| <= sqrt(j + 1/2), the chaos basis
    # at the support endpoints with |Psi_n| <= sqrt(2n + 1)
    phi_max = np.sqrt(np.arange(p + 2) + 0.5)
    psi_max = np.sqrt(2.0 * np.arange(rec.basis.max_degree + 1) + 1.0)
    sampled = float(np.einsum("kjn,j,n->k", np.abs(st_final), phi_max, psi_max).max())
    if m3_proxy is None:
        m3_proxy = 1.1 * sampled
    u_extreme = max(m3_proxy, sampled)
    c_fpp = 0.5 * float(np.max(np.abs(flux.d2f(np.array([-u_extreme, 0.0, u_extreme])))))

    t0 = rec.t_start
    if c_fpp == 0.0:
        integral = 0.25 * (s - t0)
    else:
        rt, rw = np.polynomial.legendre.leggauss(quad.n_time_per_interval)
        integral = 0.0
        for n in rec.intervals():
            a = max(float(traj.times[n]), t0)
            b = min(float(traj.times[n + 1]), s)
            if b - a <= 1e-15:
                continue
            tq = 0.5 * (a + b) + 0.5 * (b - a) * rt
            tw = 0.5 * (b - a) * rw
            st, _ = rec.lift_interval(n, tq)
            lip = rec.sup_dx_batch(
                st, n_x_samples=quad.linf_oversample * quad.n_space_per_element,
                n_xi_samples=quad.n_stochastic)
            integral += float(tw @ (c_fpp * lip + 0.25))
    exp_factor = float(np.exp(integral))

    core = residuals.total_sq * exp_factor
    return EstimatorReport(
        bound_reconstruction=core,
        bound_numerical=2.0 * recon_vs_num_sq + 2.0 * core,
        exp_factor=exp_factor,
        c_fpp=c_fpp,
        recon_vs_numerical_sq=recon_vs_num_sq,
        exact_error_sq=exact_error_sq,
    )


def exact_error(field: SGCoefficientField, exact: Callable, basis: StochasticBasis,
                quad: QuadratureConfig, t: float,
                shock_locator: Optional[Callable] = None) -> float:
    """L2(domain x probability) norm of (numerical - exact) at time t.

    `exact` is called as exact(t, x, xi) with broadcasting.  When a
    `shock_locator` (xi -> shock position) is given, the element containing
    the discontinuity is integrated on split subcells per stochastic node so
    the jump never crosses a quadrature panel.
    """
    space = field.space
    mesh = space.mesh
    p = space.degree
    rx, wx = np.polynomial.legendre.leggauss(quad.n_space_per_element)
    phi = ref_basis(p, rx)
    h = mesh.widths
    x_pts = mesh.vertices[:-1, None] + 0.5 * h[:, None] * (rx[None, :] + 1.0)
    xi_nodes, xi_w, psi = _stochastic_rule(basis, quad.n_stochastic)

    u_modes = np.einsum("kjn,jq->kqn", field.data, phi)  # (M, Q, N+1)
    u_vals = u_modes @ psi                               # (M, Q, Z)
    ex_vals = exact(t, x_pts[..., None], xi_nodes[None, None, :])
    err_el = np.einsum("kqz,q->kz", (u_vals - ex_vals) ** 2, wx) \
        * (0.5 * h)[:, None]  # (M, Z): per-element, per-node contribution

    if shock_locator is not None:
        psi_full = basis.eval_all(basis.max_degree, xi_nodes)
        for z, xi in enumerate(xi_nodes):
            xs = float(mesh.wrap(shock_locator(xi)))
            k = mesh.locate(xs)
            xa, xb = mesh.vertices[k], mesh.vertices[k + 1]
            contrib = 0.0
            for lo, hi in ((xa, xs), (xs, xb)):
                if hi - lo <= 0:
                    continue
                xq = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rx
                r = 2.0 * (xq - xa) / (xb - xa) - 1.0
                uv = np.einsum("jn,jq,n->q", field.data[k], ref_basis(p, r),
                               psi_full[:, z])
                ev = exact(t, xq, np.full_like(xq, xi))
                contrib += 0.5 * (hi - lo) * float(wx @ (uv - ev) ** 2)
            err_el[k, z] = contrib
    return float(np.sqrt((err_el @ xi_w).sum()))
