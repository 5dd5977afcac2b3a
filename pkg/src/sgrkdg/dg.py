"""Periodic 1D modal DG discretization of the chaos-coupled system.

The per-element basis is the L2-orthonormal Legendre family on the reference
element [-1, 1], so the element mass matrix is (h/2) * identity and the weak
operator needs no linear solves.  Coefficient fields carry the layout
data[element, dg_mode, chaos_mode].
"""

from dataclasses import dataclass, field

import numpy as np

from .chaos import StochasticBasis, legendre_recurrence
from .system import FluxLaw, RandomField, sg_flux, source_modes

__all__ = [
    "Mesh1D",
    "DGSpace",
    "SGCoefficientField",
    "NumericalFlux",
    "uniform_mesh",
    "ref_basis",
    "ref_basis_deriv",
    "project_initial",
    "apply_Lh",
    "apply_limiter",
    "eval_field",
]

UPWIND = "upwind"
LAX_WENDROFF = "lax_wendroff"


def ref_basis(n_max: int, r) -> np.ndarray:
    """Orthonormal Legendre basis phi_0..phi_n_max on [-1, 1] at points r."""
    legs = legendre_recurrence(n_max, r)
    scale = np.sqrt(np.arange(n_max + 1) + 0.5)
    return legs * scale.reshape((n_max + 1,) + (1,) * (legs.ndim - 1))


def ref_basis_deriv(n_max: int, r) -> np.ndarray:
    """d/dr of the orthonormal reference basis, via P'_{n+1} = P'_{n-1} + (2n+1) P_n."""
    r = np.asarray(r, dtype=float)
    legs = legendre_recurrence(n_max, r)
    dlegs = np.zeros_like(legs)
    if n_max >= 1:
        dlegs[1] = 1.0
    for n in range(1, n_max):
        dlegs[n + 1] = dlegs[n - 1] + (2 * n + 1) * legs[n]
    scale = np.sqrt(np.arange(n_max + 1) + 0.5)
    return dlegs * scale.reshape((n_max + 1,) + (1,) * (legs.ndim - 1))


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing vertices x_0 < ... < x_M with x_0 identified to x_M."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("mesh needs at least two vertices")
        if not np.all(np.diff(v) > 0):
            raise ValueError("mesh vertices must be strictly increasing")
        object.__setattr__(self, "vertices", v)

    @property
    def n_elements(self) -> int:
        return len(self.vertices) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def x_left(self) -> float:
        return float(self.vertices[0])

    @property
    def x_right(self) -> float:
        return float(self.vertices[-1])

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def quasi_uniformity(self) -> float:
        w = self.widths
        return float(w.max() / w.min())

    def wrap(self, x):
        """Map x into the periodic domain [x_left, x_right)."""
        return self.x_left + np.mod(np.asarray(x, dtype=float) - self.x_left, self.length)

    def locate(self, x: float) -> int:
        """Element index containing the wrapped coordinate x."""
        xw = float(self.wrap(x))
        k = int(np.searchsorted(self.vertices, xw, side="right") - 1)
        return min(max(k, 0), self.n_elements - 1)


def uniform_mesh(x_left: float, x_right: float, n_elements: int) -> Mesh1D:
    return Mesh1D(np.linspace(x_left, x_right, n_elements + 1))


class DGSpace:
    """DG space of degree p on a periodic mesh, with its element quadrature."""

    def __init__(self, mesh: Mesh1D, degree: int, n_quad: int = 25):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.mesh = mesh
        self.degree = degree
        self.n_quad = n_quad
        self.quad_ref, self.quad_w = np.polynomial.legendre.leggauss(n_quad)
        # basis tables up to degree p+1: the space-time reconstruction lives
        # one degree higher on the same quadrature
        self.phi = ref_basis(degree + 1, self.quad_ref)        # (p+2, Q)
        self.dphi = ref_basis_deriv(degree + 1, self.quad_ref)
        ends = np.array([-1.0, 1.0])
        self.phi_ends = ref_basis(degree + 1, ends)            # (p+2, 2)
        # physical quadrature coordinates, (M, Q)
        v, h = mesh.vertices, mesh.widths
        self.quad_x = v[:-1, None] + 0.5 * h[:, None] * (self.quad_ref[None, :] + 1.0)

    @property
    def n_modes(self) -> int:
        return self.degree + 1


@dataclass
class SGCoefficientField:
    """Discrete solution coefficients, shape (M, p+1, N+1)."""

    data: np.ndarray
    space: DGSpace
    basis: StochasticBasis

    def __post_init__(self):
        expected = (self.space.mesh.n_elements, self.space.n_modes,
                    self.basis.max_degree + 1)
        if self.data.shape != expected:
            raise ValueError(f"field shape {self.data.shape} != {expected}")

    def copy(self) -> "SGCoefficientField":
        return SGCoefficientField(self.data.copy(), self.space, self.basis)

    def like(self, data: np.ndarray) -> "SGCoefficientField":
        return SGCoefficientField(data, self.space, self.basis)

    def cell_means(self) -> np.ndarray:
        """Cell averages per chaos mode, shape (M, N+1)."""
        return self.data[:, 0, :] / np.sqrt(2.0)


@dataclass(frozen=True)
class NumericalFlux:
    """Interface flux G(u-, u+) = f(w(u-, u+)) with consistent trace w(u, u) = u."""

    kind: str
    flux: FluxLaw
    dt: float = 0.0  # current time-step size, used by Lax-Wendroff only

    def with_dt(self, dt: float) -> "NumericalFlux":
        return NumericalFlux(self.kind, self.flux, dt)

    def trace(self, basis: StochasticBasis, u_minus: np.ndarray, u_plus: np.ndarray,
              h: np.ndarray) -> np.ndarray:
        if self.kind == UPWIND:
            return np.asarray(u_minus, dtype=float)
        if self.kind == LAX_WENDROFF:
            fm = sg_flux(self.flux, basis, u_minus)
            fp = sg_flux(self.flux, basis, u_plus)
            hh = np.asarray(h, dtype=float)[..., None]
            return 0.5 * (u_minus + u_plus) - 0.5 * self.dt / hh * (fp - fm)
        raise ValueError(f"unknown numerical flux kind {self.kind!r}")


def _interface_widths(mesh: Mesh1D) -> np.ndarray:
    """Harmonic mean of the element widths adjacent to each interface."""
    h = mesh.widths
    h_left = np.roll(h, 1)  # element left of interface i is element i-1 (periodic)
    return 2.0 * h_left * h / (h_left + h)


def _traces(field: SGCoefficientField) -> tuple[np.ndarray, np.ndarray]:
    """One-sided values at the M periodic interfaces, each (M, N+1)."""
    phi_ends = field.space.phi_ends[: field.space.n_modes]
    left_vals = np.einsum("kjn,j->kn", field.data, phi_ends[:, 0])   # at x_k^+
    right_vals = np.einsum("kjn,j->kn", field.data, phi_ends[:, 1])  # at x_{k+1}^-
    u_minus = np.roll(right_vals, 1, axis=0)  # interface i sees element i-1 from the left
    u_plus = left_vals
    return u_minus, u_plus


def project_initial(u0: RandomField, space: DGSpace, basis: StochasticBasis,
                    method: str) -> SGCoefficientField:
    """Project/interpolate initial data into the DG space.

    'radau_plus' matches the chaos-projected data at each right element
    endpoint and is L2-orthogonal to polynomials of degree p-1 in the
    residual; 'gl_interp' interpolates at the p+1 Gauss-Legendre nodes of
    each element.  The chaos direction is always the quadrature projection.
    """
    p = space.degree
    mesh = space.mesh
    n_chaos = basis.max_degree + 1
    if method == "gl_interp":
        r, w = np.polynomial.legendre.leggauss(p + 1)
        x = mesh.vertices[:-1, None] + 0.5 * mesh.widths[:, None] * (r[None, :] + 1.0)
        g = source_modes(u0, basis, 0.0, x, n_chaos)  # (M, p+1, N+1)
        phi = ref_basis(p, r)  # (p+1, p+1)
        coeffs = np.einsum("jq,q,kqn->kjn", phi, w, g)
        return SGCoefficientField(coeffs, space, basis)
    if method == "radau_plus":
        g_quad = source_modes(u0, basis, 0.0, space.quad_x, n_chaos)  # (M, Q, N+1)
        g_right = source_modes(u0, basis, 0.0, mesh.vertices[1:], n_chaos)  # (M, N+1)
        phi = space.phi[: p + 1]
        coeffs = np.zeros((mesh.n_elements, p + 1, n_chaos))
        if p >= 1:
            coeffs[:, :p, :] = np.einsum("jq,q,kqn->kjn", phi[:p],
                                         space.quad_w, g_quad)
        phi_right = space.phi_ends[: p + 1, 1]
        partial = np.einsum("kjn,j->kn", coeffs, phi_right)
        coeffs[:, p, :] = (g_right - partial) / phi_right[p]
        return SGCoefficientField(coeffs, space, basis)
    raise ValueError(f"unknown projection method {method!r}")


def apply_Lh(u: SGCoefficientField, numflux: NumericalFlux, S: RandomField,
             t: float) -> SGCoefficientField:
    """Mass-inverted weak spatial operator of the semi-discrete scheme.

    Volume integrals use the element quadrature rule; interface terms use
    G = f(w(u-, u+)) with periodic wraparound and the jump convention
    [psi]_i = psi(x_i^-) - psi(x_i^+).
    """
    space, basis = u.space, u.basis
    p = space.degree
    mesh = space.mesh
    flux_law = numflux.flux
    phi = space.phi[: p + 1]
    dphi = space.dphi[: p + 1]

    u_quad = np.einsum("kjn,jq->kqn", u.data, phi)
    f_quad = sg_flux(flux_law, basis, u_quad)
    # int f(u_h) d/dx psi_j dx reduces to a pure reference integral
    rhs = np.einsum("q,jq,kqn->kjn", space.quad_w, dphi, f_quad)

    if not S.is_zero:
        s_quad = source_modes(S, basis, t, space.quad_x, basis.max_degree + 1)
        rhs += 0.5 * mesh.widths[:, None, None] * np.einsum(
            "q,jq,kqn->kjn", space.quad_w, phi, s_quad)

    u_minus, u_plus = _traces(u)
    w = numflux.trace(basis, u_minus, u_plus, _interface_widths(mesh))
    G = sg_flux(flux_law, basis, w)  # (M, N+1), interface i at vertex x_i
    phi_l = space.phi_ends[: p + 1, 0]
    phi_r = space.phi_ends[: p + 1, 1]
    # element k: + G_k psi(x_k^+) - G_{k+1} psi(x_{k+1}^-)
    rhs += np.einsum("kn,j->kjn", G, phi_l)
    rhs -= np.einsum("kn,j->kjn", np.roll(G, -1, axis=0), phi_r)

    rhs *= (2.0 / mesh.widths)[:, None, None]
    return u.like(rhs)


def _minmod_tvb(a: np.ndarray, b: np.ndarray, c: np.ndarray,
                threshold: np.ndarray) -> np.ndarray:
    """Modified minmod: pass a through when |a| <= threshold."""
    same_sign = (np.sign(a) == np.sign(b)) & (np.sign(a) == np.sign(c))
    m = np.where(same_sign, np.sign(a) * np.minimum(np.abs(a),
                                                    np.minimum(np.abs(b), np.abs(c))), 0.0)
    return np.where(np.abs(a) <= threshold, a, m)


def apply_limiter(u: SGCoefficientField, tvb_constant: float = 0.0) -> SGCoefficientField:
    """TVB minmod slope limiter, applied chaos-componentwise.

    Cell means are preserved exactly; on cells where the interface deviation
    is modified, the slope is replaced and higher DG modes are zeroed.
    No-op for p = 0.
    """
    if u.space.degree == 0:
        return u.copy()
    out = u.copy()
    means = u.cell_means()  # (M, N+1)
    fwd = np.roll(means, -1, axis=0) - means
    bwd = means - np.roll(means, 1, axis=0)
    slope_scale = float(u.space.phi_ends[1, 1])  # phi_1(1) = sqrt(3/2)
    delta = u.data[:, 1, :] * slope_scale
    h = u.space.mesh.widths[:, None]
    limited = _minmod_tvb(delta, fwd, bwd, tvb_constant * h * h)
    changed = np.abs(limited - delta) > 1e-14 * np.maximum(np.abs(delta), 1.0)
    out.data[:, 1, :] = np.where(changed, limited / slope_scale, u.data[:, 1, :])
    if u.space.degree >= 2:
        out.data[:, 2:, :] = np.where(changed[:, None, :], 0.0, u.data[:, 2:, :])
    return out


def eval_field(u: SGCoefficientField, x: float, xi: float,
               derivative_order: int = 0, side: str = "left") -> float:
    """Pointwise value (or d/dx) of the chaos-expanded DG polynomial.

    At element interfaces `side` selects the one-sided trace: 'left' takes
    the element to the left of x, 'right' the element to the right.
    """
    mesh = u.space.mesh
    xw = float(mesh.wrap(x))
    k = mesh.locate(xw)
    v = mesh.vertices
    on_vertex = np.isclose(xw, v, atol=1e-14 * max(1.0, mesh.length))
    if on_vertex.any():
        i = int(np.argmax(on_vertex))
        if side == "left":
            k = (i - 1) % mesh.n_elements
            r = 1.0
        else:
            k = i % mesh.n_elements
            r = -1.0
    else:
        r = float(np.clip(2.0 * (xw - v[k]) / mesh.widths[k] - 1.0, -1.0, 1.0))
    h = mesh.widths[k]
    p = u.space.degree
    if derivative_order == 0:
        phi = ref_basis(p, np.array([r]))[:, 0]
        jac = 1.0
    elif derivative_order == 1:
        phi = ref_basis_deriv(p, np.array([r]))[:, 0]
        jac = 2.0 / h
    else:
        raise ValueError("derivative_order must be 0 or 1")
    psi = u.basis.eval_all(u.basis.max_degree, np.array([xi]))[:, 0]
    return float(jac * np.einsum("j,jn,n->", phi, u.data[k], psi))
