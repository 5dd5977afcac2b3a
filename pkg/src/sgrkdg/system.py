"""Flux laws, random data fields, and assembly of the coupled chaos system.

For linear advection the Galerkin-projected flux decouples mode by mode;
for Burgers it contracts the triple-product tensors against the coefficient
vector, which is exact (no extra quadrature in the solver loop).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chaos import StochasticBasis

__all__ = [
    "FluxLaw",
    "RandomField",
    "sg_flux",
    "sg_flux_exact_mode",
    "sg_flux_jacobian_apply",
    "sg_flux_tail_modes",
    "project_source",
    "source_modes",
]

ADVECTION = "advection"
BURGERS = "burgers"


@dataclass(frozen=True)
class FluxLaw:
    """Scalar flux f with its first two derivatives.

    Only linear advection and Burgers are supported; a general f would force
    quadrature into the innermost solver kernels.
    """

    kind: str
    speed: float = 0.0

    @staticmethod
    def advection(speed: float) -> "FluxLaw":
        return FluxLaw(ADVECTION, speed)

    @staticmethod
    def burgers() -> "FluxLaw":
        return FluxLaw(BURGERS)

    def f(self, u):
        if self.kind == ADVECTION:
            return self.speed * np.asarray(u)
        return 0.5 * np.asarray(u) ** 2

    def df(self, u):
        u = np.asarray(u)
        if self.kind == ADVECTION:
            return np.full_like(u, self.speed, dtype=float)
        return u

    def d2f(self, u):
        u = np.asarray(u)
        if self.kind == ADVECTION:
            return np.zeros_like(u, dtype=float)
        return np.ones_like(u, dtype=float)


@dataclass(frozen=True)
class RandomField:
    """Deterministic evaluator (t, x, xi) -> value, vectorized in x and xi."""

    fn: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    is_zero: bool = False
    poly_degree_xi: Optional[int] = None  # exact polynomial degree in xi, if known

    def __call__(self, t, x, xi):
        return np.asarray(self.fn(t, x, xi), dtype=float)

    @staticmethod
    def zero() -> "RandomField":
        return RandomField(lambda t, x, xi: np.zeros(np.broadcast(x, xi).shape),
                           is_zero=True, poly_degree_xi=0)


def sg_flux(flux: FluxLaw, basis: StochasticBasis, u: np.ndarray) -> np.ndarray:
    """Chaos modes 0..N of f(sum_n u_n Psi_n); u has shape (..., N+1)."""
    u = np.asarray(u, dtype=float)
    if flux.kind == ADVECTION:
        return flux.speed * u
    N = basis.max_degree
    C = basis.triple[: N + 1]  # (N+1, N+1, N+1)
    return 0.5 * np.einsum("kij,...i,...j->...k", C, u, u)


def sg_flux_exact_mode(flux: FluxLaw, basis: StochasticBasis, u: np.ndarray, l: int) -> float:
    """The l-th chaos mode of f(sum_{k<=N} u_k Psi_k), valid for l up to 2N.

    Advection modes beyond N vanish by orthogonality; Burgers modes beyond 2N
    vanish by the degree bound on the product of two degree-N polynomials.
    """
    u = np.asarray(u, dtype=float)
    N = basis.max_degree
    if flux.kind == ADVECTION:
        if l <= N:
            return float(flux.speed * u[l])
        return 0.0
    if l > 2 * N:
        return 0.0
    return float(0.5 * u @ basis.triple[l] @ u)


def sg_flux_jacobian_apply(flux: FluxLaw, basis: StochasticBasis,
                           u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Action of the flux Jacobian at u on v, mode-wise: (Df(u) v)_k."""
    if flux.kind == ADVECTION:
        return flux.speed * np.asarray(v, dtype=float)
    N = basis.max_degree
    C = basis.triple[: N + 1]
    # (Df(u) v)_k = v^T C_k u by symmetry of C_k
    return np.einsum("kij,...i,...j->...k", C, np.asarray(v, dtype=float),
                     np.asarray(u, dtype=float))


def sg_flux_tail_modes(flux: FluxLaw, basis: StochasticBasis,
                       u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Modes l = N+1..2N of Df-type contraction v^T C_l u (Burgers tail).

    This is the chaos tail of d/dx f(u_h) when v = d/dx u_h.  Advection has
    no tail.  Shapes broadcast over leading axes; result (..., N) for N >= 1.
    """
    N = basis.max_degree
    if flux.kind == ADVECTION or N == 0:
        lead = np.broadcast(np.asarray(u)[..., 0], np.asarray(v)[..., 0]).shape
        return np.zeros(lead + (max(N, 0),))
    C_tail = basis.triple[N + 1: 2 * N + 1]
    return np.einsum("kij,...i,...j->...k", C_tail, np.asarray(v, dtype=float),
                     np.asarray(u, dtype=float))


def project_source(S: RandomField, basis: StochasticBasis, t: float, x: float,
                   l: int) -> float:
    """Chaos mode <S(t, x, .), Psi_l> by the basis quadrature rule, l <= 2N."""
    if not 0 <= l <= 2 * basis.max_degree:
        raise ValueError(f"mode {l} out of range, quadrature validated up to 2N = "
                         f"{2 * basis.max_degree}")
    if S.is_zero:
        return 0.0
    vals = S(t, np.full_like(basis.nodes, x), basis.nodes)
    return float(basis.psi_table[l] @ (basis.weights * vals))


def source_modes(S: RandomField, basis: StochasticBasis, t, x: np.ndarray,
                 n_modes: int) -> np.ndarray:
    """Chaos modes 0..n_modes-1 of S at time(s) t and positions x.

    x may have any shape; t is scalar or broadcastable with x.  Returns
    shape x.shape + (n_modes,).
    """
    x = np.asarray(x, dtype=float)
    if S.is_zero:
        return np.zeros(x.shape + (n_modes,))
    xi = basis.nodes.reshape((1,) * x.ndim + (-1,))
    tt = np.asarray(t, dtype=float)
    if tt.ndim:
        tt = tt[..., None]
    vals = S(tt, x[..., None], xi)  # x.shape + (Q,)
    wpsi = (basis.weights * basis.psi_table[:n_modes]).T  # (Q, n_modes)
    return vals @ wpsi
