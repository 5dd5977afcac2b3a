"""Orthonormal Legendre chaos basis for uniformly distributed random inputs.

The basis functions are the Legendre polynomials mapped to the support
interval [a, b] and scaled to be orthonormal with respect to the uniform
probability density 1/(b-a).  All inner products are probability-weighted,
so <g, h> literally equals E(g h).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "UniformDistribution",
    "StochasticBasis",
    "gauss_quadrature",
    "legendre_recurrence",
    "moments",
]


@dataclass(frozen=True)
class UniformDistribution:
    """Uniform distribution on [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"need lower < upper, got [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_reference(self, xi):
        """Map xi in [lower, upper] to r in [-1, 1]."""
        return 2.0 * (np.asarray(xi, dtype=float) - self.lower) / self.width - 1.0


def legendre_recurrence(n_max: int, r):
    """Evaluate standard Legendre polynomials P_0..P_n_max at r.

    Returns an array of shape (n_max + 1,) + shape(r).  Uses the three-term
    recurrence, stable for the degrees used here (up to ~30).
    """
    r = np.asarray(r, dtype=float)
    out = np.empty((n_max + 1,) + r.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = r
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1) * r * out[n] - n * out[n - 1]) / (n + 1)
    return out


def gauss_quadrature(n_points: int, dist: UniformDistribution):
    """Gauss-Legendre rule on [dist.lower, dist.upper] with probability weights.

    The weights sum to one, so the rule integrates against the uniform
    density and is exact for polynomials of degree <= 2*n_points - 1.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    r, _ = np.polynomial.legendre.leggauss(n_points)
    # polish the eigenvalue-method nodes by Newton iteration and recompute
    # the weights from the derivative; the raw rule loses ~1e-12 on
    # high-degree integrands, which matters for the triple products
    if n_points >= 2:
        for _ in range(2):
            legs = legendre_recurrence(n_points, r)
            dp = n_points * (r * legs[n_points] - legs[n_points - 1]) / (r * r - 1.0)
            r = r - legs[n_points] / dp
        legs = legendre_recurrence(n_points, r)
        dp = n_points * (r * legs[n_points] - legs[n_points - 1]) / (r * r - 1.0)
        w = 2.0 / ((1.0 - r * r) * dp * dp)
    else:
        r, w = np.array([0.0]), np.array([2.0])
    nodes = dist.lower + 0.5 * dist.width * (r + 1.0)
    weights = 0.5 * w
    return nodes, weights


class StochasticBasis:
    """Orthonormal Legendre chaos basis of degree N with its quadrature rule.

    Precomputes basis values at the quadrature nodes up to degree 2N (needed
    for the triple products) and the triple-product tensors
    C[k, i, j] = <Psi_i Psi_j, Psi_k> for i, j <= N, k <= 2N.
    """

    def __init__(self, dist: UniformDistribution, max_degree: int, n_quad: int = 80):
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        # triple products integrate degree-(4N) polynomials exactly
        n_quad = max(n_quad, 2 * max_degree + 1)
        self.dist = dist
        self.max_degree = max_degree
        self.n_quad = n_quad
        self.nodes, self.weights = gauss_quadrature(n_quad, dist)
        # psi_table[n, q] = Psi_n(node_q), n = 0..2N
        self.psi_table = self.eval_all(2 * max_degree, self.nodes)
        self.triple = self._triple_products()

    # -- basis evaluation -------------------------------------------------

    def eval(self, n: int, xi):
        """Value of the n-th orthonormal basis polynomial at xi, n <= 2N."""
        if not 0 <= n <= 2 * self.max_degree:
            raise ValueError(
                f"basis degree {n} out of range: triple products limit degrees to "
                f"2N = {2 * self.max_degree}"
            )
        return self.eval_all(n, xi)[n]

    def eval_all(self, n_max: int, xi):
        """Psi_0..Psi_n_max at xi; shape (n_max + 1,) + shape(xi)."""
        r = self.dist.to_reference(xi)
        legs = legendre_recurrence(n_max, r)
        scale = np.sqrt(2.0 * np.arange(n_max + 1) + 1.0)
        return legs * scale.reshape((n_max + 1,) + (1,) * r.ndim)

    # -- integrals ---------------------------------------------------------

    def _triple_products(self) -> np.ndarray:
        N = self.max_degree
        wpsi = self.weights * self.psi_table  # (2N+1, Q)
        # C[k, i, j] = sum_q w_q Psi_i Psi_j Psi_k
        C = np.einsum("kq,iq,jq->kij", wpsi, self.psi_table[: N + 1], self.psi_table[: N + 1])
        # enforce exact (i, j) symmetry against quadrature round-off
        return 0.5 * (C + np.swapaxes(C, 1, 2))

    def project(self, g) -> np.ndarray:
        """Chaos modes <g, Psi_m>, m = 0..N, of a function g(xi)."""
        vals = np.asarray(g(self.nodes), dtype=float)
        return self.psi_table[: self.max_degree + 1] @ (self.weights * vals)

    def expectation(self, vals_at_nodes) -> float:
        """Probability-weighted quadrature of values sampled at the nodes."""
        return float(self.weights @ np.asarray(vals_at_nodes, dtype=float))


def moments(coeffs) -> tuple[float, float]:
    """(mean, variance) of the random variable with the given chaos modes."""
    c = np.asarray(coeffs, dtype=float)
    return float(c[0]), float(np.sum(c[1:] ** 2))
