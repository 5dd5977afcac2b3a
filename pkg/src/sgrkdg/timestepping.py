"""Explicit multi-stage Runge-Kutta marching with stage-wise slope limiting.

Schemes are given in the convex stage-combination form
    u^(j) = Limiter( sum_l alpha_jl * (u^(l) + (beta_jl/alpha_jl) dt L(u^(l))) )
with alpha_jl >= 0 summing to one per stage.  The trajectory stores the
spatial-operator values at every accepted node for the cubic Hermite
time reconstruction.
"""

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .dg import SGCoefficientField, NumericalFlux, apply_Lh, apply_limiter
from .system import RandomField

__all__ = [
    "RKScheme",
    "Trajectory",
    "SolverBlowUpError",
    "ssprk3",
    "rk3_7",
    "builtin_schemes",
    "rk_step",
    "march",
]


class SolverBlowUpError(RuntimeError):
    """Raised when a stage produces non-finite values."""

    def __init__(self, t: float, stage: int):
        super().__init__(f"solver blow-up at t = {t:.6g}, stage {stage}")
        self.t = t
        self.stage = stage


@dataclass(frozen=True)
class RKScheme:
    """Stage-combination coefficients alpha, beta (lists of rows, row j has j entries)."""

    name: str
    alpha: tuple
    beta: tuple
    order: int

    def __post_init__(self):
        for j, (arow, brow) in enumerate(zip(self.alpha, self.beta), start=1):
            if len(arow) != j or len(brow) != j:
                raise ValueError(f"stage {j} rows must have length {j}")
            if any(a < 0 for a in arow):
                raise ValueError("alpha coefficients must be nonnegative")
            if abs(sum(arow) - 1.0) > 1e-12:
                raise ValueError(f"stage {j} alpha row must sum to 1")
            if any(b != 0 and a == 0 for a, b in zip(arow, brow)):
                raise ValueError("beta != 0 requires alpha != 0")

    @property
    def n_stages(self) -> int:
        return len(self.alpha)

    @property
    def stage_times(self) -> tuple:
        """Abscissae c_l of the stage states (c_0 = 0)."""
        c = [0.0]
        for arow, brow in zip(self.alpha, self.beta):
            c.append(sum(a * c[l] + b for l, (a, b) in enumerate(zip(arow, brow))))
        return tuple(c[:-1])


def ssprk3() -> RKScheme:
    """Three-stage third-order strong-stability-preserving scheme (Shu-Osher form)."""
    return RKScheme(
        "ssprk3",
        alpha=((1.0,), (0.75, 0.25), (1.0 / 3.0, 0.0, 2.0 / 3.0)),
        beta=((1.0,), (0.0, 0.25), (0.0, 0.0, 2.0 / 3.0)),
        order=3,
    )


# Low-storage 2N coefficients of a seven-stage third-order scheme optimized
# for DG spatial operators (Toulorge & Desmet, J. Comput. Phys. 231, 2012).
_RK37_A = (0.0, -0.8083163874983830, -1.503407858773331, -1.053064525050744,
           -1.463149119280508, -0.6592881281087830, -1.667891931891068)
_RK37_B = (0.01197052673097840, 0.8886897793820711, 0.4578382089261419,
           0.5790045253338471, 0.3160214638138484, 0.2483525368264122,
           0.06771230959408840)


def _butcher_from_low_storage(A, B):
    s = len(A)
    rows = np.zeros((s + 1, s))
    k = np.zeros(s)
    for j in range(1, s + 1):
        f = np.zeros(s)
        f[j - 1] = 1.0
        k = A[j - 1] * k + f
        rows[j] = rows[j - 1] + B[j - 1] * k
    return rows  # rows[j, l]: weight of L(u^(l)) in u^(j)


def rk3_7() -> RKScheme:
    """Seven-stage third-order scheme with an enlarged DG stability region.

    The scheme is not strong-stability-preserving, so it has no two-term
    convex stage form; each stage is written as a uniform convex combination
    of all previous stage states, which reproduces the scheme exactly when
    the limiter is inactive.
    """
    rows = _butcher_from_low_storage(_RK37_A, _RK37_B)
    s = len(_RK37_A)
    alpha, beta = [], []
    for j in range(1, s + 1):
        a = [1.0 / j] * j
        # beta_jl = butcher_jl - sum_{m>l} alpha_jm * butcher_ml
        b = [rows[j, l] - sum(a[m] * rows[m, l] for m in range(l + 1, j))
             for l in range(j)]
        alpha.append(tuple(a))
        beta.append(tuple(b))
    return RKScheme("rk3_7", tuple(alpha), tuple(beta), order=3)


def builtin_schemes() -> dict:
    return {"ssprk3": ssprk3(), "rk3_7": rk3_7()}


@dataclass
class Trajectory:
    """Accepted states u_h^n with their spatial-operator values L_h(u_h^n)."""

    times: np.ndarray
    states: list
    derivatives: list
    space: object
    basis: object
    numflux_kind: str
    step_seconds: list = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def state(self, n: int) -> SGCoefficientField:
        return self.states[n]

    def dt_of_interval(self, n: int) -> float:
        return float(self.times[n + 1] - self.times[n])


def rk_step(u_n: SGCoefficientField, scheme: RKScheme, dt: float,
            numflux: NumericalFlux, source: RandomField, t_n: float,
            limiter_on: bool = False, tvb: float = 0.0) -> SGCoefficientField:
    """Advance one step; raises SolverBlowUpError on non-finite stages."""
    nf = numflux.with_dt(dt)
    c = scheme.stage_times
    stages = [u_n]
    L_cache = [None] * scheme.n_stages
    # divergence is detected via the finiteness check, so overflow in the
    # stage arithmetic itself is expected and silenced
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, scheme.n_stages + 1):
            acc = np.zeros_like(u_n.data)
            for l, (a, b) in enumerate(zip(scheme.alpha[j - 1], scheme.beta[j - 1])):
                if a == 0.0 and b == 0.0:
                    continue
                acc += a * stages[l].data
                if b != 0.0:
                    if L_cache[l] is None:
                        L_cache[l] = apply_Lh(stages[l], nf, source, t_n + c[l] * dt)
                    acc += b * dt * L_cache[l].data
            u_j = u_n.like(acc)
            if limiter_on:
                u_j = apply_limiter(u_j, tvb)
            if not np.all(np.isfinite(u_j.data)):
                raise SolverBlowUpError(t_n, j)
            stages.append(u_j)
    return stages[-1]


def march(u0: SGCoefficientField, scheme: RKScheme, dt: float, T: float,
          numflux: NumericalFlux, source: RandomField,
          limiter_on: bool = False, tvb: float = 0.0, t0: float = 0.0) -> Trajectory:
    """Uniform-dt march from t0 to t0 + T, final step truncated if needed."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    times = [t0]
    state = u0.copy()
    if limiter_on:
        state = apply_limiter(state, tvb)
    nf0 = numflux.with_dt(dt)
    states = [state]
    derivs = [apply_Lh(state, nf0, source, t0)]
    seconds = []
    t_end = t0 + T
    t = t0
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        step = min(dt, t_end - t)
        tic = _time.perf_counter()
        state = rk_step(state, scheme, step, numflux, source, t,
                        limiter_on=limiter_on, tvb=tvb)
        seconds.append(_time.perf_counter() - tic)
        t += step
        times.append(t)
        states.append(state)
        derivs.append(apply_Lh(state, numflux.with_dt(step), source, t))
    return Trajectory(np.asarray(times), states, derivs, u0.space, u0.basis,
                      numflux.kind, seconds)
