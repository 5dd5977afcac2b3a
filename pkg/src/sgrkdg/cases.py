"""Test-case registry and the convergence/EOC experiment harness.

Each case bundles the problem data (flux, distribution, initial condition,
source, exact solution when available) with its default discretization.
``run`` executes the full pipeline march -> reconstruct -> residual norms ->
bound -> exact error and returns one table row; ``convergence_study``
refines in h (doubling elements, halving dt) or in N (chaos degree).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .chaos import StochasticBasis, UniformDistribution
from .system import FluxLaw, RandomField
from .dg import uniform_mesh, DGSpace, NumericalFlux, project_initial
from .timestepping import builtin_schemes, march
from .reconstruction import SpaceTimeReconstruction
from .estimator import (
    QuadratureConfig,
    residual_norms,
    initial_error_split,
    compute_bound,
    exact_error,
)

__all__ = [
    "TestCase",
    "RunConfig",
    "ConvergenceRow",
    "RunResult",
    "registry",
    "get_case",
    "run",
    "convergence_study",
    "validate_exact_solution",
]

ROW_FIELDS = ("level", "M", "h", "dt", "N", "p", "error", "R_st", "R_stoch",
              "E0_st", "E0_stoch", "bound", "exp_factor", "eoc_error",
              "eoc_R_st", "wall_time")


@dataclass(frozen=True)
class TestCase:
    """Problem data plus the default discretization of one experiment."""

    name: str
    domain: tuple
    T: float
    flux: FluxLaw
    dist: UniformDistribution
    u0: RandomField
    source: RandomField
    exact: Optional[RandomField] = None
    shock_locator: Optional[Callable] = None  # xi -> shock position at time T
    m3_proxy: Optional[float] = None
    n_elements: int = 16
    dt: float = 0.02
    chaos_degree: int = 2
    dg_degree: int = 2
    numflux_kind: str = "upwind"
    projection: str = "radau_plus"
    limiter_on: bool = False
    tvb: float = 0.0
    reconstruction_start: float = 0.0
    scheme: str = "rk3_7"


@dataclass(frozen=True)
class RunConfig:
    """A test case with optional overrides; None keeps the case default."""

    case: str
    M: Optional[int] = None
    dt: Optional[float] = None
    N: Optional[int] = None
    p: Optional[int] = None
    numflux_kind: Optional[str] = None
    projection: Optional[str] = None
    limiter_on: Optional[bool] = None
    tvb: Optional[float] = None
    reconstruction_start: Optional[float] = None
    scheme: Optional[str] = None
    T: Optional[float] = None
    quad: QuadratureConfig = QuadratureConfig()
    levels: int = 4
    mode: str = "h_refine"
    out_path: Optional[str] = None

    def resolve(self, case: TestCase) -> TestCase:
        """The case with this config's overrides applied."""
        updates = {}
        for cfg_key, case_key in (("M", "n_elements"), ("dt", "dt"),
                                  ("N", "chaos_degree"), ("p", "dg_degree"),
                                  ("numflux_kind", "numflux_kind"),
                                  ("projection", "projection"),
                                  ("limiter_on", "limiter_on"), ("tvb", "tvb"),
                                  ("reconstruction_start", "reconstruction_start"),
                                  ("scheme", "scheme"), ("T", "T")):
            val = getattr(self, cfg_key)
            if val is not None:
                updates[case_key] = val
        return replace(case, **updates) if updates else case


@dataclass
class ConvergenceRow:
    """One line of the convergence table (see ROW_FIELDS for the order)."""

    level: int
    M: int
    h: float
    dt: float
    N: int
    p: int
    error: float
    R_st: float
    R_stoch: float
    E0_st: float
    E0_stoch: float
    bound: float
    exp_factor: float
    eoc_error: float
    eoc_R_st: float
    wall_time: float

    def as_tuple(self):
        return tuple(getattr(self, f) for f in ROW_FIELDS)


@dataclass
class RunResult:
    trajectory: object
    residuals: object
    report: object
    row: ConvergenceRow


def _advection_case() -> TestCase:
    a = 2.0

    def u0(t, x, xi):
        return np.asarray(xi) * (1.0 - 0.5 * np.cos(np.pi * np.asarray(x)))

    def exact(t, x, xi):
        return np.asarray(xi) * (1.0 - 0.5 * np.cos(np.pi * (np.asarray(x) - a * t)))

    return TestCase(
        name="advection_smooth",
        domain=(0.0, 2.0),
        T=0.2,
        flux=FluxLaw.advection(a),
        dist=UniformDistribution(1.0, 3.0),
        u0=RandomField(u0, poly_degree_xi=1),
        source=RandomField.zero(),
        exact=RandomField(exact, poly_degree_xi=1),
        m3_proxy=4.5,
        n_elements=16,
        dt=0.02,
        chaos_degree=2,
        dg_degree=2,
        numflux_kind="upwind",
        projection="radau_plus",
    )


def _burgers_data():
    def u0(t, x, xi):
        return np.asarray(xi) * np.cos(np.pi * np.asarray(x))

    def source(t, x, xi):
        ph = np.pi * (np.asarray(x) - np.asarray(xi) * np.asarray(t))
        return np.pi * np.asarray(xi) ** 2 * np.sin(ph) * (1.0 - np.cos(ph))

    def exact(t, x, xi):
        return np.asarray(xi) * np.cos(np.pi * (np.asarray(x) - np.asarray(xi) * t))

    return (RandomField(u0, poly_degree_xi=1), RandomField(source),
            RandomField(exact))


def _burgers_smooth_case() -> TestCase:
    u0, source, exact = _burgers_data()
    return TestCase(
        name="burgers_smooth",
        domain=(0.0, 2.0),
        T=0.2,
        flux=FluxLaw.burgers(),
        dist=UniformDistribution(1.0, 3.0),
        u0=u0,
        source=source,
        exact=exact,
        m3_proxy=3.0,
        n_elements=16,
        dt=0.008,
        chaos_degree=12,
        dg_degree=2,
        numflux_kind="lax_wendroff",
        projection="gl_interp",
        reconstruction_start=0.008,
    )


def _burgers_shock_case() -> TestCase:
    u0, source, _ = _burgers_data()
    return TestCase(
        name="burgers_shock",
        domain=(0.0, 2.0),
        T=0.56,
        flux=FluxLaw.burgers(),
        dist=UniformDistribution(1.0, 3.0),
        u0=u0,
        source=source,
        exact=None,  # the chaos system develops a shock before T
        m3_proxy=3.0,
        n_elements=16,
        dt=0.008,
        chaos_degree=1,
        dg_degree=2,
        numflux_kind="lax_wendroff",
        projection="gl_interp",
        limiter_on=True,
        reconstruction_start=0.008,
    )


def _riemann_case() -> TestCase:
    def shock_speed(xi):
        return 1.5 + 2.0 * np.asarray(xi)

    def u_of(t, x, xi):
        x, xi = np.asarray(x, dtype=float), np.asarray(xi, dtype=float)
        return np.where(x <= shock_speed(xi) * t, 1.0 + xi, 0.5 + xi)

    return TestCase(
        name="riemann_shock",
        domain=(-1.0, 1.0),
        T=0.1,
        flux=FluxLaw.burgers(),
        dist=UniformDistribution(-0.2, 0.2),
        u0=RandomField(lambda t, x, xi: u_of(0.0, x, xi)),
        source=RandomField.zero(),
        exact=RandomField(u_of),
        shock_locator=lambda xi, t=0.1: float(1.5 + 2.0 * xi) * t,
        m3_proxy=1.2,
        n_elements=512,
        dt=0.0005,
        chaos_degree=4,
        dg_degree=2,
        numflux_kind="upwind",
        projection="gl_interp",
        limiter_on=True,
    )


def registry() -> list:
    """The four reference experiments with their default discretizations."""
    return [_advection_case(), _burgers_smooth_case(), _burgers_shock_case(),
            _riemann_case()]


def get_case(name: str) -> TestCase:
    for case in registry():
        if case.name == name:
            return case
    names = ", ".join(c.name for c in registry())
    raise KeyError(f"unknown case {name!r}; available: {names}")


def validate_exact_solution(case: TestCase, n_samples: int = 5,
                            tol: float = 1e-8) -> float:
    """Max pointwise PDE defect of the exact solution by finite differences.

    Sampled away from any shock; raises if the defect exceeds tol.
    """
    if case.exact is None:
        return 0.0
    rng = np.random.default_rng(0)
    x_lo, x_hi = case.domain
    eps = 1e-6
    worst = 0.0
    for _ in range(n_samples * n_samples):
        t = float(rng.uniform(0.01, case.T))
        x = float(rng.uniform(x_lo, x_hi))
        xi = float(rng.uniform(case.dist.lower, case.dist.upper))
        if case.shock_locator is not None:
            xs = (1.5 + 2.0 * xi) * t
            if abs(x - xs) < 0.05:
                continue
        ex = case.exact
        xv, xiv = np.array([x]), np.array([xi])
        u = float(ex(t, xv, xiv)[0])
        ut = (float(ex(t + eps, xv, xiv)[0]) - float(ex(t - eps, xv, xiv)[0])) / (2 * eps)
        ux = (float(ex(t, xv + eps, xiv)[0]) - float(ex(t, xv - eps, xiv)[0])) / (2 * eps)
        s = 0.0 if case.source.is_zero else float(case.source(t, xv, xiv)[0])
        defect = abs(ut + float(case.flux.df(u)) * ux - s)
        worst = max(worst, defect)
    if worst > tol:
        raise ValueError(f"exact solution of {case.name!r} fails the PDE "
                         f"check: defect {worst:.3e} > {tol:g}")
    return worst


def run(config: RunConfig, level: int = 0,
        prev_row: Optional[ConvergenceRow] = None) -> RunResult:
    """Execute one experiment and assemble its convergence-table row."""
    case = config.resolve(get_case(config.case))
    basis = StochasticBasis(case.dist, case.chaos_degree,
                            n_quad=config.quad.n_stochastic)
    mesh = uniform_mesh(case.domain[0], case.domain[1], case.n_elements)
    space = DGSpace(mesh, case.dg_degree)
    u_init = project_initial(case.u0, space, basis, case.projection)
    numflux = NumericalFlux(case.numflux_kind, case.flux)
    scheme = builtin_schemes()[case.scheme]

    traj = march(u_init, scheme, case.dt, case.T, numflux, case.source,
                 limiter_on=case.limiter_on, tvb=case.tvb)
    rec = SpaceTimeReconstruction(traj, numflux,
                                  start_time=case.reconstruction_start)
    residuals = residual_norms(rec, case.flux, case.source, basis, config.quad)

    # when reconstruction starts after t=0, compare against the exact state
    # at the start time so the split still measures pure projection error
    init_field = case.exact if (case.reconstruction_start > 0.0
                                and case.exact is not None) else case.u0
    e0_st, e0_stoch = initial_error_split(init_field, rec, basis, config.quad)
    residuals.e0_st, residuals.e0_stoch = e0_st, e0_stoch

    err = math.nan
    if case.exact is not None:
        err = exact_error(traj.states[-1], case.exact, basis, config.quad,
                          case.T, shock_locator=case.shock_locator)
    report = compute_bound(rec, residuals, case.flux, config.quad,
                           m3_proxy=case.m3_proxy,
                           exact_error_sq=None if math.isnan(err) else err ** 2)

    r_st = math.sqrt(residuals.r_st_sq)
    eoc_err = eoc_rst = math.nan
    if prev_row is not None:
        if prev_row.error > 0 and err > 0:
            eoc_err = math.log2(prev_row.error / err)
        if prev_row.R_st > 0 and r_st > 0:
            eoc_rst = math.log2(prev_row.R_st / r_st)
    row = ConvergenceRow(
        level=level,
        M=case.n_elements,
        h=(case.domain[1] - case.domain[0]) / case.n_elements,
        dt=case.dt,
        N=case.chaos_degree,
        p=case.dg_degree,
        error=err,
        R_st=r_st,
        R_stoch=math.sqrt(residuals.r_stoch_sq),
        E0_st=e0_st,
        E0_stoch=e0_stoch,
        bound=report.bound_numerical,
        exp_factor=report.exp_factor,
        eoc_error=eoc_err,
        eoc_R_st=eoc_rst,
        wall_time=float(sum(traj.step_seconds)),
    )
    return RunResult(traj, residuals, report, row)


def convergence_study(base: RunConfig, levels: Optional[int] = None,
                      mode: Optional[str] = None,
                      on_row: Optional[Callable] = None) -> list:
    """Table of rows under h-refinement (double M, halve dt) or N-refinement.

    ``on_row(row)`` is called as each row completes, so partial results
    survive a failing finer level.
    """
    levels = base.levels if levels is None else levels
    mode = base.mode if mode is None else mode
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if mode not in ("h_refine", "N_refine"):
        raise ValueError(f"unknown refinement mode {mode!r}")

    case = get_case(base.case)
    M0 = base.M if base.M is not None else case.n_elements
    dt0 = base.dt if base.dt is not None else case.dt
    N0 = base.N if base.N is not None else case.chaos_degree

    rows = []
    prev = None
    for level in range(levels):
        if mode == "h_refine":
            cfg = replace(base, M=M0 * 2 ** level, dt=dt0 / 2 ** level)
        else:
            cfg = replace(base, N=N0 + level)
        result = run(cfg, level=level, prev_row=prev)
        rows.append(result.row)
        prev = result.row
        if on_row is not None:
            on_row(result.row)
    return rows
