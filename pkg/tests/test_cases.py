"""Tests for the experiment registry and the convergence harness."""

import math

import numpy as np
import pytest

from sgrkdg.cases import (
    RunConfig,
    registry,
    get_case,
    run,
    convergence_study,
    validate_exact_solution,
)


def test_registry_contains_the_four_experiments():
    names = [c.name for c in registry()]
    assert names == ["advection_smooth", "burgers_smooth", "burgers_shock",
                     "riemann_shock"]


def test_registry_defaults_match_experiment_setups():
    adv = get_case("advection_smooth")
    assert (adv.n_elements, adv.dt, adv.dg_degree) == (16, 0.02, 2)
    assert adv.numflux_kind == "upwind" and adv.projection == "radau_plus"
    bur = get_case("burgers_smooth")
    assert (bur.n_elements, bur.dt) == (16, 0.008)
    assert bur.numflux_kind == "lax_wendroff" and bur.projection == "gl_interp"
    assert bur.reconstruction_start == 0.008
    shock = get_case("burgers_shock")
    assert shock.T == 0.56 and shock.limiter_on and shock.exact is None
    rie = get_case("riemann_shock")
    assert rie.domain == (-1.0, 1.0) and rie.T == 0.1 and rie.limiter_on


def test_unknown_case_error():
    with pytest.raises(KeyError):
        get_case("kpp")


def test_exact_solutions_satisfy_the_pde():
    for case in registry():
        validate_exact_solution(case)


def test_advection_exact_spot_value():
    case = get_case("advection_smooth")
    # at (t, x, xi) = (0.1, 0.2, 2): xi (1 - 0.5 cos(0)) = 2 * 0.5 = 1
    val = float(case.exact(0.1, np.array([0.2]), np.array([2.0]))[0])
    assert abs(val - 1.0) < 1e-14


def test_riemann_exact_spot_value():
    case = get_case("riemann_shock")
    # s(0.1) = 1.7; x = 0 < 0.17 at t = 0.1, so u = 1.1
    val = float(case.exact(0.1, np.array([0.0]), np.array([0.1]))[0])
    assert abs(val - 1.1) < 1e-14


def test_config_overrides_resolve():
    case = get_case("advection_smooth")
    resolved = RunConfig("advection_smooth", M=48, N=5).resolve(case)
    assert resolved.n_elements == 48 and resolved.chaos_degree == 5
    assert resolved.dt == case.dt  # untouched defaults survive


def test_run_on_non_power_of_two_mesh():
    result = run(RunConfig("advection_smooth", M=24, dt=0.01, N=1, T=0.05))
    assert math.isfinite(result.row.error)
    assert result.row.M == 24


def test_run_row_fields():
    result = run(RunConfig("advection_smooth", T=0.04))
    row = result.row
    assert row.level == 0 and row.M == 16 and row.N == 2 and row.p == 2
    assert row.h == pytest.approx(0.125)
    assert math.isnan(row.eoc_error) and math.isnan(row.eoc_R_st)
    assert row.wall_time > 0
    assert row.E0_stoch <= 1e-12  # linear-in-xi data is exactly representable
    assert row.bound >= 0 and row.R_st >= 0 and row.R_stoch >= 0


def test_convergence_study_eoc_definition():
    rows = convergence_study(RunConfig("advection_smooth", N=1, p=1, T=0.1),
                             levels=2, mode="h_refine")
    expected = math.log2(rows[0].error / rows[1].error)
    assert rows[1].eoc_error == pytest.approx(expected)
    assert rows[1].M == 2 * rows[0].M
    assert rows[1].dt == pytest.approx(rows[0].dt / 2)


def test_convergence_study_N_refine_keeps_mesh():
    rows = convergence_study(RunConfig("advection_smooth", N=0, T=0.04),
                             levels=3, mode="N_refine")
    assert [r.N for r in rows] == [0, 1, 2]
    assert len({r.M for r in rows}) == 1
    assert len({r.dt for r in rows}) == 1


def test_convergence_study_flushes_partial_rows():
    seen = []
    rows = convergence_study(RunConfig("advection_smooth", N=0, T=0.04),
                             levels=2, on_row=seen.append)
    assert len(seen) == len(rows) == 2


def test_convergence_study_validation():
    with pytest.raises(ValueError):
        convergence_study(RunConfig("advection_smooth"), levels=0)
    with pytest.raises(ValueError):
        convergence_study(RunConfig("advection_smooth"), levels=2, mode="p_refine")
