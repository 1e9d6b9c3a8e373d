import math

import numpy as np
import pytest

import graphflow as gf
from graphflow.solver import (StepSizeUnderflowError, TruncationConvergenceError,
                              TruncationDeficitError, _integrate)


@pytest.fixture(scope="module")
def z1():
    return gf.lattice_generator(1)


@pytest.fixture(scope="module")
def short_cfg():
    return gf.SolverConfig(p=3.0, instants=gf.log_instants(1e-2, 100.0, 57))


@pytest.fixture(scope="module")
def delta_run(z1, short_cfg):
    return gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), short_cfg)


def test_config_validation():
    good = gf.log_instants(0.1, 10, 5)
    with pytest.raises(ValueError):
        gf.SolverConfig(p=2.0, instants=good)
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=np.array([]))
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=good, rtol=0.0)
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=good, growth_factor=1.0)
    with pytest.raises(ValueError):
        gf.SolverConfig(p=3.0, instants=good, n0=0)
    with pytest.raises(ValueError):
        gf.log_instants(1.0, 0.1, 5)


def test_stepper_against_exact_solution():
    # y' = -y^3  =>  y(t) = (1 + 2t)^(-1/2)
    t_eval = np.geomspace(0.01, 100.0, 30)
    Y, diag = _integrate(lambda t, y: -y ** 3, np.array([1.0]), 100.0, t_eval,
                         1e-10, 1e-14, 10 ** 6)
    exact = (1.0 + 2.0 * t_eval) ** -0.5
    assert np.abs(Y[:, 0] - exact).max() <= 1e-8
    assert diag["total_accepted"] > 0
    assert (np.diff(diag["accepted"]) >= 0).all()


def test_stepper_underflow_reported():
    # an ODE the controller cannot satisfy at an absurd tolerance budget
    def stiff(t, y):
        return np.array([-1e12 * y[0] + math.sin(1e9 * t)])
    with pytest.raises((StepSizeUnderflowError, RuntimeError)):
        _integrate(stiff, np.array([1.0]), 10.0, np.array([10.0]),
                   1e-13, 1e-18, 3000)


def test_zero_data_stays_zero(z1, short_cfg):
    traj = gf.solve_cauchy(z1, gf.Field(z1, {}), short_cfg, center=(0,))
    assert traj.certified
    assert float(np.abs(traj.values).max()) == 0.0


def test_mass_conservation_and_monotone_norms(delta_run):
    traj = delta_run
    assert traj.certified
    assert traj.mass(0.0) == 2.0
    m0 = traj.mass(0.0)
    drift = max(abs(traj.mass(t) - m0) / m0 for t in traj.instants)
    assert drift <= 1e-8
    sups = traj.series(traj.sup_norm)
    assert (np.diff(sups) <= 0).all()
    for q in (1.5, 2.0, 4.0):
        norms = np.array([traj.lq_norm(t, q) for t in traj.instants])
        assert (np.diff(norms) <= 0).all()


def test_first_step_consistency_first_order(z1):
    # (u(t1) - u0)/t1 approaches the generator value with observed order >= 1
    u0 = gf.delta_field(z1, (0,))
    target = gf.apply_plaplacian(z1, u0, 3, (0,))
    errs = []
    for t1 in (1e-3, 5e-4, 2.5e-4):
        cfg = gf.SolverConfig(p=3.0, instants=np.array([t1]))
        traj = gf.solve_truncated(z1, u0, cfg, 8)
        rate = (traj.values[1][traj.region.index[(0,)]] - 1.0) / t1
        errs.append(abs(rate - target))
    assert errs[0] / errs[1] >= 1.8
    assert errs[1] / errs[2] >= 1.8


def test_solution_nonnegative_with_clamp_logged(delta_run):
    assert float(delta_run.values.min()) >= 0.0
    assert (delta_run.diagnostics["clamped"] <= 1e-12).all()


def test_truncated_support_violation(z1, short_cfg):
    u0 = gf.delta_field(z1, (30,))
    with pytest.raises(ValueError):
        gf.solve_truncated(z1, u0, short_cfg, 4, center=(0,))


def test_boundary_leak_triggers_expansion(z1, short_cfg):
    cfg = gf.SolverConfig(p=3.0, instants=short_cfg.instants, n0=2)
    traj = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), cfg)
    assert traj.history[0]["expanded"] == "boundary_leak"
    assert traj.certified
    assert traj.certified_radius > 2


def test_truncation_convergence_failure(z1):
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 10.0, 9),
                          eps_trunc=1e-300, max_expansions=2)
    with pytest.raises(TruncationConvergenceError):
        gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), cfg)


def test_locate_rejects_off_grid(delta_run):
    with pytest.raises(ValueError):
        delta_run.mass(0.12345)


def test_comparison_with_zero_gives_nonnegativity(z1):
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 5.0, 7),
                          rtol=1e-10, atol=1e-14)
    u01 = gf.Field(z1, {(0,): 1.0, (1,): 0.5})
    gap = gf.comparison_check(z1, u01, gf.Field(z1, {}), cfg)
    assert gap >= -1e-8


def test_comparison_scaled_pair(z1):
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 5.0, 7),
                          rtol=1e-10, atol=1e-14)
    u02 = gf.Field(z1, {(0,): 0.5, (2,): 0.25})
    gap = gf.comparison_check(z1, u02.scaled(2.0), u02, cfg)
    assert gap >= -1e-8 * 1.0


def test_comparison_precondition_enforced(z1, short_cfg):
    u01 = gf.Field(z1, {(0,): 1.0})
    u02 = gf.Field(z1, {(1,): 1.0})
    with pytest.raises(ValueError):
        gf.comparison_check(z1, u01, u02, short_cfg)


def test_mass_radius_basics(delta_run):
    assert gf.mass_radius(delta_run, 0.0, 0.5) == 0
    assert gf.mass_radius(delta_run, 0.0, 0.01) == 0
    r_wide = gf.mass_radius(delta_run, 100.0, 0.5)
    r_tight = gf.mass_radius(delta_run, 100.0, 0.01)
    assert r_wide <= r_tight


def test_mass_radius_eps_validation(delta_run):
    with pytest.raises(ValueError):
        gf.mass_radius(delta_run, 1.0, 0.0)


def test_mass_radius_truncation_deficit(z1):
    # a tiny absorbing ball loses most of the mass by t = 100
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 100.0, 9))
    traj = gf.solve_truncated(z1, gf.delta_field(z1, (0,)), cfg, 2)
    assert traj.mass(100.0) < 0.5 * traj.mass(0.0)
    with pytest.raises(TruncationDeficitError):
        gf.mass_radius(traj, 100.0, 0.5)


def test_moment_basics(z1, delta_run):
    assert gf.moment(delta_run, 0.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        gf.moment(delta_run, 1.0, 1.5)
    # data supported outside B_1: moment nondecreasing in alpha
    ring = gf.Field(z1, {(2,): 1.0, (-2,): 1.0, (3,): 0.5})
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 1.0, 5))
    traj = gf.solve_cauchy(z1, ring, cfg, center=(0,))
    alphas = (0.2, 0.5, 0.8)
    for t in (0.0, 1.0):
        vals = [gf.moment(traj, t, a, x0=(0,)) for a in alphas]
        assert vals == sorted(vals)


def test_entropy_integral(delta_run):
    assert gf.gradient_entropy_integral(delta_run, delta_run.instants[0]) > 0
    series = [gf.gradient_entropy_integral(delta_run, t)
              for t in delta_run.instants[::8]]
    assert (np.diff(series) >= 0).all()


def test_entropy_needs_dense_grid(z1):
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 1.0, 5))
    traj = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), cfg)
    with pytest.raises(ValueError):
        gf.gradient_entropy_integral(traj, 1.0)


def test_determinism_bitwise(z1, short_cfg):
    t1 = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), short_cfg)
    t2 = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), short_cfg)
    assert np.array_equal(t1.values, t2.values)
    assert t1.certified_radius == t2.certified_radius


def test_finite_graph_fully_covered_has_no_boundary():
    # a ball that swallows the whole finite graph leaves nothing to leak;
    # mass is then conserved exactly by the antisymmetric flux
    g = gf.generator_from_edges([("a", "b", 1.0), ("b", "c", 1.0),
                                 ("c", "d", 1.0), ("d", "a", 1.0)])
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 20.0, 9), n0=2,
                          max_expansions=3)
    traj = gf.solve_cauchy(g, gf.delta_field(g, "a"), cfg)
    assert traj.certified
    assert all(traj.boundary_sup(t) == 0.0 for t in traj.instants)
    m0 = traj.mass(0.0)
    assert max(abs(traj.mass(t) - m0) for t in traj.instants) <= 1e-12 * m0
    # the flow relaxes toward the constant state on a finite graph
    assert traj.sup_norm(20.0) < 0.5


def test_truncation_differences_decrease(z1):
    # with leak-driven expansion disabled, successive-radius differences are
    # truncation-dominated and shrink monotonically along the schedule
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(1e-2, 100.0, 57),
                          n0=4, eps_trunc=1e-9, delta_boundary=1.0)
    traj = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), cfg)
    diffs = [h["diff_prev"] for h in traj.history if h["diff_prev"] is not None]
    assert len(diffs) >= 2
    assert all(b <= a for a, b in zip(diffs, diffs[1:]))
