import io
import math

import numpy as np
import pytest
from scipy.integrate import quad

from bdpde.dynamics import LinearOperator
from bdpde.errors import ConfigurationError
from bdpde.particles import Ensemble, signed_mass
from bdpde.problems import ProblemSpec, benchmark_1d, by_name
from bdpde.solver import SolverConfig, SolverState, init, run, step
from bdpde.vug import NonlinearTerm


def pure_diffusion_problem() -> ProblemSpec:
    """Heat equation with no reaction: the population must never change."""
    u0 = lambda x: np.exp(-np.asarray(x)[:, 0] ** 2)
    return ProblemSpec(
        name="heat",
        dim=1,
        op=LinearOperator(advection=np.zeros(1), diffusion=1.0),
        nonlinear=NonlinearTerm(lambda t, x, u, g: np.zeros_like(u)),
        u0=u0,
        sample_initial=lambda n, rng: rng.normal(scale=math.sqrt(0.5), size=(n, 1)),
        z0=math.sqrt(math.pi),
    )


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SolverConfig(tau=0.1, h=0.1, T=0.35, n0=10)  # T not a multiple of tau
    with pytest.raises(ConfigurationError):
        SolverConfig(tau=0.1, h=0.1, T=1.0, n0=10, method="leapfrog")
    with pytest.raises(ConfigurationError):
        SolverConfig(tau=0.1, h=0.1, T=1.0, n0=10, n_a=1.0)
    with pytest.raises(ConfigurationError):
        SolverConfig(tau=-0.1, h=0.1, T=1.0, n0=10)


def test_resolved_report_times():
    cfg = SolverConfig(tau=0.1, h=0.1, T=2.5, n0=10)
    times = cfg.resolved_report_times()
    assert times[0] == pytest.approx(1.0)
    assert times[-1] == pytest.approx(2.5)
    cfg = SolverConfig(tau=0.1, h=0.1, T=0.5, n0=10)
    assert cfg.resolved_report_times() == [0.5]
    cfg = SolverConfig(tau=0.1, h=0.1, T=0.5, n0=10, report_times=[0.3, 0.1])
    assert cfg.resolved_report_times() == [0.1, 0.3]


def test_zero_reaction_keeps_population_and_mass():
    prob = pure_diffusion_problem()
    cfg = SolverConfig(tau=0.1, h=0.2, T=1.0, n0=4000, seed=5)
    rec = run(prob, cfg)
    counts = [r.particle_count for r in rec.rows]
    assert counts == [4000] * len(counts)
    assert all(r.births == 0 for r in rec.rows)
    # weights are untouched, so the signed mass is exactly conserved
    masses = [r.signed_mass for r in rec.rows]
    assert all(m == masses[0] for m in masses)


def test_first_step_birth_count_matches_quadrature():
    prob = benchmark_1d()
    n0 = 400_000
    cfg = SolverConfig(tau=0.01, h=0.01, T=0.01, n0=n0, seed=2)
    state = init(prob, cfg)
    step(state)
    u0 = lambda x: np.exp(-(x**2)) * (1 + x**4)
    expected, _ = quad(lambda x: abs(u0(x) - u0(x) ** 3), -10, 10, limit=200)
    expected *= n0 * cfg.tau
    # reconstruction bias and MC noise both enter; a few percent is plenty
    assert state.last_births == pytest.approx(expected, rel=0.05)


def test_annihilation_threshold_is_strict():
    prob = pure_diffusion_problem()
    for extra, expect in ((0, False), (1, True)):
        cfg = SolverConfig(tau=0.1, h=0.2, T=1.0, n0=100, n_a=2.0, seed=0)
        n = 2 * 100 + extra
        rng = np.random.default_rng(3)
        state = SolverState(prob, cfg)
        state.ensemble = Ensemble(rng.normal(size=(n, 1)), np.ones(n), 100, time=0.0)
        state.rebuild_grids()
        step(state)
        assert state.last_annihilated is expect
        if expect:
            assert state.ensemble.count() == 100


def test_sawtooth_population_bound():
    prob = benchmark_1d()
    cfg = SolverConfig(tau=0.1, h=0.1, T=10.0, n0=20_000, n_a=2.0, seed=7)
    rec = run(prob, cfg)
    rows = rec.rows
    assert any(r.annihilated for r in rows)
    for r in rows[1:]:
        assert r.particle_count <= cfg.n_a * cfg.n0 + r.births
        if r.annihilated:
            assert r.particle_count == cfg.n0 + r.births


def test_baseline_spm_count_constant():
    prob = benchmark_1d()
    cfg = SolverConfig(tau=0.1, h=0.1, T=2.0, n0=30_000, seed=1, method="baseline_spm")
    rec = run(prob, cfg)
    assert all(r.particle_count == 30_000 for r in rec.rows)
    assert all(r.births == 0 for r in rec.rows)


def test_run_is_deterministic():
    prob = benchmark_1d()
    cfg = SolverConfig(tau=0.1, h=0.1, T=1.0, n0=5000, seed=11)
    a = run(prob, cfg)
    b = run(prob, cfg)
    assert np.array_equal(a.final_ensemble.locations, b.final_ensemble.locations)
    assert np.array_equal(a.final_ensemble.weights, b.final_ensemble.weights)
    for ra, rb in zip(a.rows, b.rows):
        assert (ra.particle_count, ra.births, ra.annihilated) == (
            rb.particle_count,
            rb.births,
            rb.annihilated,
        )
        assert ra.signed_mass == rb.signed_mass


def test_seed_changes_trajectories():
    prob = benchmark_1d()
    base = dict(tau=0.1, h=0.1, T=0.5, n0=5000)
    a = run(prob, SolverConfig(seed=1, **base))
    b = run(prob, SolverConfig(seed=2, **base))
    assert not np.array_equal(a.final_ensemble.locations, b.final_ensemble.locations)


def test_single_step_run_and_csv():
    prob = benchmark_1d()
    cfg = SolverConfig(tau=0.5, h=0.2, T=0.5, n0=2000, seed=0)
    rec = run(prob, cfg)
    assert len(rec.rows) == 2
    assert rec.rows[-1].time == pytest.approx(0.5)
    buf = io.StringIO()
    rec.dump_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].split(",")[:2] == ["time", "particle_count"]
    assert len(lines) == 3


def test_short_run_tracks_reference():
    from bdpde.reference import benchmark_reference

    T = 1.0
    snap = benchmark_reference(T, tau=1e-3, snapshot_times=[T])[T]
    ref = lambda xs, t: np.interp(xs, snap.grid(), snap.values)
    prob = benchmark_1d()
    cfg = SolverConfig(tau=0.05, h=0.05, T=T, n0=200_000, seed=4, report_times=[T])
    rec = run(prob, cfg, reference=ref)
    assert rec.final_error() < 0.15


def test_allen_cahn_2d_error_reported():
    prob = by_name("allen-cahn", 2)
    cfg = SolverConfig(tau=0.1, h=0.4, T=0.5, n0=100_000, seed=3, report_times=[0.5])
    rec = run(prob, cfg)
    assert rec.errors and rec.errors[-1][1] < 1.0
