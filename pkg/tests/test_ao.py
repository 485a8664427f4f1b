import numpy as np
import pytest

from risbc.ao import (AoOptions, alternating_optimize, complexity_estimate,
                      initial_phases)
from risbc.channel import RisPhases, compose_all
from risbc.covariance import dual_bisection
from risbc.phases import sweep_all_phases

from conftest import random_channels


class TestComplexityEstimate:
    def test_reference_value(self):
        # 28800 + 115200 + 115200 + 160*680, evaluated by hand.
        assert complexity_estimate(4, 8, 2, 225, 20, 8) == 368000

    def test_all_zero(self):
        assert complexity_estimate(0, 0, 0, 0, 0, 0) == 0

    def test_single_inner_solve_no_surface(self):
        n_t, n_r = 6, 3
        expected = n_t**3 + n_t * n_r**2 + n_t**2 * n_r + n_r**3
        assert complexity_estimate(2, n_t, n_r, 0, 1, 1) == expected

    def test_integer_exactness(self):
        assert isinstance(complexity_estimate(4, 8, 2, 225, 20, 8), int)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            complexity_estimate(-1, 8, 2, 225, 20, 8)


class TestAlternatingOptimize:
    def test_monotone_trace(self, rng):
        for _ in range(5):
            cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=16)
            report = alternating_optimize(cs, 1.0)
            assert np.all(np.diff(report.sum_rate_trace) >= -1e-9)
            assert report.converged

    def test_disconnected_surface_reduces_to_fixed_phase(self, rng):
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=16,
                             ris_scale=0.0)
        report = alternating_optimize(cs, 1.0)
        assert report.outer_iterations <= 2
        fixed = dual_bisection(compose_all(cs, report.phases), 1.0)
        assert report.sum_rate_bits == pytest.approx(fixed.sum_rate_bits, abs=1e-9)
        assert np.array_equal(report.phases.values, np.ones(16, complex))

    def test_no_surface_matches_bisection(self, rng):
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=0)
        report = alternating_optimize(cs, 1.0)
        direct = dual_bisection([d.copy() for d in cs.direct], 1.0)
        assert report.sum_rate_bits == pytest.approx(direct.sum_rate_bits, abs=1e-9)

    def test_beats_random_restarts(self, rng):
        # Final value must dominate the fixed-phase optimum at the initial
        # phases and at 100 random phase draws.
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=16)
        report = alternating_optimize(cs, 1.0)
        baseline = dual_bisection(compose_all(cs, RisPhases.all_ones(16)), 1.0)
        best = baseline.sum_rate_bits
        for i in range(100):
            theta = RisPhases.random(16, seed=rng)
            best = max(best, dual_bisection(compose_all(cs, theta), 1.0).sum_rate_bits)
        assert report.sum_rate_bits >= best - 1e-6

    def test_stationarity_at_exit(self, rng):
        opts = AoOptions(outer_tol=1e-4)
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=16)
        report = alternating_optimize(cs, 1.0, opts)
        rate = report.sum_rate_bits
        slack = 10 * opts.outer_tol * rate
        extra_cov = dual_bisection(compose_all(cs, report.phases), 1.0,
                                   s_init=report.covariances.matrices)
        assert extra_cov.sum_rate_bits - rate < slack
        _, rate_sweep = sweep_all_phases(cs, report.phases, extra_cov.covariances)
        assert rate_sweep - extra_cov.sum_rate_bits < slack

    def test_random_initial_phases_reproducible(self, rng):
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=8)
        opts = AoOptions(init_phases="random", phase_seed=11)
        r1 = alternating_optimize(cs, 1.0, opts)
        r2 = alternating_optimize(cs, 1.0, opts)
        assert r1.sum_rate_bits == r2.sum_rate_bits
        assert np.array_equal(r1.phases.values, r2.phases.values)

    def test_warm_start_off_same_answer(self, rng):
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=12)
        warm = alternating_optimize(cs, 1.0, AoOptions(warm_start=True))
        cold = alternating_optimize(cs, 1.0, AoOptions(warm_start=False))
        assert warm.sum_rate_bits == pytest.approx(cold.sum_rate_bits,
                                                   rel=5e-4)

    def test_report_bookkeeping(self, rng):
        cs = random_channels(rng, n_users=3, n_t=4, n_r=2, n_ris=8)
        report = alternating_optimize(cs, 1.0)
        assert report.outer_iterations == len(report.sum_rate_trace)
        assert len(report.bisection_steps) == report.outer_iterations
        assert report.mean_bisection_steps > 0
        assert report.mean_inner_cycles > 0
        assert report.counters.total > 0
        assert report.estimated_mults_total == pytest.approx(
            report.estimated_mults_per_outer * report.outer_iterations)
        report.covariances.validate()

    def test_counted_mults_track_bisection_work(self, rng):
        # The water-filling stage's counted multiplications must scale
        # linearly with measured (bisection steps x inner cycles); sweep
        # the bisection tolerance to vary the step count.
        cs = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=8)
        xs, ys = [], []
        for eps_rel in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5):
            eps = eps_rel * 2 * 4 / 1.0
            report = alternating_optimize(cs, 1.0, AoOptions(bisection_eps=eps))
            xs.append(report.mean_bisection_steps * report.mean_inner_cycles
                      * report.outer_iterations)
            ys.append(report.counters.covariance)
        r = np.corrcoef(xs, ys)[0, 1]
        assert r > 0.99

    def test_options_validation(self):
        with pytest.raises(ValueError):
            AoOptions(outer_tol=0.0)
        with pytest.raises(ValueError):
            AoOptions(max_outer=0)
        with pytest.raises(ValueError):
            AoOptions(init_phases="fourier")

    def test_initial_phases_policies(self):
        ones = initial_phases(5, AoOptions())
        assert np.array_equal(ones.values, np.ones(5, complex))
        rand = initial_phases(5, AoOptions(init_phases="random", phase_seed=3))
        assert np.allclose(np.abs(rand.values), 1.0)
        assert not np.allclose(rand.values, 1.0)
