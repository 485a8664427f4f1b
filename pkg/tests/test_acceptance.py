"""Acceptance suite.

Checks 1-7 are fast property criteria; checks 8-12 evaluate a Monte Carlo
regression at the reference scenario scale (1000 realizations, K in
{2, 4, 6}, Nt in {2, 4, 8, 16}, all three link modes).  Each criterion
prints one PASS/FAIL line (run with ``-s`` or ``-rA`` to see them).

The regression aggregates are deterministic for the fixed master seed and
are cached under ``tests/_artifacts/``; delete that directory to force a
full recompute (~12 minutes on one core).

Checks 9, 10 and the ratio clause of 11 compare against single-point
reference values whose link-mode attribution contradicts the full
reference curve table (REFERENCE_CURVES below): 4.084 is the table's
ris-only value at (K=2, Nt=8) and 2.470 its direct-only value at
(K=6, Nt=2).  Both attributions are asserted - as stated, and with the
table-consistent labels; the as-stated variants of 10 and 11c cannot be
met by a simulator that reproduces the full table and are expected to
fail.  See the reviewer notes outside the package for the full analysis.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from risbc.ao import alternating_optimize, complexity_estimate
from risbc.channel import RisPhases, compose_all
from risbc.covariance import dual_bisection
from risbc.harness import ScenarioConfig, run_scenario
from risbc.phases import build_subproblem, optimal_phase

from conftest import random_channels

# --------------------------------------------------------------------------
# Reference data for the quantitative regression (bits/s/Hz), indexed by
# (mode, K) -> means over Nt in (2, 4, 8, 16).
REFERENCE_NT = (2, 4, 8, 16)
REFERENCE_CURVES = {
    ("both", 2): (3.641, 4.568, 5.978, 7.732),
    ("both", 4): (4.446, 5.817, 7.485, 10.066),
    ("both", 6): (4.919, 6.449, 8.548, 11.689),
    ("ris", 2): (2.645, 3.304, 4.084, 5.068),
    ("ris", 4): (3.226, 3.952, 4.773, 5.765),
    ("ris", 6): (3.474, 4.277, 5.128, 6.094),
    ("direct", 2): (1.690, 2.455, 3.628, 5.307),
    ("direct", 4): (2.184, 3.188, 4.743, 7.156),
    ("direct", 6): (2.470, 3.635, 5.471, 8.343),
}
RELATIVE_TOLERANCE = 0.15   # documents line-of-sight model ambiguity

REGRESSION_SEED = 20250809
REGRESSION_REALIZATIONS = 1000
REGRESSION_K = (2, 4, 6)
REGRESSION_MODES = ("both", "direct", "ris")

_ARTIFACTS = Path(__file__).parent / "_artifacts"

# Populated as earlier criteria run; later criteria assert over them too.
_MU_OBSERVATIONS = []          # (mu, K * n_t / P)
_RECONSTRUCTION_RESIDUALS = []


def report(num, ok, detail=""):
    print(f"[criterion {num:>3}] {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def checked_build_subproblem(channels, phases, covariances, l):
    """build_subproblem plus the reconstruction-identity check used by
    criterion 4 on every call in this suite."""
    sub = build_subproblem(channels, phases, covariances, l)
    h_list = compose_all(channels, phases)
    m = np.eye(channels.n_t, dtype=complex)
    for h, s in zip(h_list, covariances.matrices):
        m += h.conj().T @ s @ h
    t = sub.theta_current
    lhs = sub.a + t * sub.b_full + np.conj(t) * sub.b_full.conj().T
    _RECONSTRUCTION_RESIDUALS.append(
        float(np.linalg.norm(lhs - m) / np.linalg.norm(m)))
    return sub


def desk_instance(rng):
    n_users = int(rng.integers(1, 5))          # K <= 4
    n_t = int(rng.choice([2, 4, 8]))           # Nt <= 8
    n_ris = int(rng.integers(4, 65))           # N_ris <= 64
    return random_channels(rng, n_users=n_users, n_t=n_t, n_r=2, n_ris=n_ris)


def test_criterion_01_ao_monotonicity():
    """200 desk-scale instances: every sum-rate trace is non-decreasing."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        channels = desk_instance(rng)
        report_ao = alternating_optimize(channels, 1.0)
        diffs = np.diff(report_ao.sum_rate_trace)
        if diffs.size:
            worst = min(worst, float(diffs.min()))
        assert np.all(diffs >= -1e-9)
        _MU_OBSERVATIONS.append(
            (report_ao.mu, channels.n_users * channels.n_t / 1.0))
    elapsed = time.perf_counter() - t0
    ok = report(1, worst >= -1e-9 and elapsed < 120.0,
                f"worst trace step {worst:.2e}, {elapsed:.1f}s for 200 runs")
    assert ok


def test_criterion_02_phase_beats_grid():
    """Closed-form phase vs a 3600-point grid on 100 instances."""
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst_gap = 0.0
    for _ in range(100):
        channels = random_channels(rng, n_users=int(rng.integers(1, 4)),
                                   n_t=4, n_r=2, n_ris=int(rng.integers(4, 17)))
        theta = RisPhases.random(channels.n_ris, seed=rng)
        res = dual_bisection(compose_all(channels, theta), 1.0)
        _MU_OBSERVATIONS.append((res.mu, channels.n_users * channels.n_t / 1.0))
        l = int(rng.integers(0, channels.n_ris))
        sub = checked_build_subproblem(channels, theta, res.covariances, l)
        star = optimal_phase(sub)
        if star is None:
            star = sub.theta_current
        val = sub.objective_bits(star)
        grid_best = max(sub.objective_bits(t)
                        for t in np.exp(2j * np.pi * np.arange(3600) / 3600))
        worst_gap = max(worst_gap, grid_best - val)
        assert val >= grid_best - 1e-6
    elapsed = time.perf_counter() - t0
    ok = report(2, worst_gap <= 1e-6 and elapsed < 60.0,
                f"worst gap to grid {worst_gap:.2e} bits, {elapsed:.1f}s for 100")
    assert ok


def test_criterion_03_identity_channel_exact():
    """Forced water-filling: identity channel, one user, power 2."""
    res = dual_bisection([np.eye(2, dtype=complex)], 2.0)
    eps = 1e-4 * (1 * 2 / 2.0)   # default bisection tolerance for this case
    ok_rate = abs(res.sum_rate_bits - 2.0) <= 1e-6
    ok_mu = abs(res.mu - 0.5) <= eps
    ok = report(3, ok_rate and ok_mu,
                f"rate={res.sum_rate_bits:.8f} (target 2 +- 1e-6), "
                f"mu={res.mu:.6f} (target 0.5 +- {eps:g})")
    assert ok


def test_criterion_04_reconstruction_identity():
    """A_l + t B_l + conj(t) B_l^H reassembles I + sum H^H S H at 1e-9."""
    rng = np.random.default_rng(404)
    for _ in range(10):
        channels = random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=8)
        theta = RisPhases.random(channels.n_ris, seed=rng)
        res = dual_bisection(compose_all(channels, theta), 1.0)
        for l in range(channels.n_ris):
            checked_build_subproblem(channels, theta, res.covariances, l)
    worst = max(_RECONSTRUCTION_RESIDUALS)
    ok = report(4, worst <= 1e-9,
                f"worst relative residual {worst:.2e} over "
                f"{len(_RECONSTRUCTION_RESIDUALS)} calls")
    assert ok


def test_criterion_05_multiplier_bound():
    """Returned mu never exceeds K n_t / P (KKT trace bound)."""
    rng = np.random.default_rng(505)
    for _ in range(50):
        channels = desk_instance(rng)
        power = float(rng.uniform(0.25, 4.0))
        res = dual_bisection(compose_all(channels, RisPhases.all_ones(channels.n_ris)),
                             power)
        _MU_OBSERVATIONS.append((res.mu, channels.n_users * channels.n_t / power))
    violations = [m for m, cap in _MU_OBSERVATIONS if not 0 <= m <= cap * (1 + 1e-12)]
    ok = report(5, not violations,
                f"{len(_MU_OBSERVATIONS)} solves, 0 bound violations"
                if not violations else f"{len(violations)} violations")
    assert ok


def test_criterion_06_permutation_invariance():
    """User reordering changes the optimized sum rate by < 1e-6 bits."""
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(20):
        channels = random_channels(rng, n_users=int(rng.integers(2, 5)),
                                   n_t=4, n_r=2, n_ris=8)
        h = compose_all(channels, RisPhases.all_ones(8))
        perm = rng.permutation(len(h))
        r1 = dual_bisection(h, 1.0).sum_rate_bits
        r2 = dual_bisection([h[i] for i in perm], 1.0).sum_rate_bits
        worst = max(worst, abs(r1 - r2))
    ok = report(6, worst < 1e-6, f"worst |difference| {worst:.2e} bits")
    assert ok


def test_criterion_07_complexity_formula():
    value = complexity_estimate(4, 8, 2, 225, 20, 8)
    ok = report(7, value == 368000, f"complexity_estimate(4,8,2,225,20,8) = {value}")
    assert ok


# --------------------------------------------------------------------------
# Quantitative regression (criteria 8-12)

@pytest.fixture(scope="module")
def regression():
    configs = {}
    for mode in REGRESSION_MODES:
        for k in REGRESSION_K:
            configs[f"{mode}_K{k}"] = ScenarioConfig(
                k=k, nt_list=REFERENCE_NT, mode=mode,
                realizations=REGRESSION_REALIZATIONS,
                master_seed=REGRESSION_SEED)
    key = {name: c.to_dict() for name, c in configs.items()}

    cache = _ARTIFACTS / "acceptance_regression.json"
    if cache.exists():
        doc = json.loads(cache.read_text())
        if doc["configs"] == key:
            return doc["table"]

    table = {}
    t0 = time.perf_counter()
    for name, config in configs.items():
        summary, _ = run_scenario(config, write_outputs=False)
        for row in summary["results"]:
            table[f"{row['mode']},{row['K']},{row['Nt']}"] = row
        print(f"  regression {name}: "
              f"{[round(r['mean_sum_rate_bits'], 3) for r in summary['results']]} "
              f"({time.perf_counter() - t0:.0f}s elapsed)")
    _ARTIFACTS.mkdir(exist_ok=True)
    cache.write_text(json.dumps({"configs": key, "table": table},
                                sort_keys=True, indent=1))
    return table


def mean_rate(table, mode, k, nt):
    return table[f"{mode},{k},{nt}"]["mean_sum_rate_bits"]


def _deviation(value, reference):
    return (value - reference) / reference


def test_criterion_08_both_links_reference_point(regression):
    """Both links at (K=4, Nt=8) vs 7.485 bits/s/Hz, +-15%."""
    got = mean_rate(regression, "both", 4, 8)
    dev = _deviation(got, 7.485)
    ok = report(8, abs(dev) <= RELATIVE_TOLERANCE,
                f"mean={got:.3f} vs 7.485 ({100 * dev:+.1f}%, budget +-15%)")
    assert ok


def test_criterion_09_direct_only_reference_point(regression):
    """Direct-only at (K=2, Nt=8) vs 4.084 bits/s/Hz, +-15% (as stated).

    Note: 4.084 is the ris-only entry of REFERENCE_CURVES at this sweep
    point; the direct-only entry is 3.628.  The as-stated comparison still
    passes because the simulated direct-only mean sits within 15% of both.
    """
    got = mean_rate(regression, "direct", 2, 8)
    dev = _deviation(got, 4.084)
    ok = report(9, abs(dev) <= RELATIVE_TOLERANCE,
                f"mean={got:.3f} vs 4.084 as stated ({100 * dev:+.1f}%); "
                f"table-consistent reference 3.628 "
                f"({100 * _deviation(got, 3.628):+.1f}%)")
    assert ok


def test_criterion_09b_direct_only_consistent_labels(regression):
    got = mean_rate(regression, "direct", 2, 8)
    dev = _deviation(got, REFERENCE_CURVES[("direct", 2)][2])
    ok = report("9b", abs(dev) <= RELATIVE_TOLERANCE,
                f"mean={got:.3f} vs table direct-only 3.628 ({100 * dev:+.1f}%)")
    assert ok


def test_criterion_10_ris_only_reference_point(regression):
    """Ris-only at (K=6, Nt=2) vs 2.470 bits/s/Hz, +-15% (as stated).

    Known red: 2.470 is the direct-only entry of REFERENCE_CURVES at this
    sweep point (the ris-only entry is 3.474), so a simulator that
    reproduces the full table cannot land within 15% of it in ris-only
    mode.  Kept as stated deliberately; see criterion 10b.
    """
    got = mean_rate(regression, "ris", 6, 2)
    dev = _deviation(got, 2.470)
    ok = report(10, abs(dev) <= RELATIVE_TOLERANCE,
                f"mean={got:.3f} vs 2.470 as stated ({100 * dev:+.1f}%); "
                f"table-consistent reference 3.474 "
                f"({100 * _deviation(got, 3.474):+.1f}%)")
    assert ok


def test_criterion_10b_ris_only_consistent_labels(regression):
    got = mean_rate(regression, "ris", 6, 2)
    dev = _deviation(got, REFERENCE_CURVES[("ris", 6)][0])
    ok = report("10b", abs(dev) <= RELATIVE_TOLERANCE,
                f"mean={got:.3f} vs table ris-only 3.474 ({100 * dev:+.1f}%)")
    assert ok


def test_criterion_11_ordering_and_shape(regression):
    """Both links dominate single links; means increase in Nt and K."""
    problems = []
    for k in REGRESSION_K:
        for nt in REFERENCE_NT:
            both = mean_rate(regression, "both", k, nt)
            if not both > mean_rate(regression, "direct", k, nt):
                problems.append(f"both<=direct at K={k},Nt={nt}")
            if not both > mean_rate(regression, "ris", k, nt):
                problems.append(f"both<=ris at K={k},Nt={nt}")
    for mode in REGRESSION_MODES:
        for k in REGRESSION_K:
            means = [mean_rate(regression, mode, k, nt) for nt in REFERENCE_NT]
            if not all(b > a for a, b in zip(means, means[1:])):
                problems.append(f"not increasing in Nt for {mode},K={k}")
        for nt in REFERENCE_NT:
            means = [mean_rate(regression, mode, k, nt) for k in REGRESSION_K]
            if not all(b > a for a, b in zip(means, means[1:])):
                problems.append(f"not increasing in K for {mode},Nt={nt}")
    ok = report(11, not problems,
                "orderings and monotone growth in Nt and K hold (24 sweep "
                "points x 3 modes)" if not problems else "; ".join(problems))
    assert ok


def test_criterion_11c_gain_ratio_as_stated(regression):
    """Both-vs-ris ratio at (K=6, Nt=2) in [1.6, 2.4] (as stated).

    Known red: with the table-consistent labels the ~2x reference gap at
    this point is both-vs-direct (4.919/2.470); both-vs-ris is ~1.42
    (4.919/3.474).  See criterion 11d for the label-consistent check.
    """
    ratio = mean_rate(regression, "both", 6, 2) / mean_rate(regression, "ris", 6, 2)
    ok = report("11c", 1.6 <= ratio <= 2.4,
                f"both/ris at (6,2) = {ratio:.3f}, stated bracket [1.6, 2.4]")
    assert ok


def test_criterion_11d_gain_ratio_consistent_labels(regression):
    ratio = mean_rate(regression, "both", 6, 2) / mean_rate(regression, "direct", 6, 2)
    reference = 4.919 / 2.470
    ok = report("11d", 1.6 <= ratio <= 2.4,
                f"both/direct at (6,2) = {ratio:.3f} "
                f"(reference {reference:.2f}, bracket [1.6, 2.4])")
    assert ok


def test_criterion_12_inner_loop_economy(regression):
    """Measured mean inner cycles stay below 4K (observed: below 2K)."""
    problems = []
    observed = {}
    for k in REGRESSION_K:
        means = [regression[f"{mode},{k},{nt}"]["mean_I"]
                 for mode in REGRESSION_MODES for nt in REFERENCE_NT]
        observed[k] = max(means)
        if not observed[k] < 4 * k:
            problems.append(f"K={k}: max mean_I {observed[k]:.2f} >= {4 * k}")
    detail = ", ".join(f"K={k}: max mean_I={v:.2f} (2K={2 * k})"
                       for k, v in observed.items())
    ok = report(12, not problems, detail)
    assert ok


def test_regression_full_table_report(regression):
    """Not a criterion: print the full mean table next to the references."""
    print()
    print(f"{'mode':>7s} {'K':>2s} " + " ".join(f"Nt={nt:<4d}" for nt in REFERENCE_NT))
    for mode in REGRESSION_MODES:
        for k in REGRESSION_K:
            means = [mean_rate(regression, mode, k, nt) for nt in REFERENCE_NT]
            refs = REFERENCE_CURVES[(mode, k)]
            devs = [100 * _deviation(m, r) for m, r in zip(means, refs)]
            print(f"{mode:>7s} {k:>2d} " +
                  " ".join(f"{m:.2f}" for m in means) +
                  "   vs ref " + " ".join(f"{r:.2f}" for r in refs) +
                  "   dev% " + " ".join(f"{d:+.1f}" for d in devs))
    # Failure policy: isolated numerical failures are recorded and
    # excluded from aggregates; more than 1% at any sweep point would
    # already have failed the scenario run inside the fixture.
    failed = {key: row["n_failed"] for key, row in regression.items()
              if row["n_failed"]}
    total = sum(row["n_failed"] + row["n_ok"] for row in regression.values())
    print(f"failed realizations: {sum(failed.values())}/{total} {failed}")
    for key, row in regression.items():
        assert row["n_failed"] <= 0.01 * (row["n_failed"] + row["n_ok"]), \
            f"failure fraction above 1% at {key}"
