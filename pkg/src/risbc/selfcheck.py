"""Fast property checks on small instances, runnable from the CLI.

Each check prints one PASS/FAIL line; the runner returns True only if
everything passed.  These are smoke-level versions of the full test
suite, meant for quick validation of an installation.
"""

from __future__ import annotations

import numpy as np

from .ao import alternating_optimize, complexity_estimate
from .channel import RisPhases, compose_all
from .covariance import dual_bisection
from .export import random_channel_set
from .phases import build_subproblem, optimal_phase


def _check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return bool(ok)


def run_checks(seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    ok = True

    # Forced single-user water-filling: identity channel, power 2.
    res = dual_bisection([np.eye(2, dtype=complex)], 2.0)
    ok &= _check("identity-channel covariance solve",
                 abs(res.sum_rate_bits - 2.0) < 1e-6 and abs(res.mu - 0.5) < 1e-3,
                 f"rate={res.sum_rate_bits:.8f} mu={res.mu:.6f}")

    # Monotone sum-rate trace of the alternating optimization.
    mono = True
    for _ in range(5):
        channels = random_channel_set(rng, n_users=2, n_t=4, n_r=2, n_ris=12)
        report = alternating_optimize(channels, 1.0)
        diffs = np.diff(report.sum_rate_trace)
        mono &= bool(np.all(diffs >= -1e-9))
    ok &= _check("alternating optimization monotone trace", mono)

    # Closed-form phase beats a 360-point grid.
    beats = True
    for _ in range(5):
        channels = random_channel_set(rng, n_users=2, n_t=4, n_r=2, n_ris=8)
        theta = RisPhases.random(channels.n_ris, seed=rng)
        res = dual_bisection(compose_all(channels, theta), 1.0)
        l = int(rng.integers(0, channels.n_ris))
        sub = build_subproblem(channels, theta, res.covariances, l)
        star = optimal_phase(sub)
        if star is None:
            star = sub.theta_current
        best = sub.objective_bits(star)
        grid = np.exp(1j * 2 * np.pi * np.arange(360) / 360)
        beats &= all(best >= sub.objective_bits(t) - 1e-9 for t in grid)
    ok &= _check("closed-form phase vs 360-point grid", beats)

    # Reconstruction identity of the per-element split.
    recon = True
    for _ in range(3):
        channels = random_channel_set(rng, n_users=2, n_t=4, n_r=2, n_ris=8)
        theta = RisPhases.random(channels.n_ris, seed=rng)
        res = dual_bisection(compose_all(channels, theta), 1.0)
        h_list = compose_all(channels, theta)
        m = np.eye(channels.n_t, dtype=complex)
        for h, s in zip(h_list, res.covariances.matrices):
            m += h.conj().T @ s @ h
        for l in (0, channels.n_ris - 1):
            sub = build_subproblem(channels, theta, res.covariances, l)
            t = theta.values[l]
            lhs = sub.a + t * sub.b_full + np.conj(t) * sub.b_full.conj().T
            recon &= np.linalg.norm(lhs - m) <= 1e-9 * np.linalg.norm(m)
    ok &= _check("phase subproblem reconstruction identity", recon)

    # Sum rate invariant under user reordering.
    channels = random_channel_set(rng, n_users=3, n_t=4, n_r=2, n_ris=8)
    h_list = compose_all(channels, RisPhases.all_ones(channels.n_ris))
    r1 = dual_bisection(h_list, 1.0).sum_rate_bits
    r2 = dual_bisection(h_list[::-1], 1.0).sum_rate_bits
    ok &= _check("user-permutation invariance", abs(r1 - r2) < 1e-6,
                 f"|diff|={abs(r1 - r2):.2e}")

    # Closed-form complexity formula spot value.
    ok &= _check("complexity formula spot value",
                 complexity_estimate(4, 8, 2, 225, 20, 8) == 368000)

    print("overall:", "PASS" if ok else "FAIL")
    return bool(ok)
