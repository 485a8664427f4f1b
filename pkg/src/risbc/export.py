"""Generation of desk-scale solver instances for external validation.

The exported files carry everything an independent checker needs: the
effective channels and power budget for the covariance problem, and the
full channel components plus covariances for single-element phase
probes.  Instances are deliberately small (few users, few antennas, few
reflecting elements) so that off-the-shelf convex solvers and exhaustive
grid searches stay cheap.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .channel import ChannelSet, RisPhases, compose_all
from .covariance import dual_bisection
from .instance_io import Instance, save_instance
from .phases import build_subproblem, optimal_phase


def random_channel_set(rng: np.random.Generator, n_users=2, n_t=4, n_r=2,
                       n_ris=16, direct_scale=1.0, ris_scale=None) -> ChannelSet:
    """Synthetic Gaussian channel set at a rate-friendly scale.

    The surface-to-user entries are scaled by ``1/sqrt(n_ris)`` by default
    so the composed reflected path carries power comparable to the direct
    one and phase optimization has visible effect.
    """
    if ris_scale is None:
        ris_scale = 1.0 / np.sqrt(max(n_ris, 1))

    def crandn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
            / np.sqrt(2.0)

    direct = [direct_scale * crandn(n_r, n_t) for _ in range(n_users)]
    ris_user = [ris_scale * crandn(n_r, n_ris) for _ in range(n_users)]
    bs_ris = crandn(n_ris, n_t)
    return ChannelSet(direct=direct, ris_user=ris_user, bs_ris=bs_ris)


def _desk_dims(rng):
    """Randomized desk-scale dimensions (small enough for convex solvers
    and exhaustive grids)."""
    return {"n_users": int(rng.integers(1, 4)),
            "n_t": int(rng.choice([2, 4, 8])),
            "n_r": 2,
            "n_ris": int(rng.choice([8, 16, 32]))}


def export_covariance_instances(out_dir, count=50, seed=1234, power=1.0) -> list:
    """Write fixed-phase covariance instances with the solver's result."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        channels = random_channel_set(rng, **_desk_dims(rng))
        theta = RisPhases.random(channels.n_ris, seed=rng)
        h_list = compose_all(channels, theta)
        res = dual_bisection(h_list, power)
        inst = Instance(power=power, h_list=h_list,
                        primary={"sum_rate_bits": res.sum_rate_bits,
                                 "mu": res.mu})
        paths.append(save_instance(out / f"covariance_{i:04d}.json", inst))
    return paths


def export_phase_instances(out_dir, count=20, seed=5678, power=1.0) -> list:
    """Write single-element phase probes.

    Each file freezes the state right before one element's update (channel
    components, phases, covariances) together with the closed-form phase
    the solver picks and its objective, so an external grid search can
    verify per-element optimality independently.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        channels = random_channel_set(rng, **_desk_dims(rng))
        theta = RisPhases.random(channels.n_ris, seed=rng)
        h_list = compose_all(channels, theta)
        res = dual_bisection(h_list, power)
        l = int(rng.integers(0, channels.n_ris))
        sub = build_subproblem(channels, theta, res.covariances, l)
        star = optimal_phase(sub)
        kept = star is None
        if kept:
            star = sub.theta_current
        inst = Instance(
            power=power, h_list=h_list,
            components={"direct": channels.direct,
                        "ris_user": channels.ris_user,
                        "bs_ris": channels.bs_ris,
                        "theta": theta.values},
            covariances=res.covariances.matrices,
            primary={"sum_rate_bits": res.sum_rate_bits, "mu": res.mu},
            phase_probe={"l": l,
                         "theta_star": star,
                         "kept_previous": kept,
                         "objective_bits": sub.objective_bits(star)})
        paths.append(save_instance(out / f"phase_{i:04d}.json", inst))
    return paths
