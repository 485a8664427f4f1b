"""Outer loop alternating covariance and phase optimization.

One outer iteration solves the covariance problem exactly for the current
phases (dual decomposition) and then sweeps every reflection phase once
(closed-form per-element updates).  Both stages are exact block
maximizations, so the sum rate is non-decreasing along the iteration and
the loop converges to a stationary point of the joint problem (which is
non-convex, so no global-optimality claim is made).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet, RisPhases, compose_all, phase_vector
from .counting import MultCounter
from .covariance import CovarianceSet, dual_bisection
from .phases import PhaseSweeper


@dataclass
class AoOptions:
    """Knobs of the alternating optimization."""

    outer_tol: float = 1e-4          # relative sum-rate change to stop
    max_outer: int = 50
    bisection_eps: float | None = None   # default: 1e-4 * K n_t / P
    inner_tol: float = 1e-6          # Lagrangian change per cycle, nats
    max_inner_cycles: int | None = None  # default: 100 K
    init_phases: str = "ones"        # "ones" | "random"
    phase_seed: int | None = None    # used when init_phases == "random"
    warm_start: bool = True          # reuse mu bracket / covariances across outers
    count_mults: bool = True

    def __post_init__(self):
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.bisection_eps is not None and self.bisection_eps <= 0:
            raise ValueError("bisection_eps must be strictly positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if self.max_inner_cycles is not None and self.max_inner_cycles < 1:
            raise ValueError("max_inner_cycles must be >= 1")
        if self.init_phases not in ("ones", "random"):
            raise ValueError("init_phases must be 'ones' or 'random'")


@dataclass
class AoReport:
    """Outcome of one alternating-optimization run."""

    sum_rate_trace: np.ndarray       # bits/s/Hz after each outer iteration
    covariances: CovarianceSet
    phases: RisPhases
    mu: float
    outer_iterations: int
    converged: bool
    hit_max_outer: bool
    bisection_steps: list = field(default_factory=list)   # per outer
    inner_cycles_mean: list = field(default_factory=list)  # per outer
    counters: MultCounter = field(default_factory=MultCounter)
    estimated_mults_per_outer: float = 0.0
    estimated_mults_total: float = 0.0

    @property
    def sum_rate_bits(self) -> float:
        return float(self.sum_rate_trace[-1])

    @property
    def mean_bisection_steps(self) -> float:
        return float(np.mean(self.bisection_steps)) if self.bisection_steps else 0.0

    @property
    def mean_inner_cycles(self) -> float:
        return float(np.mean(self.inner_cycles_mean)) if self.inner_cycles_mean else 0.0


def complexity_estimate(n_users: int, n_t: int, n_r: int, n_ris: int,
                        bisection_steps, inner_iterations):
    """Leading-order complex-multiplication count of one outer iteration.

    ``bisection_steps * inner_iterations`` scales the water-filling stage;
    the remaining terms cover the per-element phase updates.
    """
    if min(n_users, n_t, n_r, n_ris) < 0:
        raise ValueError("dimensions must be non-negative")
    return (n_users * n_ris * n_t * n_r**2
            + n_users * n_ris * n_t**2 * n_r
            + n_ris * n_t**3
            + bisection_steps * inner_iterations
            * (n_t**3 + n_t * n_r**2 + n_t**2 * n_r + n_r**3))


def initial_phases(n_ris: int, options: AoOptions) -> RisPhases:
    if options.init_phases == "random":
        return RisPhases.random(n_ris, seed=options.phase_seed)
    return RisPhases.all_ones(n_ris)


def alternating_optimize(channels: ChannelSet, power_budget: float,
                         options: AoOptions | None = None,
                         init: RisPhases | np.ndarray | None = None,
                         s_init=None) -> AoReport:
    """Run the alternating optimization to a stationary sum rate.

    ``init`` overrides the starting phases; ``s_init`` optionally warm
    starts the first covariance solve.  The phase sweep is skipped
    entirely when the surface link is absent (no elements, or all
    surface-to-user matrices zero), in which case the loop reduces to the
    fixed-phase covariance solve.
    """
    opts = options if options is not None else AoOptions()
    counter = MultCounter()
    theta = RisPhases(phase_vector(init)) if init is not None \
        else initial_phases(channels.n_ris, opts)
    sweep_active = channels.has_ris_link()

    h_list = compose_all(channels, theta, counter=counter if opts.count_mults else None)
    covs = s_init
    bracket = None
    trace = []
    steps_per_outer = []
    cycles_per_outer = []
    converged = False
    mu = np.nan

    for _ in range(opts.max_outer):
        res = dual_bisection(
            h_list, power_budget,
            epsilon=opts.bisection_eps, inner_tol=opts.inner_tol,
            max_cycles=opts.max_inner_cycles, bracket=bracket, s_init=covs,
            counter=counter if opts.count_mults else None, validate=False)
        covs = res.covariances.matrices
        mu = res.mu
        steps_per_outer.append(res.bisection_steps)
        cycles_per_outer.append(res.mean_inner_cycles)
        rate = res.sum_rate_bits

        if sweep_active:
            sweeper = PhaseSweeper(channels, theta, res.covariances,
                                   counter=counter if opts.count_mults else None)
            sweeper.sweep()
            theta = RisPhases(sweeper.theta)
            h_list = sweeper.h_list
            rate = sweeper.objective_bits()

        trace.append(rate)
        if len(trace) >= 2:
            prev = trace[-2]
            if abs(rate - prev) <= opts.outer_tol * max(abs(prev), 1e-12):
                converged = True
                break
        if opts.warm_start:
            bracket = (mu / 2.0, 2.0 * mu) if mu > 0 else None
        else:
            covs = None

    n_outer = len(trace)
    n_r = max(channels.user_antennas)
    est_per_outer = complexity_estimate(
        channels.n_users, channels.n_t, n_r, channels.n_ris,
        float(np.mean(steps_per_outer)), float(np.mean(cycles_per_outer)))
    return AoReport(
        sum_rate_trace=np.asarray(trace),
        covariances=CovarianceSet(matrices=covs, power_budget=power_budget),
        phases=theta, mu=mu, outer_iterations=n_outer,
        converged=converged, hit_max_outer=not converged,
        bisection_steps=steps_per_outer, inner_cycles_mean=cycles_per_outer,
        counters=counter,
        estimated_mults_per_outer=est_per_outer,
        estimated_mults_total=est_per_outer * n_outer)
