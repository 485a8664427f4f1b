"""scikit-learn style estimator wrappers around the solvers.

Both estimators follow the ``fit`` / fitted-attribute / ``get_params``
conventions so they compose with the wider ecosystem (``clone``,
grid-search over solver tolerances, etc.).  ``X`` is a list of per-user
channel matrices for the covariance solver and a :class:`ChannelSet` for
the joint optimizer; there is no ``y``.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .ao import AoOptions, alternating_optimize
from .channel import ChannelSet
from .covariance import dual_bisection, dual_mac_sum_rate
from .validation import check_channel_list


class DualMacCovarianceSolver(BaseEstimator):
    """Exact sum-power covariance optimizer for fixed channels.

    Parameters
    ----------
    power : float
        Sum transmit power budget.
    epsilon : float or None
        Bisection bracket width on the power multiplier; ``None`` uses
        1e-4 of the multiplier's upper bound.
    inner_tol : float
        Lagrangian convergence threshold (nats) of the cyclic updates.
    max_inner_cycles : int or None
        Cap on cycles per multiplier value; ``None`` uses 100 per user.
    """

    def __init__(self, power=1.0, epsilon=None, inner_tol=1e-6,
                 max_inner_cycles=None):
        self.power = power
        self.epsilon = epsilon
        self.inner_tol = inner_tol
        self.max_inner_cycles = max_inner_cycles

    def fit(self, X, y=None):
        h_list = check_channel_list(X)
        res = dual_bisection(
            h_list, self.power, epsilon=self.epsilon,
            inner_tol=self.inner_tol, max_cycles=self.max_inner_cycles,
            validate=False)
        self.covariances_ = res.covariances
        self.mu_ = res.mu
        self.sum_rate_bits_ = res.sum_rate_bits
        self.n_bisection_steps_ = res.bisection_steps
        self.mean_inner_cycles_ = res.mean_inner_cycles
        return self

    def score(self, X, y=None):
        """Sum rate (bits/s/Hz) of the fitted covariances on channels X."""
        self._check_fitted()
        return dual_mac_sum_rate(X, self.covariances_)

    def _check_fitted(self):
        if not hasattr(self, "covariances_"):
            raise NotFittedError("call fit() first")


class RisSumRateOptimizer(BaseEstimator):
    """Joint covariance / reflection-phase optimizer (alternating).

    ``fit`` expects a :class:`ChannelSet`; fitted attributes expose the
    final phases, covariances, multiplier and the per-iteration sum-rate
    trace.
    """

    def __init__(self, power=1.0, outer_tol=1e-4, max_outer=50,
                 bisection_eps=None, inner_tol=1e-6, init_phases="ones",
                 random_state=None):
        self.power = power
        self.outer_tol = outer_tol
        self.max_outer = max_outer
        self.bisection_eps = bisection_eps
        self.inner_tol = inner_tol
        self.init_phases = init_phases
        self.random_state = random_state

    def _options(self) -> AoOptions:
        return AoOptions(
            outer_tol=self.outer_tol, max_outer=self.max_outer,
            bisection_eps=self.bisection_eps, inner_tol=self.inner_tol,
            init_phases=self.init_phases, phase_seed=self.random_state)

    def fit(self, X, y=None):
        if not isinstance(X, ChannelSet):
            raise TypeError("X must be a ChannelSet")
        report = alternating_optimize(X, self.power, options=self._options())
        self.report_ = report
        self.phases_ = report.phases
        self.covariances_ = report.covariances
        self.mu_ = report.mu
        self.sum_rate_bits_ = report.sum_rate_bits
        self.sum_rate_trace_ = report.sum_rate_trace
        self.n_outer_ = report.outer_iterations
        self.converged_ = report.converged
        return self

    def score(self, X=None, y=None):
        """Final achieved sum rate in bits/s/Hz."""
        if not hasattr(self, "sum_rate_bits_"):
            raise NotFittedError("call fit() first")
        return self.sum_rate_bits_
