"""Sum-power covariance optimization in the dual multiple-access channel.

For fixed effective channels ``H_k`` the problem

    maximize  log2 det(I + sum_k H_k^H S_k H_k)
    s.t.      sum_k tr(S_k) <= P,   S_k >= 0

is concave and is solved by dual decomposition: a bisection on the power
multiplier ``mu`` wraps a cyclic sequence of per-user water-filling
updates, each of which solves its subproblem exactly in closed form.
Internal arithmetic uses natural logs; rates are converted to bits only
at reporting boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import HAVE_NUMBA, cycle_kernel
from .counting import MultCounter
from .errors import ConvergenceError
from .validation import check_channel_list, check_psd

LN2 = np.log(2.0)

# Eigenvalues of H Hbar^-1 H^H below this fraction of the largest are
# treated as zero-power directions (rank handling).
RANK_EPS = 1e-12

# Relative slack allowed on the sum-power constraint of a returned set.
TRACE_SLACK = 1e-6


def logdet_hermitian(m: np.ndarray) -> float:
    """Natural-log determinant of a Hermitian positive-definite matrix."""
    chol = np.linalg.cholesky(m)
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass
class CovarianceSet:
    """Per-user dual-MAC input covariances under a sum-power budget."""

    matrices: list
    power_budget: float

    def total_trace(self) -> float:
        return float(sum(np.real(np.trace(s)) for s in self.matrices))

    def validate(self, psd_tol: float = 1e-9, trace_tol: float = TRACE_SLACK):
        for k, s in enumerate(self.matrices):
            check_psd(s, tol=psd_tol, name=f"covariance {k}")
        if self.total_trace() > self.power_budget * (1.0 + trace_tol):
            raise ValueError(
                f"total trace {self.total_trace():.6g} exceeds budget "
                f"{self.power_budget:.6g}"
            )
        return self


@dataclass
class DualState:
    """Multiplier bracket and bookkeeping of one dual solve."""

    mu: float
    mu_min: float
    mu_max: float
    lagrangian: float = np.nan     # nats
    inner_cycles: int = 0
    inner_updates: int = 0


@dataclass
class BisectionResult:
    covariances: CovarianceSet
    mu: float
    sum_rate_bits: float
    bisection_steps: int
    inner_cycles_total: int
    inner_updates_total: int
    lagrangian: float = np.nan
    brackets: list = field(default_factory=list)   # (mu_min, mu_max) per step
    dual_state: DualState | None = None

    @property
    def mean_inner_cycles(self) -> float:
        if self.bisection_steps == 0:
            return 0.0
        return self.inner_cycles_total / self.bisection_steps


def dual_mac_sum_rate(h_list, covariances, validate: bool = True) -> float:
    """Sum rate ``log2 det(I + sum_k H_k^H S_k H_k)`` in bits/s/Hz."""
    mats = covariances.matrices if isinstance(covariances, CovarianceSet) else covariances
    if validate:
        h_list = check_channel_list(h_list)
        for k, s in enumerate(mats):
            check_psd(s, name=f"covariance {k}")
    n_t = h_list[0].shape[1]
    m = np.eye(n_t, dtype=np.complex128)
    for h, s in zip(h_list, mats):
        m += h.conj().T @ s @ h
    return logdet_hermitian(_hermitize(m)) / LN2


def interference_matrix(h_list, covariances, k: int) -> np.ndarray:
    """``I + sum_{j != k} H_j^H S_j H_j`` (Hermitian, eigenvalues >= 1)."""
    mats = covariances.matrices if isinstance(covariances, CovarianceSet) else covariances
    n_t = h_list[0].shape[1]
    m = np.eye(n_t, dtype=np.complex128)
    for j, (h, s) in enumerate(zip(h_list, mats)):
        if j != k:
            m += h.conj().T @ s @ h
    return _hermitize(m)


def waterfill_update(h_k: np.ndarray, h_bar_k: np.ndarray, mu: float) -> np.ndarray:
    """Exact solution of the per-user subproblem at multiplier ``mu``.

    Eigen-decompose ``H_k Hbar_k^-1 H_k^H = V diag(sigma) V^H`` and pour
    ``(1/mu - 1/sigma_i)_+`` along each eigendirection.
    """
    if mu <= 0:
        raise ValueError("multiplier mu must be strictly positive")
    y = np.linalg.solve(h_bar_k, h_k.conj().T)
    x = _hermitize(h_k @ y)
    sigma, v = np.linalg.eigh(x)
    if sigma.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    cutoff = RANK_EPS * max(sigma[-1], 0.0)
    levels = np.where(sigma > cutoff, 1.0 / mu - 1.0 / np.maximum(sigma, 1e-300), 0.0)
    levels = np.maximum(levels, 0.0)
    return _hermitize((v * levels) @ v.conj().T)


# Nominal multiplication count of one water-filling update (matrix
# inverse, channel quadratic forms, eigen-decomposition, covariance
# reassembly, running-sum refresh).
def _update_cost(n_t: int, n_r: int) -> int:
    return n_t**3 + 2 * n_t * n_r**2 + 2 * n_t**2 * n_r + 2 * n_r**3


class _InnerWorkspace:
    """Running-sum state shared by consecutive inner solves.

    Maintains ``h_sum = I + sum_j H_j^H S_j H_j`` and each user's
    contribution so the per-user interference matrix is obtained by one
    subtraction instead of a full re-accumulation.
    """

    def __init__(self, h_list, s_init=None):
        self.h_list = [np.ascontiguousarray(h, dtype=np.complex128) for h in h_list]
        self.n_t = h_list[0].shape[1]
        if s_init is None:
            self.covs = [np.zeros((h.shape[0], h.shape[0]), dtype=np.complex128)
                         for h in h_list]
        else:
            self.covs = [np.array(s, dtype=np.complex128) for s in s_init]
        self.contrib = [h.conj().T @ s @ h for h, s in zip(self.h_list, self.covs)]
        self.h_sum = np.eye(self.n_t, dtype=np.complex128)
        for c in self.contrib:
            self.h_sum += c
        self.h_sum = _hermitize(self.h_sum)
        self.traces = [float(np.real(np.trace(s))) for s in self.covs]
        n_rs = {h.shape[0] for h in self.h_list}
        self.uniform_n_r = len(n_rs) == 1
        self._h_stack = np.stack(self.h_list) if self.uniform_n_r else None

    def update_user(self, k: int, mu: float):
        h_k = self.h_list[k]
        h_bar = _hermitize(self.h_sum - self.contrib[k])
        s_new = waterfill_update(h_k, h_bar, mu)
        self.covs[k] = s_new
        self.contrib[k] = h_k.conj().T @ s_new @ h_k
        self.h_sum = h_bar + self.contrib[k]
        self.traces[k] = float(np.real(np.trace(s_new)))

    def total_trace(self) -> float:
        return float(sum(self.traces))

    def lagrangian(self, mu: float, power_budget: float) -> float:
        return logdet_hermitian(_hermitize(self.h_sum)) \
            - mu * (self.total_trace() - power_budget)


@dataclass
class InnerSolveInfo:
    cycles: int
    updates: int
    lagrangian: float
    total_trace: float
    lagrangian_per_cycle: list = field(default_factory=list)
    lagrangian_per_update: list | None = None


def inner_cyclic_maximize(h_list, mu: float, power_budget: float,
                          tol: float = 1e-6,
                          s_init=None,
                          max_cycles: int | None = None,
                          track_updates: bool = False,
                          counter: MultCounter | None = None,
                          _workspace: _InnerWorkspace | None = None):
    """Maximize the partial Lagrangian at fixed ``mu`` by cyclic exact
    per-user updates.

    Stops when the Lagrangian changes by less than ``tol`` (nats) between
    consecutive full cycles.  Each single update solves its subproblem
    exactly, so the Lagrangian sequence is non-decreasing up to roundoff.

    Returns ``(covariance list, InnerSolveInfo)``.
    """
    if mu <= 0:
        raise ValueError("multiplier mu must be strictly positive")
    ws = _workspace if _workspace is not None else _InnerWorkspace(h_list, s_init)
    n_users = len(ws.h_list)
    cap = max_cycles if max_cycles is not None else 100 * n_users
    per_cycle = [ws.lagrangian(mu, power_budget)]
    per_update = [per_cycle[0]] if track_updates else None
    updates = 0
    cycles = 0
    if HAVE_NUMBA and ws.uniform_n_r and not track_updates:
        covs = np.stack(ws.covs)
        contrib = np.stack(ws.contrib)
        h_sum = ws.h_sum.copy()
        while True:
            h_sum, logdet, trace = cycle_kernel(ws._h_stack, covs, contrib,
                                                h_sum, mu, RANK_EPS)
            updates += n_users
            cycles += 1
            lag = logdet - mu * (trace - power_budget)
            per_cycle.append(lag)
            if abs(lag - per_cycle[-2]) < tol:
                break
            if cycles >= cap:
                raise ConvergenceError(
                    f"inner cyclic maximization exceeded {cap} cycles "
                    f"at mu={mu:.6g}")
        ws.covs = [covs[k].copy() for k in range(n_users)]
        ws.contrib = [contrib[k].copy() for k in range(n_users)]
        ws.h_sum = h_sum
        ws.traces = [float(np.real(np.trace(s))) for s in ws.covs]
    else:
        while True:
            for k in range(n_users):
                ws.update_user(k, mu)
                updates += 1
                if track_updates:
                    per_update.append(ws.lagrangian(mu, power_budget))
            cycles += 1
            lag = ws.lagrangian(mu, power_budget)
            per_cycle.append(lag)
            if abs(lag - per_cycle[-2]) < tol:
                break
            if cycles >= cap:
                raise ConvergenceError(
                    f"inner cyclic maximization exceeded {cap} cycles "
                    f"at mu={mu:.6g}")
    if counter is not None:
        n_r = max(h.shape[0] for h in ws.h_list)
        counter.covariance += updates * _update_cost(ws.n_t, n_r)
    info = InnerSolveInfo(cycles=cycles, updates=updates, lagrangian=per_cycle[-1],
                          total_trace=ws.total_trace(),
                          lagrangian_per_cycle=per_cycle,
                          lagrangian_per_update=per_update)
    return [s.copy() for s in ws.covs], info


def _rescaled_rate(ws: _InnerWorkspace, power_budget: float):
    """Rate (bits) after scaling the current covariances to use exactly
    the power budget, together with the scale factor."""
    trace = ws.total_trace()
    if trace <= 1e-300:
        return 0.0, 0.0
    c = power_budget / trace
    eye = np.eye(ws.n_t, dtype=np.complex128)
    m = eye + c * (ws.h_sum - eye)
    return logdet_hermitian(_hermitize(m)) / LN2, c


def dual_bisection(h_list, power_budget: float,
                   epsilon: float | None = None,
                   inner_tol: float = 1e-6,
                   max_cycles: int | None = None,
                   bracket: tuple | None = None,
                   s_init=None,
                   counter: MultCounter | None = None,
                   validate: bool = True) -> BisectionResult:
    """Solve the sum-power covariance problem by bisection on ``mu``.

    The multiplier is bracketed by ``[0, K n_t / P]`` (the KKT trace bound
    guarantees the optimum lies inside).  ``bracket`` optionally warm
    starts a narrower interval, which is validated at its endpoints and
    expanded if the subgradient sign shows it no longer contains the
    optimum.  The returned covariances are the best iterate seen, scaled
    to consume exactly the power budget, so the result is always feasible.
    """
    if power_budget <= 0:
        raise ValueError("power budget must be strictly positive")
    if validate:
        h_list = check_channel_list(h_list)
    n_users = len(h_list)
    n_t = h_list[0].shape[1]
    mu_cap = n_users * n_t / power_budget
    eps = epsilon if epsilon is not None else 1e-4 * mu_cap
    if eps <= 0:
        raise ValueError("bisection tolerance must be strictly positive")

    ws = _InnerWorkspace(h_list, s_init)
    steps = 0
    cycles_total = 0
    updates_total = 0

    best_rate = -np.inf
    best_covs = [s.copy() for s in ws.covs]
    best_mu = None
    best_bracket = (0.0, mu_cap)

    if s_init is not None:
        # A feasible warm start is kept as a candidate so a re-solve can
        # never return something worse than its starting point.
        if ws.total_trace() <= power_budget * (1.0 + TRACE_SLACK):
            rate, c = _rescaled_rate(ws, power_budget)
            best_rate = rate
            best_covs = [c * s for s in ws.covs]

    def solve_at(mu, lo_now, hi_now):
        nonlocal steps, cycles_total, updates_total
        nonlocal best_rate, best_covs, best_mu, best_bracket
        _, info = inner_cyclic_maximize(
            h_list, mu, power_budget, tol=inner_tol, max_cycles=max_cycles,
            counter=counter, _workspace=ws)
        steps += 1
        cycles_total += info.cycles
        updates_total += info.updates
        rate, c = _rescaled_rate(ws, power_budget)
        if rate > best_rate:
            best_rate = rate
            best_covs = [c * s for s in ws.covs]
            best_mu = mu
            best_bracket = (lo_now, hi_now)
        return info

    lo, hi = 0.0, mu_cap
    if bracket is not None:
        b_lo = min(max(0.0, bracket[0]), mu_cap)
        b_hi = max(min(mu_cap, bracket[1]), b_lo)
        if b_hi - b_lo >= eps:
            lo, hi = b_lo, b_hi
            # Expand until the subgradient signs bracket the optimum: a
            # raised endpoint certifies the one it replaces, so the lower
            # check is skipped once the upper one has moved.
            raised = False
            while hi < mu_cap:
                if solve_at(hi, lo, hi).total_trace <= power_budget:
                    break
                lo, hi = hi, min(2.0 * hi, mu_cap)
                raised = True
            while not raised and lo > 0.0:
                if solve_at(lo, lo, hi).total_trace >= power_budget:
                    break
                hi = lo
                lo = lo / 2.0 if lo / 2.0 >= eps else 0.0

    last_lagrangian = np.nan
    brackets = [(lo, hi)]
    while hi - lo >= eps:
        mu = 0.5 * (lo + hi)
        info = solve_at(mu, lo, hi)
        last_lagrangian = info.lagrangian
        if power_budget < info.total_trace:
            lo = mu
        else:
            hi = mu
        brackets.append((lo, hi))

    if best_mu is not None:
        mu_final = best_mu
        state_lo, state_hi = best_bracket
    else:
        mu_final = 0.5 * (lo + hi)
        state_lo, state_hi = lo, hi
    covs = CovarianceSet(matrices=best_covs, power_budget=power_budget)
    state = DualState(mu=mu_final, mu_min=state_lo, mu_max=state_hi,
                      lagrangian=last_lagrangian,
                      inner_cycles=cycles_total, inner_updates=updates_total)
    return BisectionResult(
        covariances=covs, mu=mu_final, sum_rate_bits=max(best_rate, 0.0),
        bisection_steps=steps, inner_cycles_total=cycles_total,
        inner_updates_total=updates_total, lagrangian=last_lagrangian,
        brackets=brackets, dual_state=state)
