"""Closed-form per-element optimization of the reflection phases.

With covariances fixed, the sum-rate objective as a function of a single
reflection coefficient ``theta_l`` (all others held) is

    log2 det(A_l + theta_l B_l + conj(theta_l) B_l^H)

where ``A_l`` is Hermitian with eigenvalues >= 1 and ``B_l = b_l u_l`` has
rank <= 1 (``u_l`` is the l-th row of the BS-to-surface matrix).  The
unit-modulus maximizer is ``exp(-1j * arg(sigma_l))`` with
``sigma_l = u_l A_l^-1 b_l``, the only non-zero eigenvalue of
``A_l^-1 B_l``.  A sweep applies this update to every element in
ascending order, maintaining the running matrix
``M = I + sum_k H_k^H S_k H_k`` incrementally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import HAVE_NUMBA, sweep_kernel
from .channel import ChannelSet, RisPhases, compose_all, phase_vector
from .counting import MultCounter
from .covariance import LN2, CovarianceSet, logdet_hermitian, _hermitize

# |sigma| below this fraction of ||A_l|| means the phase has no effect on
# the objective; the previous value is kept for determinism.
SIGMA_EPS = 1e-14


@dataclass
class PhaseSubproblem:
    """One element's quadratic objective data.

    ``rank1_left`` is ``b_l`` so that ``B_l = outer(b_l, u_row)``; the
    full objective matrix at phase ``t`` is
    ``a + t * B_l + conj(t) * B_l^H``.
    """

    a: np.ndarray            # (n_t, n_t) Hermitian, eigenvalues >= 1
    rank1_left: np.ndarray   # (n_t,) column factor of B_l
    u_row: np.ndarray        # (n_t,) row factor of B_l
    index: int               # element index l
    theta_current: complex   # phase in effect when the data was built

    @property
    def b_full(self) -> np.ndarray:
        return np.outer(self.rank1_left, self.u_row)

    def objective_bits(self, theta: complex) -> float:
        """log2 det of the objective matrix at the given phase."""
        b = self.b_full
        m = self.a + theta * b + np.conj(theta) * b.conj().T
        return logdet_hermitian(_hermitize(m)) / LN2


def build_subproblem(channels: ChannelSet, phases, covariances: CovarianceSet,
                     l: int) -> PhaseSubproblem:
    """Assemble ``A_l`` and the factored ``B_l`` for element ``l``.

    Built directly from the channel components: with
    ``C_k = H_k - theta_l g_{k,l} u_l`` (the effective channel with
    element ``l`` removed),

        A_l = I + sum_k [ C_k^H S_k C_k
                          + (g_{k,l}^H S_k g_{k,l}) u_l^H u_l ]
        b_l = sum_k C_k^H S_k g_{k,l}

    which satisfies the reconstruction identity
    ``A_l + theta_l B_l + conj(theta_l) B_l^H = I + sum_k H_k^H S_k H_k``.
    """
    theta = phase_vector(phases)
    n_t = channels.n_t
    u_row = channels.bs_ris[l]
    h_list = compose_all(channels, theta)
    a = np.eye(n_t, dtype=np.complex128)
    b = np.zeros(n_t, dtype=np.complex128)
    uu = np.outer(u_row.conj(), u_row)
    for k in range(channels.n_users):
        s = covariances.matrices[k]
        g = channels.ris_user[k][:, l]
        c = h_list[k] - theta[l] * np.outer(g, u_row)
        sc = s @ c
        sg = s @ g
        a += c.conj().T @ sc + np.real(np.vdot(g, sg)) * uu
        b += c.conj().T @ sg
    return PhaseSubproblem(a=_hermitize(a), rank1_left=b, u_row=u_row.copy(),
                           index=l, theta_current=complex(theta[l]))


def optimal_phase(sub: PhaseSubproblem):
    """Unit-modulus phase maximizing the element's objective.

    ``sigma`` is evaluated as ``u_l A_l^-1 b_l`` (the trace of the rank-1
    product), avoiding a full eigen-decomposition.  Returns ``None`` when
    the objective does not depend on the phase (``|sigma|`` negligible),
    meaning the previous value should be kept.
    """
    x = np.linalg.solve(sub.a, sub.rank1_left)
    sigma = complex(sub.u_row @ x)
    if abs(sigma) <= SIGMA_EPS * np.linalg.norm(sub.a):
        return None
    return np.exp(-1j * np.angle(sigma))


class PhaseSweeper:
    """Sequential full-surface sweep with incremental state.

    Owns the working copies of the effective channels and of
    ``M = I + sum_k H_k^H S_k H_k``; each element update is O(n_t^3) and
    its write-back is immediately visible to subsequent elements.
    """

    def __init__(self, channels: ChannelSet, phases, covariances: CovarianceSet,
                 counter: MultCounter | None = None):
        self.channels = channels
        self.covariances = covariances
        self.counter = counter
        self.theta = phase_vector(phases).copy()
        self.h_list = compose_all(channels, self.theta, counter=counter)
        self.n_t = channels.n_t
        m = np.eye(self.n_t, dtype=np.complex128)
        for h, s in zip(self.h_list, covariances.matrices):
            m += h.conj().T @ s @ h
        self.m = _hermitize(m)
        # S_k G_k and the scalars g^H S g are constant over a sweep.
        self._sg = [s @ g for s, g in zip(covariances.matrices, channels.ris_user)]
        self._c = np.zeros(channels.n_ris)
        for g, sg in zip(channels.ris_user, self._sg):
            self._c += np.real(np.sum(g.conj() * sg, axis=0))

    def objective_bits(self) -> float:
        return logdet_hermitian(self.m) / LN2

    def update_element(self, l: int) -> complex:
        """Optimize one element in place; returns the phase in effect after."""
        u_row = self.channels.bs_ris[l]
        t_old = self.theta[l]
        w = np.zeros(self.n_t, dtype=np.complex128)
        for h, sg in zip(self.h_list, self._sg):
            w += h.conj().T @ sg[:, l]
        b = w - np.conj(t_old) * self._c[l] * u_row.conj()
        b_full = np.outer(b, u_row)
        a = self.m - t_old * b_full - np.conj(t_old) * b_full.conj().T
        a = _hermitize(a)
        x = np.linalg.solve(a, b)
        sigma = complex(u_row @ x)
        if self.counter is not None:
            n_rs = [h.shape[0] for h in self.h_list]
            self.counter.phase += sum(
                self.n_t * nr**2 + 2 * self.n_t**2 * nr for nr in n_rs)
            self.counter.phase += 2 * self.n_t**3
        if abs(sigma) <= SIGMA_EPS * np.linalg.norm(a):
            return t_old
        t_new = np.exp(-1j * np.angle(sigma))
        self.m = _hermitize(a + t_new * b_full + np.conj(t_new) * b_full.conj().T)
        dt = t_new - t_old
        for h, g in zip(self.h_list, self.channels.ris_user):
            h += dt * np.outer(g[:, l], u_row)
        self.theta[l] = t_new
        return t_new

    def _sweep_compiled(self) -> bool:
        """Stacked-array fast path; returns False when not applicable."""
        n_rs = {h.shape[0] for h in self.h_list}
        if not (HAVE_NUMBA and len(n_rs) == 1 and self.channels.n_ris > 0):
            return False
        hc_stack = np.stack([h.conj().T for h in self.h_list])
        self.m = sweep_kernel(
            self.theta, hc_stack, self.m, self.channels.bs_ris,
            np.stack(self.channels.ris_user), np.stack(self._sg),
            self._c, SIGMA_EPS)
        if self.counter is not None:
            n_r = n_rs.pop()
            n_users = len(self.h_list)
            self.counter.phase += self.channels.n_ris * (
                n_users * (self.n_t * n_r**2 + 2 * self.n_t**2 * n_r)
                + 2 * self.n_t**3)
        return True

    def sweep(self, record_objective: bool = False, order=None):
        """One pass over all elements, ascending by default.

        ``order`` optionally permutes the visit order (diagnostic).  With
        ``record_objective`` the per-element objective trace is returned
        alongside the phases (diagnostic; costs one log-det per element).
        Either diagnostic disables the compiled path.
        """
        trace = [self.objective_bits()] if record_objective else None
        plain = not record_objective and order is None
        if not (plain and self._sweep_compiled()):
            elements = range(self.channels.n_ris) if order is None else order
            for l in elements:
                self.update_element(l)
                if record_objective:
                    trace.append(self.objective_bits())
        # Refresh the incremental state from scratch once per sweep so
        # roundoff drift cannot accumulate across outer iterations.
        self.h_list = compose_all(self.channels, self.theta, counter=self.counter)
        m = np.eye(self.n_t, dtype=np.complex128)
        for h, s in zip(self.h_list, self.covariances.matrices):
            m += h.conj().T @ s @ h
        self.m = _hermitize(m)
        return trace


def sweep_all_phases(channels: ChannelSet, phases, covariances: CovarianceSet,
                     counter: MultCounter | None = None,
                     record_objective: bool = False,
                     order=None):
    """Optimize every element once, in ascending order by default.

    ``order`` optionally gives a diagnostic permutation of element
    indices.  Returns ``(RisPhases, objective_bits)`` or, with
    ``record_objective``, ``(RisPhases, objective_bits, per-element
    trace)``.
    """
    sweeper = PhaseSweeper(channels, phases, covariances, counter=counter)
    trace = sweeper.sweep(record_objective=record_objective, order=order)
    result = RisPhases(sweeper.theta)
    if record_objective:
        return result, sweeper.objective_bits(), trace
    return result, sweeper.objective_bits()
