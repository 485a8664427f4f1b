"""Numba-compiled hot loops.

These are drop-in fast paths for the two inner kernels (full phase sweep,
one water-filling cycle) used when every user has the same antenna count,
so the per-user matrices stack into contiguous 3D arrays.  The pure-numpy
implementations in :mod:`covariance` and :mod:`phases` remain the
reference; the kernels compute the same updates in the same order.

Compilation is cached on disk; if numba is unavailable the package falls
back to the numpy paths transparently.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*a, **kw):
        def deco(f):
            return f
        return deco


@njit(cache=True)
def sweep_kernel(theta, hc_stack, m, u, g_stack, sg_stack, c, sigma_eps):
    """One ascending pass of per-element phase updates.

    ``hc_stack`` holds the conjugate-transposed effective channels
    ``H_k^H`` (n_users, n_t, n_r), kept contiguous for the per-element
    matvec.  Mutates ``theta`` and ``hc_stack`` in place and returns the
    updated running matrix ``M = I + sum_k H_k^H S_k H_k``.
    """
    n_users = hc_stack.shape[0]
    n_t = hc_stack.shape[1]
    n_ris = theta.shape[0]
    for l in range(n_ris):
        u_row = u[l]
        t_old = theta[l]
        w = np.zeros(n_t, dtype=np.complex128)
        for k in range(n_users):
            w += hc_stack[k] @ sg_stack[k, :, l]
        b = w - np.conj(t_old) * c[l] * np.conj(u_row)
        b_full = np.outer(b, u_row)
        a = m - t_old * b_full - np.conj(t_old) * np.conj(b_full.T)
        a = 0.5 * (a + np.conj(a.T))
        x = np.linalg.solve(a, b)
        sigma = np.dot(u_row, x)
        if np.abs(sigma) <= sigma_eps * np.linalg.norm(a):
            continue
        t_new = np.exp(-1j * np.angle(sigma))
        m = a + t_new * b_full + np.conj(t_new) * np.conj(b_full.T)
        m = 0.5 * (m + np.conj(m.T))
        dtheta = t_new - t_old
        for k in range(n_users):
            hc_stack[k] += np.conj(dtheta) * np.outer(np.conj(u_row),
                                                      np.conj(g_stack[k, :, l]))
        theta[l] = t_new
    return m


@njit(cache=True)
def cycle_kernel(h_stack, covs, contrib, h_sum, mu, rank_eps):
    """One full cycle of exact per-user water-filling updates.

    Mutates ``covs`` and ``contrib`` in place; returns the refreshed
    running sum, its natural-log determinant, and the total trace.
    """
    n_users, n_r, n_t = h_stack.shape
    for k in range(n_users):
        h_k = h_stack[k]
        h_bar = h_sum - contrib[k]
        h_bar = 0.5 * (h_bar + np.conj(h_bar.T))
        y = np.linalg.solve(h_bar, np.conj(h_k.T))
        x = h_k @ y
        x = 0.5 * (x + np.conj(x.T))
        sigma, v = np.linalg.eigh(x)
        cutoff = rank_eps * max(sigma[-1], 0.0)
        levels = np.zeros(n_r)
        for i in range(n_r):
            if sigma[i] > cutoff:
                lev = 1.0 / mu - 1.0 / sigma[i]
                if lev > 0.0:
                    levels[i] = lev
        s_new = (v * levels.astype(np.complex128)) @ np.conj(v.T)
        s_new = 0.5 * (s_new + np.conj(s_new.T))
        covs[k] = s_new
        contrib[k] = np.conj(h_k.T) @ s_new @ h_k
        h_sum = h_bar + contrib[k]
    h_sum = 0.5 * (h_sum + np.conj(h_sum.T))
    chol = np.linalg.cholesky(h_sum)
    logdet = 0.0
    for i in range(n_t):
        logdet += 2.0 * np.log(np.real(chol[i, i]))
    trace = 0.0
    for k in range(n_users):
        trace += np.real(np.trace(covs[k]))
    return h_sum, logdet, trace


def warmup():
    """Trigger compilation of both kernels on tiny inputs."""
    if not HAVE_NUMBA:
        return
    theta = np.ones(1, dtype=np.complex128)
    h = np.ones((1, 1, 1), dtype=np.complex128)
    hc = np.ones((1, 1, 1), dtype=np.complex128)
    m = np.eye(1, dtype=np.complex128) * 2.0
    u = np.ones((1, 1), dtype=np.complex128)
    g = np.ones((1, 1, 1), dtype=np.complex128)
    sg = np.zeros((1, 1, 1), dtype=np.complex128)
    c = np.zeros(1)
    sweep_kernel(theta, hc, m, u, g, sg, c, 1e-14)
    covs = np.zeros((1, 1, 1), dtype=np.complex128)
    contrib = np.zeros((1, 1, 1), dtype=np.complex128)
    cycle_kernel(h, covs, contrib, m, 0.5, 1e-12)
