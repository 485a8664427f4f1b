"""Input validation helpers.

Small, reusable checks used both by the estimator classes and by the
functional API.  All checks raise on failure and return the validated
(possibly converted) array otherwise, in the spirit of scikit-learn's
``check_array``.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPsdMatrixError

UNIT_MODULUS_TOL = 1e-12


def as_complex_matrix(x, name="matrix"):
    """Convert to a 2D complex128 ndarray, requiring finite entries."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_unit_modulus(theta, tol=UNIT_MODULUS_TOL, name="phases"):
    """Validate a 1D complex vector of unit-modulus reflection coefficients."""
    t = np.asarray(theta, dtype=np.complex128)
    if t.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {t.shape}")
    if t.size and np.max(np.abs(np.abs(t) - 1.0)) > tol:
        worst = float(np.max(np.abs(np.abs(t) - 1.0)))
        raise ValueError(f"{name} must be unit modulus (worst deviation {worst:.3e})")
    return t


def check_hermitian(a, tol=1e-10, name="matrix"):
    """Validate that ``a`` is Hermitian within a relative tolerance."""
    a = as_complex_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if scale > 0 and np.linalg.norm(a - a.conj().T) > tol * scale:
        raise ValueError(f"{name} is not Hermitian within tolerance {tol}")
    return a


def check_psd(a, tol=1e-9, name="matrix"):
    """Validate that ``a`` is Hermitian PSD.

    The minimum eigenvalue may be slightly negative due to roundoff; it is
    accepted down to ``-tol * ||a||``.
    """
    a = check_hermitian(a, name=name)
    if a.size == 0:
        return a
    eigs = np.linalg.eigvalsh(a)
    scale = max(float(np.linalg.norm(a)), 1.0)
    if eigs[0] < -tol * scale:
        raise NonPsdMatrixError(
            f"{name} has eigenvalue {eigs[0]:.3e} below -{tol:.0e}*||{name}||"
        )
    return a


def check_channel_list(h_list):
    """Validate a list of per-user channel matrices sharing a common
    number of transmit antennas (trailing dimension)."""
    if len(h_list) == 0:
        raise ValueError("need at least one user channel")
    mats = [as_complex_matrix(h, name=f"channel {k}") for k, h in enumerate(h_list)]
    n_t = mats[0].shape[1]
    for k, m in enumerate(mats):
        if m.shape[1] != n_t:
            raise ValueError(
                f"channel {k} has {m.shape[1]} transmit antennas, expected {n_t}"
            )
    return mats
