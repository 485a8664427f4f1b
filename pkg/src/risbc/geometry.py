"""Deployment geometry, path-loss models, and far-field array responses.

The layout lives in 3D Cartesian coordinates (meters): the base-station
ULA is parallel to the y-axis with midpoint ``(0, l_t, h_t)``, the
reflecting surface is a URA in the xz-plane with midpoint
``(d_ris, 0, h_ris)``, and each user's ULA is parallel to the y-axis with
midpoint ``(d_k, l_k, h_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGeometryError


@dataclass(frozen=True)
class SystemGeometry:
    """Static deployment parameters shared by every user.

    Lengths are meters, powers watts, antenna gains linear.  ``n0`` is the
    noise power in watts; path-loss and noise scalings are later embedded
    directly into the sampled channel matrices so that all rate
    computations can assume unit noise covariance.
    """

    wavelength: float = 0.15
    s_t: float = 0.075            # BS antenna spacing
    s_r: float = 0.075            # user antenna spacing
    s_ris: float = 0.075          # spacing of reflecting elements (both axes)
    l_t: float = 20.0             # BS midpoint y-offset
    h_t: float = 10.0             # BS midpoint height
    d_ris: float = 30.0           # surface midpoint x-coordinate
    h_ris: float = 5.0            # surface midpoint height
    n_t: int = 8                  # BS antennas
    ris_shape: tuple[int, int] = (15, 15)   # (rows, cols) of the URA
    alpha_dir: float = 3.0        # direct-link path-loss exponent
    g_t: float = 2.0              # transmit antenna gain (linear)
    g_r: float = 2.0              # receive antenna gain (linear)
    p_total: float = 1.0          # sum transmit power budget
    n0: float = 1e-11             # noise power (linear watts)

    def __post_init__(self):
        for name in ("wavelength", "s_t", "s_r", "s_ris", "l_t", "h_t",
                     "d_ris", "h_ris", "p_total", "n0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.n_t < 1:
            raise ValueError("n_t must be >= 1")
        rows, cols = self.ris_shape
        if rows < 0 or cols < 0:
            raise ValueError("ris_shape entries must be non-negative")
        if self.alpha_dir < 2:
            raise ValueError("alpha_dir must be >= 2 (free space or worse)")

    @property
    def n_ris(self) -> int:
        rows, cols = self.ris_shape
        return rows * cols

    @property
    def bs_midpoint(self) -> np.ndarray:
        return np.array([0.0, self.l_t, self.h_t])

    @property
    def ris_midpoint(self) -> np.ndarray:
        return np.array([self.d_ris, 0.0, self.h_ris])


@dataclass(frozen=True)
class UserPlacement:
    """Midpoint of one user's ULA and its antenna count."""

    d: float        # x-coordinate, meters
    l: float        # y-coordinate, meters
    h: float        # height, meters
    n_antennas: int = 2

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("d must be strictly positive")
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be >= 1")

    @property
    def midpoint(self) -> np.ndarray:
        return np.array([self.d, self.l, self.h])


class LinkDistances(NamedTuple):
    bs_ris: float    # BS midpoint to surface midpoint
    ris_user: float  # surface midpoint to user midpoint
    bs_user: float   # BS midpoint to user midpoint


def geometry_distances(geometry: SystemGeometry, user: UserPlacement) -> LinkDistances:
    """Euclidean midpoint-to-midpoint distances of the three links."""
    g = geometry
    bs_ris = np.sqrt(g.d_ris**2 + g.l_t**2 + (g.h_t - g.h_ris)**2)
    ris_user = np.sqrt((g.d_ris - user.d)**2 + user.l**2 + (g.h_ris - user.h)**2)
    bs_user = np.sqrt(user.d**2 + (g.l_t - user.l)**2 + (g.h_t - user.h)**2)
    return LinkDistances(float(bs_ris), float(ris_user), float(bs_user))


def path_loss_direct(distance: float, geometry: SystemGeometry) -> float:
    """Distance-dependent power path loss of the BS-to-user link,
    ``(4 pi / wavelength)^2 * d^alpha`` (linear, dimensionless)."""
    if distance <= 0:
        raise ValueError("distance must be strictly positive")
    return (4.0 * np.pi / geometry.wavelength) ** 2 * distance ** geometry.alpha_dir


def path_loss_ris(geometry: SystemGeometry, user: UserPlacement) -> float:
    """Far-field free-space path loss of the two-hop reflected link.

    The inverse loss is
    ``G_t G_r wavelength^4 cos(g_t) cos(g_r) / (256 pi^2 d1^2 d2^2)``
    where the cosines are of the incidence/departure angles measured from
    the surface normal (the y-axis):  ``cos(g_t) = l_t / d1`` and
    ``cos(g_r) = l_k / d2``.

    Raises
    ------
    DegenerateGeometryError
        If the user lies in the surface's plane (``l == 0``), where the
        departure cosine vanishes and the loss is infinite.
    """
    if user.l <= 0:
        raise DegenerateGeometryError(
            "user midpoint lies in the reflecting surface's plane (l == 0); "
            "the reflected link has infinite path loss"
        )
    d = geometry_distances(geometry, user)
    cos_t = geometry.l_t / d.bs_ris
    cos_r = user.l / d.ris_user
    inv_beta = (
        geometry.g_t * geometry.g_r * geometry.wavelength**4 * cos_t * cos_r
        / (256.0 * np.pi**2 * d.bs_ris**2 * d.ris_user**2)
    )
    return 1.0 / inv_beta


def ula_response(n: int, spacing: float, wavelength: float,
                 direction: np.ndarray) -> np.ndarray:
    """Unit-modulus far-field response of an ULA lying along the y-axis.

    ``direction`` is the 3D unit propagation vector; the phase reference
    is the array midpoint, so only the y-component of ``direction``
    enters.
    """
    offsets = (np.arange(n) - (n - 1) / 2.0) * spacing
    return np.exp(2j * np.pi / wavelength * direction[1] * offsets)


def ura_response(shape: tuple[int, int], spacing: float, wavelength: float,
                 direction: np.ndarray) -> np.ndarray:
    """Unit-modulus far-field response of a URA in the xz-plane.

    Elements are indexed row-major (``flat = row * cols + col``) with rows
    stacked along z and columns along x; the phase reference is the array
    midpoint.
    """
    rows, cols = shape
    row_off = (np.arange(rows) - (rows - 1) / 2.0) * spacing
    col_off = (np.arange(cols) - (cols - 1) / 2.0) * spacing
    z = np.repeat(row_off, cols)
    x = np.tile(col_off, rows)
    return np.exp(2j * np.pi / wavelength * (direction[0] * x + direction[2] * z))
