"""Rician channel synthesis and effective-channel composition.

One realization consists of a direct matrix ``D_k`` per user, a shared
BS-to-surface matrix ``U``, and a surface-to-user matrix ``G_k`` per
user.  The effective channel seen by user ``k`` under reflection phases
``theta`` is ``H_k = D_k + G_k diag(theta) U``.

Path-loss and noise normalisation are embedded at sampling time:
``D_k`` carries ``sqrt(1 / (beta_dir_k * n0))`` and ``G_k`` carries
``sqrt(1 / (beta_ris_k * n0))``, while ``U`` is left unscaled.  All rate
computations downstream therefore assume unit noise covariance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .counting import MultCounter
from .geometry import (SystemGeometry, UserPlacement, geometry_distances,
                       path_loss_direct, path_loss_ris, ula_response,
                       ura_response)
from .validation import check_unit_modulus

# Substream labels for the counter-based seeding scheme.  Every sampled
# matrix draws from an independent, reproducible stream keyed by
# (seed entropy, role, user index), so results never depend on sampling
# order or on which links are enabled.
ROLE_DIRECT = 0
ROLE_RIS_USER = 1
ROLE_BS_RIS = 2
ROLE_PLACEMENT = 3


def substream(seed, *key) -> np.random.Generator:
    """Independent generator for the given seed entropy and integer key.

    ``seed`` may be an int, a tuple of ints, or a ``SeedSequence``.
    """
    if isinstance(seed, np.random.SeedSequence):
        entropy, base_key = seed.entropy, tuple(seed.spawn_key)
    else:
        entropy, base_key = seed, ()
    ss = np.random.SeedSequence(entropy=entropy, spawn_key=base_key + key)
    return np.random.default_rng(ss)


@dataclass
class RisPhases:
    """Unit-modulus reflection coefficients of the surface elements."""

    values: np.ndarray

    def __post_init__(self):
        self.values = check_unit_modulus(self.values)

    @classmethod
    def all_ones(cls, n: int) -> "RisPhases":
        return cls(np.ones(n, dtype=np.complex128))

    @classmethod
    def random(cls, n: int, seed=None) -> "RisPhases":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return cls(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n)))

    def __len__(self):
        return self.values.size

    def copy(self) -> "RisPhases":
        return RisPhases(self.values.copy())


def phase_vector(phases) -> np.ndarray:
    """Accept ``RisPhases`` or a plain array; return the validated vector."""
    if isinstance(phases, RisPhases):
        return phases.values
    return check_unit_modulus(phases)


@dataclass
class ChannelSet:
    """One channel realization for all users, scalings embedded.

    ``direct[k]`` is ``(n_k, n_t)``, ``ris_user[k]`` is ``(n_k, n_ris)``
    and ``bs_ris`` is ``(n_ris, n_t)``.
    """

    direct: list = field(default_factory=list)
    ris_user: list = field(default_factory=list)
    bs_ris: np.ndarray = None

    def __post_init__(self):
        if len(self.direct) != len(self.ris_user):
            raise ValueError("direct and ris_user must have one matrix per user")
        n_ris, n_t = self.bs_ris.shape
        for k, (d, g) in enumerate(zip(self.direct, self.ris_user)):
            if d.shape != (g.shape[0], n_t):
                raise ValueError(f"user {k}: direct shape {d.shape} inconsistent "
                                 f"with ris_user {g.shape} and bs_ris {self.bs_ris.shape}")
            if g.shape[1] != n_ris:
                raise ValueError(f"user {k}: ris_user has {g.shape[1]} columns, "
                                 f"expected {n_ris}")
            for name, m in (("direct", d), ("ris_user", g)):
                if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
                    raise ValueError(f"user {k}: {name} contains non-finite entries")

    @property
    def n_users(self) -> int:
        return len(self.direct)

    @property
    def n_t(self) -> int:
        return self.bs_ris.shape[1]

    @property
    def n_ris(self) -> int:
        return self.bs_ris.shape[0]

    @property
    def user_antennas(self) -> list:
        return [d.shape[0] for d in self.direct]

    def has_ris_link(self) -> bool:
        return self.n_ris > 0 and any(np.any(g) for g in self.ris_user)


def los_direct(geometry: SystemGeometry, user: UserPlacement) -> np.ndarray:
    """Rank-1 unit-modulus line-of-sight component of the direct link."""
    delta = user.midpoint - geometry.bs_midpoint
    u = delta / np.linalg.norm(delta)
    a_rx = ula_response(user.n_antennas, geometry.s_r, geometry.wavelength, u)
    a_tx = ula_response(geometry.n_t, geometry.s_t, geometry.wavelength, u)
    return np.outer(a_rx, a_tx.conj())


def los_bs_ris(geometry: SystemGeometry) -> np.ndarray:
    """LOS component of the BS-to-surface link, ``(n_ris, n_t)``."""
    delta = geometry.ris_midpoint - geometry.bs_midpoint
    u = delta / np.linalg.norm(delta)
    a_rx = ura_response(geometry.ris_shape, geometry.s_ris, geometry.wavelength, u)
    a_tx = ula_response(geometry.n_t, geometry.s_t, geometry.wavelength, u)
    return np.outer(a_rx, a_tx.conj())


def los_ris_user(geometry: SystemGeometry, user: UserPlacement) -> np.ndarray:
    """LOS component of the surface-to-user link, ``(n_k, n_ris)``."""
    delta = user.midpoint - geometry.ris_midpoint
    u = delta / np.linalg.norm(delta)
    a_rx = ula_response(user.n_antennas, geometry.s_r, geometry.wavelength, u)
    a_tx = ura_response(geometry.ris_shape, geometry.s_ris, geometry.wavelength, u)
    return np.outer(a_rx, a_tx.conj())


def rician_sample(los: np.ndarray, rng: np.random.Generator,
                  rician_factor: float = 1.0) -> np.ndarray:
    """Mix a deterministic LOS matrix with an i.i.d. CN(0,1) NLOS draw.

    With ``rician_factor`` kappa the weights are ``sqrt(kappa/(1+kappa))``
    and ``sqrt(1/(1+kappa))``, preserving unit average entry power.
    """
    nlos = (rng.standard_normal(los.shape) + 1j * rng.standard_normal(los.shape)) \
        / np.sqrt(2.0)
    k = rician_factor
    return np.sqrt(k / (1.0 + k)) * los + np.sqrt(1.0 / (1.0 + k)) * nlos


def sample_channels(geometry: SystemGeometry, placements, seed,
                    rician_factor: float = 1.0,
                    include_direct: bool = True,
                    include_ris: bool = True) -> ChannelSet:
    """Draw one full channel realization.

    Disabled links are returned as zero matrices of the right shape (the
    shared BS-to-surface matrix is always sampled when the surface has
    elements, since it does not depend on user placements).  Identical
    ``seed`` gives a bit-identical result regardless of which links are
    enabled for other users.
    """
    n_ris = geometry.n_ris
    direct, ris_user = [], []
    for k, user in enumerate(placements):
        n_k = user.n_antennas
        if include_direct:
            d_bs_user = geometry_distances(geometry, user).bs_user
            beta = path_loss_direct(d_bs_user, geometry)
            scale = np.sqrt(1.0 / (beta * geometry.n0))
            rng = substream(seed, ROLE_DIRECT, k)
            d_mat = scale * rician_sample(los_direct(geometry, user), rng, rician_factor)
        else:
            d_mat = np.zeros((n_k, geometry.n_t), dtype=np.complex128)
        direct.append(d_mat)

        if include_ris and n_ris > 0:
            beta = path_loss_ris(geometry, user)
            scale = np.sqrt(1.0 / (beta * geometry.n0))
            rng = substream(seed, ROLE_RIS_USER, k)
            g_mat = scale * rician_sample(los_ris_user(geometry, user), rng, rician_factor)
        else:
            g_mat = np.zeros((n_k, n_ris), dtype=np.complex128)
        ris_user.append(g_mat)

    if n_ris > 0:
        rng = substream(seed, ROLE_BS_RIS, 0)
        u_mat = rician_sample(los_bs_ris(geometry), rng, rician_factor)
    else:
        u_mat = np.zeros((0, geometry.n_t), dtype=np.complex128)
    return ChannelSet(direct=direct, ris_user=ris_user, bs_ris=u_mat)


def compose_effective_channel(channels: ChannelSet, phases, k: int) -> np.ndarray:
    """Effective channel of user ``k``: ``D_k + G_k diag(theta) U``."""
    theta = phase_vector(phases)
    if theta.size != channels.n_ris:
        raise ValueError(f"expected {channels.n_ris} phases, got {theta.size}")
    if channels.n_ris == 0:
        return channels.direct[k].copy()
    return channels.direct[k] + (channels.ris_user[k] * theta) @ channels.bs_ris


def compose_all(channels: ChannelSet, phases,
                counter: MultCounter | None = None) -> list:
    """Effective channels of all users, sharing the ``diag(theta) U`` product."""
    theta = phase_vector(phases)
    if theta.size != channels.n_ris:
        raise ValueError(f"expected {channels.n_ris} phases, got {theta.size}")
    if channels.n_ris == 0:
        return [d.copy() for d in channels.direct]
    fu = theta[:, None] * channels.bs_ris
    h_list = [d + g @ fu for d, g in zip(channels.direct, channels.ris_user)]
    if counter is not None:
        n_ris, n_t = channels.bs_ris.shape
        counter.compose += n_ris * n_t
        counter.compose += sum(g.shape[0] for g in channels.ris_user) * n_ris * n_t
    return h_list
