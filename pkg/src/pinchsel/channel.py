"""Geometry and effective channel construction for a waveguide-fed array.

Each radiating element (a "pinch" on the guide) contributes, toward a ground
user, the product of a free-space term exp(-j 2 pi d / lambda) / d and a
unit-modulus in-guide propagation phase exp(-j 2 pi s / lambda_g), where s is
the distance travelled from the feed to the pinch. The M x N matrix of these
complex gains is everything the selection algorithms need.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .config import SystemConfig

_SEED_MASK = (1 << 64) - 1


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class UserPlacement:
    """Ground-plane user positions (z = 0 for every user)."""

    positions: tuple[Point3, ...]

    def __post_init__(self) -> None:
        pts = tuple(Point3(*p) for p in self.positions)
        for p in pts:
            if not all(math.isfinite(c) for c in p):
                raise ValueError(f"non-finite user coordinate {p}")
            if p.z != 0.0:
                raise ValueError(f"users must lie on the ground plane, got z={p.z}")
        object.__setattr__(self, "positions", pts)

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Effective complex gains, one row per user, one column per antenna."""

    gains: np.ndarray
    config_snapshot: SystemConfig

    def __post_init__(self) -> None:
        g = np.array(self.gains, dtype=np.complex128)
        if g.ndim != 2 or g.size == 0:
            raise ValueError(f"gains must be a non-empty 2-D array, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("gains must be finite")
        if np.any(g == 0):
            raise ValueError("gains must be nonzero (users cannot sit on an antenna)")
        g.setflags(write=False)
        object.__setattr__(self, "gains", g)

    @property
    def n_users(self) -> int:
        return self.gains.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.gains.shape[1]


def pa_positions(config: SystemConfig) -> list[Point3]:
    """Antenna positions: uniform along the guide, centred on the room.

    The n-th element (1-indexed) sits at x = -L/2 + (2n - 1) L / (2N),
    y = 0, z = H, so spacing is exactly L/N and the layout is symmetric
    about x = 0.
    """
    n, L, H = config.n_antennas, config.room_side, config.height
    return [
        Point3(-L / 2.0 + (2 * k - 1) * L / (2.0 * n), 0.0, H)
        for k in range(1, n + 1)
    ]


def free_space_gain(user: Point3, pa: Point3, wavelength: float) -> complex:
    """Line-of-sight gain exp(-j 2 pi d / lambda) / d between one antenna and one user."""
    d = math.dist(user, pa)
    if d == 0.0:
        raise ValueError("degenerate geometry: user coincides with antenna")
    return cmath.exp(-2j * math.pi * d / wavelength) / d


def waveguide_phase(pa: Point3, feed: Point3, guided_wavelength: float) -> complex:
    """Unit-modulus phase accumulated travelling from the feed to the pinch."""
    if not guided_wavelength > 0.0:
        raise ValueError(f"guided_wavelength must be positive, got {guided_wavelength}")
    s = math.dist(pa, feed)
    return cmath.exp(-2j * math.pi * s / guided_wavelength)


def build_channel_matrix(config: SystemConfig, users: UserPlacement) -> ChannelMatrix:
    """Assemble the M x N effective gain matrix for one placement.

    Vectorised; agrees element-by-element with
    ``free_space_gain(u, p, lambda) * waveguide_phase(p, feed, lambda_g)``.
    """
    if len(users) != config.n_users:
        raise ValueError(
            f"placement has {len(users)} users, config expects {config.n_users}"
        )
    pa_xyz = np.asarray(pa_positions(config), dtype=float)        # (N, 3)
    user_xyz = np.asarray(users.positions, dtype=float)           # (M, 3)
    dist = np.linalg.norm(user_xyz[:, None, :] - pa_xyz[None, :, :], axis=2)
    h = np.exp(-2j * np.pi * dist / config.wavelength) / dist
    guide_dist = np.abs(pa_xyz[:, 0] - config.feed_x)
    g = np.exp(-2j * np.pi * guide_dist / config.guided_wavelength)
    return ChannelMatrix(gains=h * g[None, :], config_snapshot=config)


def sample_users(seed: int, config: SystemConfig) -> UserPlacement:
    """Draw ``n_users`` positions uniformly over the square service area."""
    rng = np.random.default_rng(seed & _SEED_MASK)
    half = config.room_side / 2.0
    xy = rng.uniform(-half, half, size=(config.n_users, 2))
    return UserPlacement(
        positions=tuple(Point3(float(x), float(y), 0.0) for x, y in xy)
    )


def as_gains(B: "ChannelMatrix | np.ndarray | Sequence") -> np.ndarray:
    """Accept a ChannelMatrix or a bare array of gains; return the array."""
    if isinstance(B, ChannelMatrix):
        return B.gains
    g = np.asarray(B, dtype=np.complex128)
    if g.ndim == 1:
        g = g[None, :]
    if g.ndim != 2 or g.size == 0:
        raise ValueError(f"expected an M x N gain array, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite")
    return g
