"""System-level configuration for the pinching-antenna activation simulator.

All powers are stored in watts internally; dBm values are converted at the
boundary (CLI / config file). Derived quantities (wavelength, guided
wavelength, path-loss scale) are computed on demand and never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def dbm_to_watts(dbm: float) -> float:
    """Convert a power level in dBm to watts (-90 dBm -> 1e-12 W)."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError(f"power must be positive, got {watts}")
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class SystemConfig:
    """Physical and algorithmic parameters of one deployment.

    A square service area of side ``room_side`` lies on the ground plane;
    the waveguide runs parallel to the x-axis at height ``height`` with
    ``n_antennas`` radiating elements spread uniformly along it. The feed
    sits on the waveguide at x = ``feed_x`` (defaults to the left end,
    next to the base station).
    """

    n_antennas: int = 10
    n_users: int = 1
    room_side: float = 50.0          # m
    height: float = 3.0              # m
    carrier_freq: float = 28e9       # Hz
    refractive_index: float = 1.4    # effective index of the guide
    tx_power: float = dbm_to_watts(10.0)     # W
    noise_power: float = dbm_to_watts(-90.0)  # W
    phase_bins: int = 4
    feed_x: float | None = None      # m; None -> -room_side / 2

    def __post_init__(self) -> None:
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.phase_bins < 1:
            raise ValueError(f"phase_bins must be >= 1, got {self.phase_bins}")
        if not self.room_side > 0.0:
            raise ValueError(f"room_side must be positive, got {self.room_side}")
        if not self.height > 0.0:
            raise ValueError(f"height must be positive, got {self.height}")
        if not self.carrier_freq > 0.0:
            raise ValueError(f"carrier_freq must be positive, got {self.carrier_freq}")
        if self.refractive_index < 1.0:
            raise ValueError(
                f"refractive_index must be >= 1, got {self.refractive_index}"
            )
        if not self.tx_power > 0.0:
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")
        if not self.noise_power > 0.0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")
        if self.feed_x is None:
            object.__setattr__(self, "feed_x", -self.room_side / 2.0)
        if not (math.isfinite(self.wavelength) and self.wavelength > 0.0):
            raise ValueError(f"degenerate wavelength {self.wavelength}")
        if not math.isfinite(self.feed_x):
            raise ValueError(f"feed_x must be finite, got {self.feed_x}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def guided_wavelength(self) -> float:
        return self.wavelength / self.refractive_index

    @property
    def path_loss_scale(self) -> float:
        """Free-space scale factor (lambda / 4 pi)^2 applied to |Z|^2 at the SNR stage."""
        return (self.wavelength / (4.0 * math.pi)) ** 2

    def with_antennas(self, n_antennas: int) -> "SystemConfig":
        return replace(self, n_antennas=n_antennas)
