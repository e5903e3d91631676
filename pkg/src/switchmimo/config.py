"""System-level configuration shared by the simulation modules."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError

_UINT64_MAX = 2**64 - 1


def _require(condition: bool, field: str, rule: str) -> None:
    if not condition:
        raise InvalidParameterError(f"{field} {rule}")


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and operating point of the uplink simulation.

    Attributes
    ----------
    n_antennas : receive antennas at the base station (N).
    n_users : single-antenna uplink users (U).
    n_phases : constant phase shifters available per RF chain (N_Q).
    n_rf_chains : RF chains at the receiver; must be >= n_users.  Defaults to
        n_users, which is also the number of chains the simulator actually
        operates (one per served user).
    snr_linear : per-user receive SNR rho = P / sigma^2, linear scale.
    rng_seed : base seed for every random draw tied to this configuration.
    """

    n_antennas: int
    n_users: int
    n_phases: int
    n_rf_chains: int | None = None
    snr_linear: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_rf_chains is None:
            object.__setattr__(self, "n_rf_chains", self.n_users)
        for field in ("n_antennas", "n_users", "n_phases", "n_rf_chains", "rng_seed"):
            value = getattr(self, field)
            _require(isinstance(value, int) and not isinstance(value, bool), field, "must be an integer")
        _require(self.n_users >= 1, "n_users", "must be >= 1")
        _require(self.n_antennas >= self.n_users, "n_antennas", "must be >= n_users")
        _require(self.n_phases >= 1, "n_phases", "must be >= 1")
        _require(self.n_rf_chains >= self.n_users, "n_rf_chains", "must be >= n_users")
        _require(
            isinstance(self.snr_linear, (int, float)) and not isinstance(self.snr_linear, bool),
            "snr_linear",
            "must be a number",
        )
        _require(math.isfinite(self.snr_linear) and self.snr_linear >= 0, "snr_linear", "must be finite and >= 0")
        _require(0 <= self.rng_seed <= _UINT64_MAX, "rng_seed", "must fit in an unsigned 64-bit integer")
