"""IID Rayleigh channel generation and uplink transmission sampling.

Shape conventions: a channel matrix is a complex128 ndarray with shape
(n_antennas, n_users); column u is the channel vector of user u.  Received
snapshots follow r = sqrt(P) H s + n with s the unit-power user symbols and
n circularly-symmetric noise of per-entry variance sigma^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi


def substream_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the (seed, key) substream.

    Distinct keys give statistically independent streams, and the mapping is
    stable across processes and thread schedules, so any single trial can be
    redrawn in isolation without replaying the ones before it.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def generate_iid(config: SystemConfig, stream_index: int = 0) -> np.ndarray:
    """Draw an (N, U) matrix of IID CN(0, 1) channel gains.

    Real and imaginary parts are independent N(0, 1/2), so each complex entry
    has unit variance, Rayleigh magnitude, and uniform phase.  The output is
    a pure function of (config.rng_seed, stream_index).
    """
    if stream_index < 0:
        raise InvalidParameterError("stream_index must be >= 0")
    rng = substream_rng(config.rng_seed, stream_index)
    shape = (config.n_antennas, config.n_users)
    h = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return h * np.sqrt(0.5)


def entry_angle(h):
    """Phase of each entry mapped into [0, 2*pi); a zero entry maps to 0.

    A zero gain contributes nothing to any combiner, so pinning its angle is
    only a convention, but it keeps sector assignment total.
    """
    ang = np.mod(np.angle(h), TWO_PI)
    # mod can round tiny negative phases all the way up to 2*pi itself
    ang = np.where(ang >= TWO_PI, 0.0, ang)
    if np.ndim(h) == 0:
        return float(ang)
    return ang


@dataclass(frozen=True, eq=False)
class TransmissionSample:
    """One uplink snapshot: symbols s (U,), noise n (N,), received r (N,)."""

    symbols: np.ndarray
    noise: np.ndarray
    received: np.ndarray


@dataclass(frozen=True, eq=False)
class TransmissionBatch:
    """A block of uplink snapshots sharing one channel realization.

    Arrays are (n_samples, U) for ``symbols`` and (n_samples, N) for
    ``noise`` and ``received``; indexing yields a single TransmissionSample.
    """

    symbols: np.ndarray
    noise: np.ndarray
    received: np.ndarray
    power: float
    noise_var: float

    def __len__(self) -> int:
        return self.symbols.shape[0]

    def __getitem__(self, index: int) -> TransmissionSample:
        return TransmissionSample(
            symbols=self.symbols[index],
            noise=self.noise[index],
            received=self.received[index],
        )


def simulate_transmission(
    H: np.ndarray,
    power: float,
    noise_var: float,
    n_samples: int,
    seed: int,
    stream_index: int = 0,
) -> TransmissionBatch:
    """Sample r = sqrt(P) H s + n with Gaussian unit-power symbols.

    Symbols are circularly-symmetric CN(0, 1) (the paper-facing rate
    expressions assume Gaussian inputs); noise entries are CN(0, noise_var).
    Intended for empirical-versus-analytic SINR validation, not detection.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.size == 0:
        raise InvalidParameterError("H must be a nonempty 2-D array")
    if not power >= 0:
        raise InvalidParameterError("power must be >= 0")
    if not noise_var > 0:
        raise InvalidParameterError("noise_var must be > 0")
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")
    n_ant, n_users = H.shape
    rng = substream_rng(seed, stream_index)
    scale = np.sqrt(0.5)
    symbols = (rng.standard_normal((n_samples, n_users)) + 1j * rng.standard_normal((n_samples, n_users))) * scale
    noise = (rng.standard_normal((n_samples, n_ant)) + 1j * rng.standard_normal((n_samples, n_ant))) * (
        scale * np.sqrt(noise_var)
    )
    received = np.sqrt(power) * (symbols @ H.T) + noise
    return TransmissionBatch(
        symbols=symbols,
        noise=noise,
        received=received,
        power=float(power),
        noise_var=float(noise_var),
    )
