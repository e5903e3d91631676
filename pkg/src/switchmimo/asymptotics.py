"""Closed-form large-array performance limits and their numerical checks.

The central quantity is the asymptotic fraction of the matched-filter SNR
retained by quasi-coherent switch combining with N_Q shifters,

    gamma(N_Q) = N_Q^2 / (4 pi) * sin^2(pi / N_Q),

which increases from 0 at N_Q = 1 to pi/4 (the equal-gain-combining ratio)
as N_Q -> inf.  The multi-user SINR limit at fixed loading N/U is
(N/U) * gamma(N_Q) and the rate limit is log2 of one plus that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import entry_angle, generate_iid
from .config import SystemConfig
from .errors import InsufficientSamplesError, InvalidParameterError

_SQRT_PI_HALF = np.sqrt(np.pi) / 2.0  # E|h| for CN(0,1): Rayleigh mean


def _check_nq(n_phases: int) -> int:
    if not isinstance(n_phases, (int, np.integer)) or isinstance(n_phases, bool) or n_phases < 1:
        raise InvalidParameterError("n_phases must be an integer >= 1")
    return int(n_phases)


def gamma_factor(n_phases: int) -> float:
    """Asymptotic switch-combining / matched-filter SNR ratio."""
    nq = _check_nq(n_phases)
    if nq == 1:
        return 0.0  # sin(pi) is not a float zero, but the limit is exactly 0
    return float(nq * nq / (4.0 * np.pi) * np.sin(np.pi / nq) ** 2)


def sinr_limit(n_antennas: int, n_users: int, n_phases: int) -> float:
    """Almost-sure multi-user SINR limit (N/U) * gamma(N_Q) at fixed loading."""
    if not (isinstance(n_antennas, (int, np.integer)) and isinstance(n_users, (int, np.integer))):
        raise InvalidParameterError("n_antennas and n_users must be integers")
    if n_users < 1 or n_antennas < n_users:
        raise InvalidParameterError("need n_antennas >= n_users >= 1")
    return float(n_antennas / n_users * gamma_factor(n_phases))


def rate_limit(n_antennas: int, n_users: int, n_phases: int) -> float:
    """Almost-sure per-user rate limit log2(1 + (N/U) gamma(N_Q)), bits/s/Hz."""
    return float(np.log2(1.0 + sinr_limit(n_antennas, n_users, n_phases)))


@dataclass(frozen=True)
class AsymptoticPrediction:
    """gamma, SINR, and rate limits bundled with the generating parameters."""

    n_antennas: int
    n_users: int
    n_phases: int
    gamma: float
    sinr: float
    rate: float


def predict(n_antennas: int, n_users: int, n_phases: int) -> AsymptoticPrediction:
    return AsymptoticPrediction(
        n_antennas=int(n_antennas),
        n_users=int(n_users),
        n_phases=int(n_phases),
        gamma=gamma_factor(n_phases),
        sinr=sinr_limit(n_antennas, n_users, n_phases),
        rate=rate_limit(n_antennas, n_users, n_phases),
    )


def appendix_identity_check(n_phases: int) -> tuple[float, float, float]:
    """Both closed forms of the limit constant and their absolute difference.

    The unreduced form N_Q^2/(16 pi) * (sin^2(2 pi/N_Q) + (1 - cos(2 pi/N_Q))^2)
    must match gamma(N_Q) to ~1e-12; this is a regression check on the
    half-angle reduction used to derive the limit.
    """
    nq = _check_nq(n_phases)
    width = 2.0 * np.pi / nq
    lhs = nq * nq / (16.0 * np.pi) * (np.sin(width) ** 2 + (1.0 - np.cos(width)) ** 2)
    rhs = gamma_factor(nq)
    return float(lhs), float(rhs), float(abs(lhs - rhs))


@dataclass(frozen=True)
class ExpectationCheck:
    name: str
    estimate: float
    target: float
    z_score: float


@dataclass(frozen=True)
class SectorExpectationReport:
    """Monte Carlo estimates behind the limit constant, with z-scores."""

    n_phases: int
    n_samples: int
    checks: tuple[ExpectationCheck, ...]

    def max_abs_z(self) -> float:
        return max(abs(c.z_score) for c in self.checks)

    def passed(self, z_limit: float = 3.0) -> bool:
        return self.max_abs_z() <= z_limit


def _z(values: np.ndarray, target: float) -> tuple[float, float]:
    n = values.size
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n))
    z = (estimate - target) / stderr if stderr > 0 else 0.0
    return estimate, float(z)


# sin and cos of the sector width 2*pi/N_Q, exact at the quarter turns so
# closed-form targets like E[cos(theta)] = 0 come out as real zeros
_EXACT_WIDTH_SINCOS = {1: (0.0, 1.0), 2: (0.0, -1.0), 4: (1.0, 0.0)}


def _width_sincos(nq: int) -> tuple[float, float]:
    if nq in _EXACT_WIDTH_SINCOS:
        return _EXACT_WIDTH_SINCOS[nq]
    width = 2.0 * np.pi / nq
    return float(np.sin(width)), float(np.cos(width))


def sector_expectation_check(n_phases: int, n_samples: int, seed: int) -> SectorExpectationReport:
    """Check the conditional-moment building blocks of the limit constant.

    Draws CN(0, 1) gains, rotates each phase into the base sector
    [0, 2*pi/N_Q) exactly as the combining algorithm does, and compares the
    sample moments of |h|, cos(theta), |h|cos(theta) and |h|sin(theta)
    against their closed forms.  The product-moment rows double as a check
    of the magnitude/phase independence factorization.
    """
    nq = _check_nq(n_phases)
    if n_samples < 10**4:
        raise InsufficientSamplesError("sector expectation check needs at least 1e4 samples")
    cfg = SystemConfig(n_antennas=int(n_samples), n_users=1, n_phases=nq, rng_seed=int(seed))
    h = generate_iid(cfg)[:, 0]
    width = 2.0 * np.pi / nq
    theta = entry_angle(h)
    rotated = theta - width * np.floor_divide(theta, width).clip(0, nq - 1)
    mag = np.abs(h)

    sin_w, cos_w = _width_sincos(nq)
    exp_cos = sin_w / width  # = (N_Q / 2 pi) sin(2 pi / N_Q)
    exp_sin = (1.0 - cos_w) / width
    rows = []
    est_mag, z_mag = _z(mag, _SQRT_PI_HALF)
    rows.append(ExpectationCheck("magnitude_mean", est_mag, _SQRT_PI_HALF, z_mag))
    est_cos, z_cos = _z(np.cos(rotated), exp_cos)
    rows.append(ExpectationCheck("cos_mean", est_cos, exp_cos, z_cos))
    est_mc, z_mc = _z(mag * np.cos(rotated), _SQRT_PI_HALF * exp_cos)
    rows.append(ExpectationCheck("magnitude_cos_mean", est_mc, _SQRT_PI_HALF * exp_cos, z_mc))
    est_ms, z_ms = _z(mag * np.sin(rotated), _SQRT_PI_HALF * exp_sin)
    rows.append(ExpectationCheck("magnitude_sin_mean", est_ms, _SQRT_PI_HALF * exp_sin, z_ms))
    # independence factorization: E[|h| cos] - E[|h|] E[cos] should vanish;
    # the joint-term standard error dominates, so reuse it as the scale
    joint = mag * np.cos(rotated)
    stderr = joint.std(ddof=1) / np.sqrt(n_samples)
    gap = est_mc - est_mag * est_cos
    rows.append(ExpectationCheck("independence_gap", float(gap), 0.0, float(gap / stderr)))
    return SectorExpectationReport(n_phases=nq, n_samples=int(n_samples), checks=tuple(rows))
