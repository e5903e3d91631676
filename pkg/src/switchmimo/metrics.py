"""Analytic and empirical SINR, per-user rate, and sum-rate evaluation.

The analytic path evaluates, per user u with composite combiner w_u,

    SINR_u = rho |w_u^H h_u|^2 / (rho sum_{l != u} |w_u^H h_l|^2 + ||w_u||^2)

which is the received-power form with numerator and denominator divided by
the noise variance (rho = P / sigma^2).  The expression is scale invariant
in each w_u, so no combiner normalization is assumed here; architectures may
apply their noise-figure penalty to rho upstream (see the rfchain module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError, InvalidCombinerError, InvalidParameterError

# measured interference+noise below this fraction of the signal power is
# indistinguishable from numerical zero; the estimate is flagged as +inf
_DIVERGENCE_FLOOR = 1e-28


@dataclass(frozen=True, eq=False)
class LinkMetrics:
    """Per-user SINR (linear), per-user rate, and sum rate (bits/s/Hz)."""

    per_user_sinr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float


def _composite(combiners) -> np.ndarray:
    W = getattr(combiners, "composite", combiners)
    W = np.asarray(W, dtype=np.complex128)
    if W.ndim != 2 or W.size == 0:
        raise InvalidCombinerError("combiner set must provide a nonempty (N, U) composite")
    return W


def _finalize(sinr_values: np.ndarray) -> LinkMetrics:
    rates = np.log2(1.0 + sinr_values)
    return LinkMetrics(per_user_sinr=sinr_values, per_user_rate=rates, sum_rate=float(rates.sum()))


def sinr(H, combiners, rho: float) -> LinkMetrics:
    """Analytic per-user SINR of a combiner set on a channel at SNR rho."""
    H = np.asarray(H, dtype=np.complex128)
    W = _composite(combiners)
    if H.shape != W.shape:
        raise InvalidParameterError(f"channel {H.shape} and combiner {W.shape} shapes differ")
    if not np.isfinite(rho) or rho < 0:
        raise InvalidParameterError("rho must be finite and >= 0")
    norms2 = np.sum(np.abs(W) ** 2, axis=0)
    if np.any(norms2 == 0.0):
        raise InvalidCombinerError("combiner set contains a zero vector")
    cross = W.conj().T @ H
    powers = np.abs(cross) ** 2
    signal = np.diagonal(powers).copy()
    interference = powers.sum(axis=1) - signal
    values = rho * signal / (rho * interference + norms2)
    return _finalize(values)


def empirical_sinr(samples, combiners) -> LinkMetrics:
    """Genie-aided SINR estimate from transmission samples.

    Projects each combined output y_u onto the known transmitted symbols
    (least squares over all users), reading off the desired and interfering
    signal coefficients; the projection residual estimates the noise power.
    Converges to the analytic ``sinr`` as the sample count grows.  A user
    whose measured interference+noise is numerically zero is flagged with a
    +inf sentinel rather than overflowing.
    """
    if hasattr(samples, "symbols") and hasattr(samples, "received"):
        symbol_block = np.asarray(samples.symbols, dtype=np.complex128)
        received_block = np.asarray(samples.received, dtype=np.complex128)
    else:
        items = list(samples)
        if not items:
            raise InsufficientSamplesError("empirical SINR needs at least 100 samples, got 0")
        symbol_block = np.stack([np.asarray(s.symbols, dtype=np.complex128) for s in items])
        received_block = np.stack([np.asarray(s.received, dtype=np.complex128) for s in items])
    n_samples = symbol_block.shape[0]
    if n_samples < 100:
        raise InsufficientSamplesError(f"empirical SINR needs at least 100 samples, got {n_samples}")
    W = _composite(combiners)
    outputs = received_block @ W.conj()  # (n, U), column u = w_u^H r
    coef, *_ = np.linalg.lstsq(symbol_block, outputs, rcond=None)  # coef[l, u] ~ sqrt(P) w_u^H h_l
    residual = outputs - symbol_block @ coef
    noise_power = np.mean(np.abs(residual) ** 2, axis=0)
    coef_power = np.abs(coef) ** 2
    signal = np.diagonal(coef_power).copy()
    interference = coef_power.sum(axis=0) - signal
    denominator = interference + noise_power
    with np.errstate(divide="ignore", invalid="ignore"):
        values = signal / denominator
    diverged = (signal > 0) & (denominator <= signal * _DIVERGENCE_FLOOR)
    values = np.where(diverged, np.inf, values)
    values = np.where((signal == 0) & (denominator == 0), 0.0, values)
    return _finalize(values)


def snr_ratio(h: np.ndarray, w: np.ndarray) -> float:
    """Single-user SNR of a combiner relative to matched filtering.

    Returns (|w^H h|^2 / ||w||^2) / ||h||^2, in [0, 1] by Cauchy-Schwarz;
    the transmit SNR cancels.
    """
    h = np.asarray(h, dtype=np.complex128).ravel()
    w = np.asarray(w, dtype=np.complex128).ravel()
    if h.shape != w.shape:
        raise InvalidParameterError("h and w must have the same length")
    h_norm2 = np.sum(np.abs(h) ** 2)
    if h_norm2 == 0.0:
        raise InvalidParameterError("channel vector must be nonzero")
    w_norm2 = np.sum(np.abs(w) ** 2)
    if w_norm2 == 0.0:
        raise InvalidCombinerError("combiner vector must be nonzero")
    return float(np.abs(np.vdot(w, h)) ** 2 / (w_norm2 * h_norm2))
