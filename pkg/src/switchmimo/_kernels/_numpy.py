"""Pure-numpy implementations of the hot kernels.

Reference backend for ``switchmimo._kernels._speedups``; both expose the
same functions and agree up to floating-point summation order.  Inputs are
1-D contiguous arrays (float64 angles, complex128 channels).
"""

from __future__ import annotations

import numpy as np

_TWO_PI = 2.0 * np.pi


def sector_indices(angles: np.ndarray, n_sectors: int) -> np.ndarray:
    """0-based index of the sector [k, k+1) * 2*pi/n holding each angle.

    Angles must already lie in [0, 2*pi); division can still round an angle
    up to the top edge, so the result is clamped into the last sector.
    """
    idx = np.floor_divide(angles, _TWO_PI / n_sectors).astype(np.int64)
    return np.clip(idx, 0, n_sectors - 1)


def quasi_signal(h: np.ndarray, rotors: np.ndarray) -> tuple[np.ndarray, complex]:
    """Sector indices of h plus the rotated sum sum_n h[n] * rotors[sector[n]]."""
    ang = np.mod(np.angle(h), _TWO_PI)
    ang[ang >= _TWO_PI] = 0.0
    sectors = sector_indices(ang, len(rotors))
    combined = complex(np.sum(h * rotors[sectors]))
    return sectors, combined


def best_assignment(
    h_rows: np.ndarray,
    table: np.ndarray,
    rho: float,
    chunk: int = 1 << 16,
) -> tuple[np.ndarray, float]:
    """Exhaustively score every per-antenna assignment of one table entry.

    ``h_rows`` is (U, N) with the target user's channel in row 0.  A
    candidate assignment a gives cross_l = sum_n table[a[n]] * h_rows[l, n]
    and is scored by log2(1 + rho |cross_0|^2 / (rho sum_{l>0} |cross_l|^2 + N)).
    Candidates are visited in lexicographic order of the assignment vector
    (antenna 0 most significant) and only a strictly better score replaces
    the incumbent, so ties resolve to the lexicographically smallest vector.
    """
    n_users, n = h_rows.shape
    n_tab = len(table)
    total = n_tab**n
    place = n_tab ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_sinr = -1.0
    best_digits = np.zeros(n, dtype=np.int64)
    start = 0
    while start < total:
        stop = min(start + chunk, total)
        ids = np.arange(start, stop, dtype=np.int64)
        digits = (ids[:, None] // place[None, :]) % n_tab
        cross = table[digits] @ h_rows.T
        powers = cross.real**2 + cross.imag**2
        signal = powers[:, 0]
        interference = powers[:, 1:].sum(axis=1)
        sinr = rho * signal / (rho * interference + n)
        pick = int(np.argmax(sinr))
        if sinr[pick] > best_sinr:
            best_sinr = float(sinr[pick])
            best_digits = digits[pick].copy()
        start = stop
    return best_digits, float(np.log2(1.0 + best_sinr))
