# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the inner loops; ``_numpy.py`` is the reference."""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, atan2, floor, log2

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


def sector_indices(const double[::1] angles, Py_ssize_t n_sectors):
    """0-based sector index of each angle in [0, 2*pi); top edge is clamped."""
    cdef Py_ssize_t n = angles.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef double width = TWO_PI / n_sectors
    cdef Py_ssize_t i
    cdef long long k
    for i in range(n):
        k = <long long>floor(angles[i] / width)
        if k < 0:
            k = 0
        elif k >= n_sectors:
            k = n_sectors - 1
        o[i] = k
    return out


def quasi_signal(const double complex[::1] h, const double complex[::1] rotors):
    """Sector indices of h plus the rotated sum sum_n h[n] * rotors[sector[n]]."""
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t n_sectors = rotors.shape[0]
    cdef double width = TWO_PI / n_sectors
    sectors = np.empty(n, dtype=np.int64)
    cdef long long[::1] sec = sectors
    cdef double complex acc = 0.0
    cdef double ang
    cdef Py_ssize_t i
    cdef long long k
    for i in range(n):
        ang = atan2(h[i].imag, h[i].real)
        if ang < 0.0:
            ang += TWO_PI
        if ang >= TWO_PI:
            ang = 0.0
        k = <long long>floor(ang / width)
        if k < 0:
            k = 0
        elif k >= n_sectors:
            k = n_sectors - 1
        sec[i] = k
        acc = acc + h[i] * rotors[k]
    return sectors, acc


def best_assignment(const double complex[:, ::1] h_rows, const double complex[::1] table, double rho):
    """Exhaustive assignment search; see the numpy backend for the contract.

    Enumerates the n_tab**N assignment vectors with an odometer over the last
    antenna, updating the per-user cross terms incrementally (amortized O(U)
    per candidate).  Strictly-better replacement keeps the lexicographically
    smallest vector among equal computed scores.
    """
    cdef Py_ssize_t n_users = h_rows.shape[0]
    cdef Py_ssize_t n = h_rows.shape[1]
    cdef Py_ssize_t n_tab = table.shape[0]

    total = int(n_tab) ** int(n)  # exact Python int; caller bounds the budget
    if total - 1 > 2**62:
        raise OverflowError("assignment space too large to enumerate")
    cdef long long remaining = <long long>(total - 1)

    digits_arr = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int64)
    cross_arr = np.zeros(n_users, dtype=np.complex128)
    cdef long long[::1] digits = digits_arr
    cdef long long[::1] best = best_arr
    cdef double complex[::1] cross = cross_arr

    cdef Py_ssize_t u, i, pos
    cdef double complex delta
    cdef double signal, interference, sinr
    cdef double best_sinr = -1.0
    cdef long long step, old

    for u in range(n_users):
        cross[u] = 0.0
        for i in range(n):
            cross[u] = cross[u] + table[0] * h_rows[u, i]

    step = 0
    while True:
        signal = cross[0].real * cross[0].real + cross[0].imag * cross[0].imag
        interference = 0.0
        for u in range(1, n_users):
            interference += cross[u].real * cross[u].real + cross[u].imag * cross[u].imag
        sinr = rho * signal / (rho * interference + n)
        if sinr > best_sinr:
            best_sinr = sinr
            for i in range(n):
                best[i] = digits[i]
        if step >= remaining:
            break
        step += 1
        pos = n - 1
        while True:
            old = digits[pos]
            if old + 1 < n_tab:
                digits[pos] = old + 1
                delta = table[old + 1] - table[old]
            else:
                digits[pos] = 0
                delta = table[0] - table[old]
            for u in range(n_users):
                cross[u] = cross[u] + delta * h_rows[u, pos]
            if old + 1 < n_tab:
                break
            pos -= 1
    return best_arr, float(log2(1.0 + best_sinr))
