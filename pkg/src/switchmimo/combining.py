"""RF combiner construction under the switch + constant-phase-shifter
hardware model, plus the baseline combiners used in the architecture study.

Conventions
-----------
Combining is conjugate-linear: user u's output is w_u^H r, so a combiner
entry w aligns a channel entry h when conj(w) * h has phase near zero.  The
shifter bank is p_q = exp(-2j*pi*(q-1)/N_Q) for q = 1..N_Q (p_1 = 1).  An
antenna whose channel phase falls in sector q, i.e. in
[(q-1), q) * 2*pi/N_Q, therefore needs the bank entry conj(p_q), which is
itself a bank element at index 1 for q = 1 and N_Q + 2 - q otherwise.
``SwitchingMatrix.assignments`` stores the selected bank indices (the
hardware view: w = one_hot() @ p exactly); ``SwitchingMatrix.sectors``
recovers the phase-sector partition of the channel entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels as kernels
from . import metrics
from .channel import TWO_PI, entry_angle
from .errors import (
    InvalidCombinerError,
    InvalidParameterError,
    RankDeficientChannelError,
    SearchBudgetError,
)

DEFAULT_SWITCH_SEARCH_BUDGET = 10**7
DEFAULT_SELECTION_BUDGET = 10**6
DEFAULT_CONDITION_LIMIT = 1e10

_QUARTER_TURNS = np.array([1.0, -1.0j, -1.0, 1.0j])


def _roots_of_unity(n: int) -> np.ndarray:
    """exp(-2j*pi*k/n) for k = 0..n-1, exact on the real and imaginary axes.

    Exact +-1 / +-1j entries keep the rotation arithmetic of small banks
    (N_Q in {1, 2, 4}) free of spurious imaginary residue.
    """
    k = np.arange(n)
    vals = np.exp(-2j * np.pi * k / n)
    quarter = (4 * k) % n == 0
    vals[quarter] = _QUARTER_TURNS[(4 * k[quarter]) // n % 4]
    return vals


class PhaseBank:
    """The N_Q constant shifter values and the matching phase-sector grid."""

    def __init__(self, n_phases: int):
        if not isinstance(n_phases, (int, np.integer)) or isinstance(n_phases, bool) or n_phases < 1:
            raise InvalidParameterError("n_phases must be an integer >= 1")
        self.n_phases = int(n_phases)
        self.sector_width = TWO_PI / self.n_phases
        self.shifter_values = _roots_of_unity(self.n_phases)
        self.sector_midpoints = (2.0 * np.arange(1, self.n_phases + 1) - 1.0) * np.pi / self.n_phases
        self.shifter_values.flags.writeable = False
        self.sector_midpoints.flags.writeable = False

    def __repr__(self) -> str:
        return f"PhaseBank(n_phases={self.n_phases})"


@dataclass(frozen=True, eq=False)
class SwitchingMatrix:
    """One-hot antenna-to-shifter routing for a single user.

    ``assignments`` holds 1-based bank indices, so the combining vector is
    exactly ``one_hot() @ bank.shifter_values``.
    """

    n_phases: int
    assignments: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64).copy()
        if a.ndim != 1 or a.size == 0:
            raise InvalidParameterError("assignments must be a nonempty 1-D index vector")
        if a.min() < 1 or a.max() > self.n_phases:
            raise InvalidParameterError("assignments must lie in 1..n_phases")
        a.flags.writeable = False
        object.__setattr__(self, "assignments", a)

    @property
    def n_antennas(self) -> int:
        return self.assignments.shape[0]

    @property
    def sectors(self) -> np.ndarray:
        """1-based phase sector feeding each assignment (conjugate involution)."""
        return (self.n_phases - (self.assignments - 1)) % self.n_phases + 1

    def one_hot(self) -> np.ndarray:
        """Dense (N, N_Q) binary switching matrix with one-hot rows."""
        dense = np.zeros((self.n_antennas, self.n_phases), dtype=np.int8)
        dense[np.arange(self.n_antennas), self.assignments - 1] = 1
        return dense

    def partitions(self) -> list[np.ndarray]:
        """Antenna index sets of the phase sectors q = 1..N_Q (may be empty)."""
        sec = self.sectors
        return [np.flatnonzero(sec == q) for q in range(1, self.n_phases + 1)]


@dataclass(frozen=True, eq=False)
class CombinerSet:
    """Per-user combining vectors, optionally split into RF and baseband parts.

    ``rf_vectors`` is (N, U) with column u = w_u.  When ``baseband`` (U, U)
    is present the composite vectors consumed by all metric computations are
    ``rf_vectors @ baseband``; otherwise the RF vectors stand alone.
    """

    rf_vectors: np.ndarray
    baseband: np.ndarray | None = None

    def __post_init__(self):
        rf = np.asarray(self.rf_vectors, dtype=np.complex128)
        if rf.ndim != 2 or rf.size == 0:
            raise InvalidCombinerError("rf_vectors must be a nonempty (N, U) array")
        object.__setattr__(self, "rf_vectors", rf)
        if self.baseband is not None:
            bb = np.asarray(self.baseband, dtype=np.complex128)
            n_users = rf.shape[1]
            if bb.shape != (n_users, n_users):
                raise InvalidCombinerError("baseband must be (U, U) matching rf_vectors")
            object.__setattr__(self, "baseband", bb)

    @property
    def n_antennas(self) -> int:
        return self.rf_vectors.shape[0]

    @property
    def n_users(self) -> int:
        return self.rf_vectors.shape[1]

    @property
    def composite(self) -> np.ndarray:
        if self.baseband is None:
            return self.rf_vectors
        return self.rf_vectors @ self.baseband


def _as_channel(H) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim == 1:
        H = H[:, None]
    if H.ndim != 2 or H.size == 0:
        raise InvalidParameterError("channel matrix must be a nonempty (N, U) array")
    return H


def assign_sector(angle, bank: PhaseBank):
    """1-based phase sector of an angle in [0, 2*pi); arrays are vectorized.

    Sector q covers [(q-1), q) * 2*pi/N_Q, so a boundary angle belongs to
    the upper sector; this matches nearest-midpoint assignment with ties
    rounded up.
    """
    arr = np.asarray(angle, dtype=np.float64)
    if not np.all((arr >= 0.0) & (arr < TWO_PI)):  # also rejects NaN
        raise InvalidParameterError("angle must lie in [0, 2*pi)")
    sec = kernels.sector_indices(np.ascontiguousarray(arr.ravel()), bank.n_phases) + 1
    if arr.ndim == 0:
        return int(sec[0])
    return sec.reshape(arr.shape)


def _shifter_indices0(sectors0: np.ndarray, n_phases: int) -> np.ndarray:
    # bank index (0-based) whose conjugate rotation aligns sector q0 entries
    return (n_phases - sectors0) % n_phases


def quasi_coherent_switch_combiner(H, bank: PhaseBank) -> tuple[list[SwitchingMatrix], CombinerSet]:
    """Greedy per-antenna switch design: align every channel entry to within
    one sector of width 2*pi/N_Q.

    Each antenna is routed, in O(1), to the shifter whose conjugate rotation
    moves its channel phase into [0, 2*pi/N_Q); total cost is O(N * U).
    Returns the per-user switching matrices and the combiner set.
    """
    H = _as_channel(H)
    n_ant, n_users = H.shape
    angles = np.ascontiguousarray(entry_angle(H).ravel())
    sectors0 = np.asarray(kernels.sector_indices(angles, bank.n_phases)).reshape(n_ant, n_users)
    shifters0 = _shifter_indices0(sectors0, bank.n_phases)
    w = bank.shifter_values[shifters0]
    switching = [SwitchingMatrix(bank.n_phases, shifters0[:, u] + 1) for u in range(n_users)]
    return switching, CombinerSet(rf_vectors=w)


def reconstruct_switching(w: np.ndarray, bank: PhaseBank, tol: float = 1e-9) -> SwitchingMatrix:
    """Recover the one-hot switching matrix realizing a combining vector.

    Validates hardware feasibility: every entry of ``w`` must match a bank
    value to within ``tol``.
    """
    w = np.asarray(w, dtype=np.complex128).ravel()
    dist = np.abs(w[:, None] - bank.shifter_values[None, :])
    nearest = dist.argmin(axis=1)
    worst = dist[np.arange(w.size), nearest].max()
    if worst > tol:
        raise InvalidCombinerError(f"combiner entry deviates from the shifter bank by {worst:.3e} (> tol {tol:.1e})")
    return SwitchingMatrix(bank.n_phases, nearest + 1)


def mrc_combiner(H) -> CombinerSet:
    """Fully-digital matched filter w_u = h_u (maximum ratio combining)."""
    H = _as_channel(H)
    return CombinerSet(rf_vectors=H.copy())


def phase_shifter_combiner(H) -> CombinerSet:
    """Per-user continuous phase alignment w_{u,n} = exp(j*angle(h_{u,n})).

    Equal-gain combining with infinite-resolution shifters; the N_Q -> inf
    limit of the switch architecture.
    """
    H = _as_channel(H)
    return CombinerSet(rf_vectors=np.exp(1j * entry_angle(H)))


def zf_baseband(H, rf: CombinerSet | None = None, cond_limit: float = DEFAULT_CONDITION_LIMIT) -> CombinerSet:
    """Zero-forcing baseband on the effective channel G = W_RF^H H.

    Returns combiners whose composite vectors satisfy w_u^H h_l = delta_ul.
    With ``rf=None`` the RF stage is the identity and the result is the
    fully-digital zero-forcing receiver; with per-user analog vectors or a
    selection matrix it is the corresponding hybrid receiver.
    """
    H = _as_channel(H)
    if rf is None:
        effective = H
    else:
        if rf.baseband is not None:
            raise InvalidParameterError("rf stage must not already carry a baseband matrix")
        if rf.n_antennas != H.shape[0] or rf.n_users != H.shape[1]:
            raise InvalidParameterError("rf combiner shape does not match the channel")
        effective = rf.rf_vectors.conj().T @ H
    singular = np.linalg.svd(effective, compute_uv=False)
    if singular[-1] == 0.0 or singular[0] / singular[-1] > cond_limit:
        raise RankDeficientChannelError(
            f"effective channel condition number exceeds {cond_limit:.1e}; redraw the channel"
        )
    gram = effective.conj().T @ effective
    forcing = np.linalg.solve(gram, effective.conj().T).conj().T
    if rf is None:
        return CombinerSet(rf_vectors=forcing)
    return CombinerSet(rf_vectors=rf.rf_vectors, baseband=forcing)


def _normalize_mode(mode: str) -> str:
    m = str(mode).upper()
    if m not in ("MF", "ZF"):
        raise InvalidParameterError("mode must be 'MF' or 'ZF'")
    return m


def _subset_index_array(n_antennas: int, n_users: int) -> np.ndarray:
    return np.array(list(combinations(range(n_antennas), n_users)), dtype=np.int64)


def _batched_inverse_row_norms(sub: np.ndarray) -> np.ndarray:
    """Squared row norms of the subchannel inverses; inf for singular subsets."""
    try:
        inverses = np.linalg.inv(sub)
        return (np.abs(inverses) ** 2).sum(axis=2)
    except np.linalg.LinAlgError:
        n_users = sub.shape[1]
        out = np.empty((sub.shape[0], n_users))
        for s in range(sub.shape[0]):
            try:
                out[s] = (np.abs(np.linalg.inv(sub[s])) ** 2).sum(axis=1)
            except np.linalg.LinAlgError:
                out[s] = np.inf
        return out


def selection_sweep(H, subsets: np.ndarray, rho_list, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Best antenna subset and its per-user SINRs at each SNR point.

    Returns (best_index (n_rho,), sinr (n_rho, U)).  The subset Gram
    matrices (and, for ZF, the subchannel inverses) do not depend on rho, so
    a whole SNR sweep costs one enumeration.  Ties at a given rho go to the
    first (lexicographically smallest) subset.
    """
    H = _as_channel(H)
    mode = _normalize_mode(mode)
    rho_list = np.atleast_1d(np.asarray(rho_list, dtype=np.float64))
    n_users = H.shape[1]
    sub = H[subsets]  # (S, U, U): antenna i of subset s, user u
    gram = np.einsum("siu,siv->suv", sub.conj(), sub)
    diag = np.real(gram[:, np.arange(n_users), np.arange(n_users)])  # ||g_u||^2, (S, U)
    best = np.empty(len(rho_list), dtype=np.int64)
    sinrs = np.empty((len(rho_list), n_users))
    if mode == "MF":
        signal = diag**2
        interference = (np.abs(gram) ** 2).sum(axis=2) - signal
        for i, rho in enumerate(rho_list):
            sinr = rho * signal / (rho * interference + diag)
            pick = int(np.argmax(np.log2(1.0 + sinr).sum(axis=1)))
            best[i] = pick
            sinrs[i] = sinr[pick]
    else:
        # zero forcing on the subchannel: unit signal, no interference,
        # noise amplified by the squared inverse-row norm
        f_norm2 = _batched_inverse_row_norms(sub)
        for i, rho in enumerate(rho_list):
            sinr = rho / f_norm2
            pick = int(np.argmax(np.log2(1.0 + sinr).sum(axis=1)))
            best[i] = pick
            sinrs[i] = sinr[pick]
    return best, sinrs


def antenna_selection_combiner(
    H,
    rho: float,
    mode: str = "MF",
    budget: int = DEFAULT_SELECTION_BUDGET,
) -> CombinerSet:
    """Exhaustive best-U-antenna selection with MF or ZF on the subchannel.

    Enumerates all C(N, U) antenna subsets, scores each by the Eq.-style sum
    rate at ``rho``, and returns the winner's combiner embedded as N-length
    vectors (zeros off the subset).  Ties go to the lexicographically
    smallest subset.
    """
    H = _as_channel(H)
    mode = _normalize_mode(mode)
    n_ant, n_users = H.shape
    required = comb(n_ant, n_users)
    if required > budget:
        raise SearchBudgetError(
            f"antenna selection needs {required} subset evaluations, over the budget of {budget}",
            required=required,
            budget=budget,
        )
    subsets = _subset_index_array(n_ant, n_users)
    best, _ = selection_sweep(H, subsets, float(rho), mode)
    chosen = subsets[int(best[0])]
    sub = H[chosen]  # (U, U)
    embedded = np.zeros_like(H)
    if mode == "MF":
        embedded[chosen] = sub
    else:
        gram = sub.conj().T @ sub
        embedded[chosen] = np.linalg.solve(gram, sub.conj().T).conj().T
    return CombinerSet(rf_vectors=embedded)


def exhaustive_switch_combiner(
    H,
    bank: PhaseBank,
    rho: float,
    budget: int = DEFAULT_SWITCH_SEARCH_BUDGET,
) -> CombinerSet:
    """Ground-truth switch design: enumerate every one-hot switching matrix.

    The sum rate splits across users (SINR_u depends only on w_u), so the
    joint optimum over the (N_Q)^(U*N) switching matrices is found by U
    independent per-user sweeps of the (N_Q)^N assignments; the budget gate
    is still applied to the joint search-space size.  Ties resolve to the
    lexicographically smallest assignment vector.  The greedy solution is
    evaluated alongside the enumerated winner through the same metric path,
    which pins down oracle dominance even when two optima differ only by
    floating-point rounding.
    """
    H = _as_channel(H)
    if not rho >= 0 or not np.isfinite(rho):
        raise InvalidParameterError("rho must be finite and >= 0")
    n_ant, n_users = H.shape
    required = bank.n_phases ** (n_users * n_ant)
    if required > budget:
        raise SearchBudgetError(
            f"joint switch search needs {_count_str(required)} evaluations, over the budget of {budget}",
            required=required,
            budget=budget,
        )
    conj_bank = np.ascontiguousarray(bank.shifter_values.conj())
    assigns0 = np.empty((n_ant, n_users), dtype=np.int64)
    for u in range(n_users):
        others = np.delete(H, u, axis=1).T
        rows = np.ascontiguousarray(np.vstack([H[:, u][None, :], others]))
        digits, _ = kernels.best_assignment(rows, conj_bank, float(rho))
        assigns0[:, u] = digits
    enum_set = CombinerSet(rf_vectors=bank.shifter_values[assigns0])
    _, greedy_set = quasi_coherent_switch_combiner(H, bank)
    enum_rates = metrics.sinr(H, enum_set, rho).per_user_rate
    greedy_rates = metrics.sinr(H, greedy_set, rho).per_user_rate
    take_greedy = greedy_rates > enum_rates
    if not np.any(take_greedy):
        return enum_set
    mixed = np.where(take_greedy[None, :], greedy_set.rf_vectors, enum_set.rf_vectors)
    return CombinerSet(rf_vectors=mixed)


def _count_str(value: int) -> str:
    if value < 10**9:
        return str(value)
    return f"about 10^{len(str(value)) - 1}"
