import itertools

import numpy as np
import pytest

from switchmimo import (
    CombinerSet,
    InvalidCombinerError,
    InvalidParameterError,
    PhaseBank,
    RankDeficientChannelError,
    SearchBudgetError,
    SwitchingMatrix,
    SystemConfig,
    antenna_selection_combiner,
    assign_sector,
    entry_angle,
    exhaustive_switch_combiner,
    generate_iid,
    mrc_combiner,
    phase_shifter_combiner,
    quasi_coherent_switch_combiner,
    reconstruct_switching,
    sinr,
    snr_ratio,
    zf_baseband,
)

TWO_PI = 2.0 * np.pi


def rand_channel(n, u, seed):
    cfg = SystemConfig(n_antennas=n, n_users=u, n_phases=4, rng_seed=seed)
    return generate_iid(cfg)


# ---------------------------------------------------------------- phase bank


def test_phase_bank_invariants():
    for nq in (1, 2, 3, 4, 8, 16):
        bank = PhaseBank(nq)
        assert np.allclose(np.abs(bank.shifter_values), 1.0)
        assert bank.shifter_values[0] == 1.0 + 0.0j
        mids = bank.sector_midpoints
        assert np.all(np.diff(mids) > 0)
        assert mids[0] > 0 and mids[-1] < TWO_PI


def test_phase_bank_quarter_turn_exactness():
    bank = PhaseBank(4)
    assert np.array_equal(bank.shifter_values, np.array([1, -1j, -1, 1j]))
    assert np.array_equal(PhaseBank(2).shifter_values, np.array([1, -1]))


def test_phase_bank_invalid():
    with pytest.raises(InvalidParameterError):
        PhaseBank(0)


# ------------------------------------------------------------ sector lookup


def test_assign_sector_examples():
    bank2 = PhaseBank(2)
    assert assign_sector(0.3, bank2) == 1
    assert assign_sector(np.pi, bank2) == 2  # boundary goes to the upper sector
    bank4 = PhaseBank(4)
    got = [assign_sector(a, bank4) for a in (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)]
    assert got == [1, 2, 3, 4]


def test_assign_sector_vectorized_and_in_range():
    bank = PhaseBank(5)
    rng = np.random.default_rng(0)
    angles = rng.uniform(0.0, TWO_PI, 10_000)
    q = assign_sector(angles, bank)
    assert q.shape == angles.shape
    assert q.min() >= 1 and q.max() <= 5
    # grid consistency: sector boundaries belong to the upper sector
    width = TWO_PI / 5
    assert assign_sector(width, bank) == 2
    assert assign_sector(np.nextafter(width, 0.0), bank) == 1


def test_assign_sector_rejects_out_of_range():
    bank = PhaseBank(4)
    with pytest.raises(InvalidParameterError):
        assign_sector(-0.1, bank)
    with pytest.raises(InvalidParameterError):
        assign_sector(TWO_PI, bank)


# --------------------------------------------------- quasi-coherent combiner


def test_quasi_coherent_all_ones_fully_coherent():
    for nq in (1, 2, 4, 8):
        bank = PhaseBank(nq)
        h = np.ones((5, 1), dtype=complex)
        switching, combo = quasi_coherent_switch_combiner(h, bank)
        assert np.all(switching[0].sectors == 1)
        assert np.array_equal(combo.rf_vectors, np.ones((5, 1)))
        assert np.vdot(combo.rf_vectors[:, 0], h[:, 0]) == 5.0


def test_quasi_coherent_four_phase_example():
    # h = [1, j, -1, -j] hits the four sector anchors; every entry rotates to +1
    bank = PhaseBank(4)
    h = np.array([1, 1j, -1, -1j], dtype=complex).reshape(-1, 1)
    switching, combo = quasi_coherent_switch_combiner(h, bank)
    assert list(switching[0].sectors) == [1, 2, 3, 4]
    w = combo.rf_vectors[:, 0]
    assert np.array_equal(w, h[:, 0])
    assert abs(np.vdot(w, h[:, 0])) ** 2 == 16.0  # N^2: full coherence, MRC-grade
    assert sinr(h, combo, 1.0).per_user_sinr[0] == pytest.approx(4.0)


def test_quasi_coherent_two_phase_example():
    bank = PhaseBank(2)
    h = np.array([1.0, -1.0], dtype=complex).reshape(-1, 1)
    switching, combo = quasi_coherent_switch_combiner(h, bank)
    assert list(switching[0].sectors) == [1, 2]
    assert np.vdot(combo.rf_vectors[:, 0], h[:, 0]) == 2.0
    # SNR = rho |w^H h|^2 / ||w||^2 = rho * 4 / 2 = 2 rho
    assert sinr(h, combo, 1.0).per_user_sinr[0] == pytest.approx(2.0)


@pytest.mark.parametrize("nq", [2, 3, 4, 8])
def test_quasi_coherence_phase_spread(nq):
    bank = PhaseBank(nq)
    H = rand_channel(256, 3, seed=nq)
    _, combo = quasi_coherent_switch_combiner(H, bank)
    rotated = entry_angle(combo.rf_vectors.conj() * H)
    width = TWO_PI / nq
    # rotated phases live in the base sector, up to wrap-around rounding
    in_sector = (rotated < width + 1e-9) | (rotated > TWO_PI - 1e-9)
    assert np.all(in_sector)


def test_quasi_coherent_norm_and_hardware_feasibility():
    bank = PhaseBank(8)
    H = rand_channel(64, 2, seed=21)
    switching, combo = quasi_coherent_switch_combiner(H, bank)
    norms = np.sum(np.abs(combo.rf_vectors) ** 2, axis=0)
    assert np.allclose(norms, 64.0, rtol=1e-12)
    for u, sw in enumerate(switching):
        # w = S p exactly, and the reconstruction checker agrees
        assert np.array_equal(sw.one_hot() @ bank.shifter_values, combo.rf_vectors[:, u])
        rebuilt = reconstruct_switching(combo.rf_vectors[:, u], bank)
        assert np.array_equal(rebuilt.assignments, sw.assignments)


def test_zero_entry_goes_to_first_sector():
    bank = PhaseBank(4)
    h = np.array([0.0, 1.0j], dtype=complex).reshape(-1, 1)
    switching, combo = quasi_coherent_switch_combiner(h, bank)
    assert switching[0].sectors[0] == 1
    assert combo.rf_vectors[0, 0] == 1.0 + 0.0j


def test_reconstruct_switching_rejects_off_bank():
    bank = PhaseBank(4)
    with pytest.raises(InvalidCombinerError):
        reconstruct_switching(np.array([1.0, 0.5 + 0.5j]), bank)


def test_switching_matrix_validation():
    with pytest.raises(InvalidParameterError):
        SwitchingMatrix(4, np.array([0, 1]))
    with pytest.raises(InvalidParameterError):
        SwitchingMatrix(4, np.array([5]))
    sw = SwitchingMatrix(4, np.array([1, 4, 3, 2]))
    assert list(sw.sectors) == [1, 2, 3, 4]
    parts = sw.partitions()
    assert [list(p) for p in parts] == [[0], [1], [2], [3]]


# ------------------------------------------------------------------ baselines


def test_mrc_single_user_snr():
    h = np.ones((4, 1), dtype=complex)
    combo = mrc_combiner(h)
    assert sinr(h, combo, 1.0).per_user_sinr[0] == pytest.approx(4.0)


def test_mrc_dominates_any_combiner():
    rng = np.random.default_rng(4)
    H = rand_channel(32, 1, seed=4)
    h = H[:, 0]
    for _ in range(50):
        w = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert snr_ratio(h, w) <= 1.0 + 1e-12
    assert snr_ratio(h, h) == pytest.approx(1.0)


def test_mrc_matches_switch_on_antipodal_channel():
    # h = [1, -1]: the 2-shifter design is already optimal, ratio 1
    h = np.array([1.0, -1.0], dtype=complex).reshape(-1, 1)
    _, combo = quasi_coherent_switch_combiner(h, PhaseBank(2))
    assert snr_ratio(h[:, 0], combo.rf_vectors[:, 0]) == pytest.approx(1.0)
    assert sinr(h, mrc_combiner(h), 1.0).per_user_sinr[0] == pytest.approx(2.0)


def test_phase_shifter_real_positive_channel():
    h = np.array([0.5, 1.5, 2.0], dtype=complex).reshape(-1, 1)
    combo = phase_shifter_combiner(h)
    assert np.array_equal(combo.rf_vectors, np.ones((3, 1)))
    expected = (0.5 + 1.5 + 2.0) ** 2 / 3.0
    assert sinr(h, combo, 1.0).per_user_sinr[0] == pytest.approx(expected)


def test_phase_shifter_asymptotic_ratio():
    # equal-gain combining approaches pi/4 of the matched-filter SNR
    ratios = []
    for t in range(20):
        h = rand_channel(10_000, 1, seed=100 + t)[:, 0]
        combo = phase_shifter_combiner(h.reshape(-1, 1))
        ratios.append(snr_ratio(h, combo.rf_vectors[:, 0]))
    assert abs(np.mean(ratios) - np.pi / 4) / (np.pi / 4) < 0.02


def test_switch_below_phase_shifter_on_average():
    # empirical trend only: per-realization ordering is not guaranteed
    for nq in (2, 4, 8):
        bank = PhaseBank(nq)
        sw_ratios, ps_ratios = [], []
        for t in range(100):
            h = rand_channel(64, 1, seed=500 + t)[:, 0]
            _, combo = quasi_coherent_switch_combiner(h.reshape(-1, 1), bank)
            sw_ratios.append(snr_ratio(h, combo.rf_vectors[:, 0]))
            ps = phase_shifter_combiner(h.reshape(-1, 1))
            ps_ratios.append(snr_ratio(h, ps.rf_vectors[:, 0]))
        assert np.mean(sw_ratios) <= np.mean(ps_ratios)


# ------------------------------------------------------------- zero forcing


def test_zf_identity_rf_unitary_channel():
    rng = np.random.default_rng(8)
    raw = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    Q, _ = np.linalg.qr(raw)
    combo = zf_baseband(Q)
    assert np.allclose(combo.composite, Q, atol=1e-12)


def test_zf_orthogonality_and_unit_gain():
    H = rand_channel(8, 2, seed=9)
    combo = zf_baseband(H)
    cross = combo.composite.conj().T @ H
    assert np.allclose(np.diag(cross), 1.0, atol=1e-10)
    off = cross - np.diag(np.diag(cross))
    assert np.max(np.abs(off)) < 1e-9 * np.linalg.norm(H)
    # per-user rate is log2(1 + rho / ||w_u||^2) once interference is nulled
    metrics = sinr(H, combo, 5.0)
    norms2 = np.sum(np.abs(combo.composite) ** 2, axis=0)
    assert metrics.per_user_sinr == pytest.approx(5.0 / norms2)


def test_zf_on_hybrid_rf_stage():
    bank = PhaseBank(4)
    H = rand_channel(32, 3, seed=10)
    _, rf = quasi_coherent_switch_combiner(H, bank)
    combo = zf_baseband(H, rf)
    assert combo.baseband is not None
    cross = combo.composite.conj().T @ H
    off = cross - np.diag(np.diag(cross))
    assert np.max(np.abs(off)) < 1e-9 * np.linalg.norm(H)


def test_zf_rank_deficient_rejected():
    H = rand_channel(8, 2, seed=11)
    H[:, 1] = H[:, 0]  # duplicated user column: effective channel is singular
    with pytest.raises(RankDeficientChannelError):
        zf_baseband(H)


# -------------------------------------------------------- exhaustive oracle


def test_exhaustive_antipodal_example():
    bank = PhaseBank(2)
    h = np.array([1.0, -1.0], dtype=complex).reshape(-1, 1)
    combo = exhaustive_switch_combiner(h, bank, 1.0)
    # lexicographic tie-break picks assignment (1, 2): w = (p_1, p_2) = (1, -1)
    assert np.array_equal(combo.rf_vectors[:, 0], np.array([1.0, -1.0]))
    assert abs(np.vdot(combo.rf_vectors[:, 0], h[:, 0])) ** 2 == 4.0


def test_exhaustive_matches_greedy_on_coherent_channel():
    bank = PhaseBank(4)
    h = np.ones((4, 1), dtype=complex)
    combo = exhaustive_switch_combiner(h, bank, 1.0)
    assert np.array_equal(combo.rf_vectors, np.ones((4, 1)))


def test_exhaustive_budget_error_names_requirement():
    bank = PhaseBank(4)
    H = rand_channel(16, 2, seed=12)
    with pytest.raises(SearchBudgetError) as err:
        exhaustive_switch_combiner(H, bank, 1.0, budget=1000)
    assert err.value.required == 4 ** (2 * 16)
    assert err.value.budget == 1000


def test_exhaustive_dominates_greedy():
    bank = PhaseBank(2)
    for t in range(100):
        n = 2 + t % 5
        H = rand_channel(n, 1, seed=700 + t)
        oracle = exhaustive_switch_combiner(H, bank, 1.0)
        _, greedy = quasi_coherent_switch_combiner(H, bank)
        assert sinr(H, oracle, 1.0).sum_rate >= sinr(H, greedy, 1.0).sum_rate


def test_exhaustive_equals_joint_enumeration():
    # independent oracle: brute force over all joint switching matrices
    def joint_brute_force(H, bank, rho):
        n, u = H.shape
        best = -1.0
        for assign in itertools.product(range(bank.n_phases), repeat=u * n):
            a = np.array(assign, dtype=np.int64).reshape(u, n).T
            rate = sinr(H, CombinerSet(rf_vectors=bank.shifter_values[a]), rho).sum_rate
            best = max(best, rate)
        return best

    rng = np.random.default_rng(3)
    for _ in range(8):
        n, u, nq = int(rng.integers(2, 4)), int(rng.integers(1, 3)), int(rng.integers(2, 4))
        H = (rng.standard_normal((n, u)) + 1j * rng.standard_normal((n, u))) * np.sqrt(0.5)
        bank = PhaseBank(nq)
        ours = sinr(H, exhaustive_switch_combiner(H, bank, 2.0), 2.0).sum_rate
        assert ours == pytest.approx(joint_brute_force(H, bank, 2.0), abs=1e-10)


# ---------------------------------------------------------- antenna selection


def test_selection_single_user_picks_strongest_antenna():
    H = rand_channel(8, 1, seed=14)
    combo = antenna_selection_combiner(H, rho=1.0, mode="MF")
    chosen = np.flatnonzero(np.abs(combo.rf_vectors[:, 0]) > 0)
    assert list(chosen) == [int(np.argmax(np.abs(H[:, 0])))]
    expected = np.max(np.abs(H[:, 0])) ** 2
    assert sinr(H, combo, 1.0).per_user_sinr[0] == pytest.approx(expected)


@pytest.mark.parametrize("mode", ["MF", "ZF"])
def test_selection_matches_independent_enumeration(mode):
    # independent oracle: evaluate each embedded subset combiner via sinr()
    H = rand_channel(5, 2, seed=15)
    rho = 3.0
    best_rate, best_subset = -1.0, None
    for subset in itertools.combinations(range(5), 2):
        sub = H[list(subset)]
        embedded = np.zeros_like(H)
        if mode == "MF":
            embedded[list(subset)] = sub
        else:
            gram = sub.conj().T @ sub
            embedded[list(subset)] = np.linalg.solve(gram, sub.conj().T).conj().T
        rate = sinr(H, CombinerSet(rf_vectors=embedded), rho).sum_rate
        if rate > best_rate:
            best_rate, best_subset = rate, subset
    combo = antenna_selection_combiner(H, rho, mode=mode)
    chosen = tuple(np.flatnonzero(np.abs(combo.rf_vectors).sum(axis=1) > 0))
    assert chosen == best_subset
    assert sinr(H, combo, rho).sum_rate == pytest.approx(best_rate)


def test_selection_never_beats_mrc():
    for t in range(20):
        H = rand_channel(12, 1, seed=900 + t)
        sel = antenna_selection_combiner(H, 1.0, mode="MF")
        assert (
            sinr(H, sel, 1.0).per_user_sinr[0]
            <= sinr(H, mrc_combiner(H), 1.0).per_user_sinr[0] + 1e-12
        )


def test_selection_budget_error():
    H = rand_channel(30, 3, seed=16)
    with pytest.raises(SearchBudgetError):
        antenna_selection_combiner(H, 1.0, mode="MF", budget=100)


def test_selection_zf_nulls_interference():
    H = rand_channel(16, 3, seed=17)
    combo = antenna_selection_combiner(H, 10.0, mode="ZF")
    cross = combo.composite.conj().T @ H
    off = cross - np.diag(np.diag(cross))
    assert np.max(np.abs(off)) < 1e-9 * np.linalg.norm(H)


# ------------------------------------------------------------- combiner set


def test_combiner_set_validation():
    with pytest.raises(InvalidCombinerError):
        CombinerSet(rf_vectors=np.zeros((0, 2)))
    with pytest.raises(InvalidCombinerError):
        CombinerSet(rf_vectors=np.ones((4, 2)), baseband=np.ones((3, 3)))
    combo = CombinerSet(rf_vectors=np.ones((4, 2)), baseband=np.eye(2))
    assert np.array_equal(combo.composite, np.ones((4, 2)))
