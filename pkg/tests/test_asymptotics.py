import mpmath
import numpy as np
import pytest

from switchmimo import (
    InsufficientSamplesError,
    InvalidParameterError,
    appendix_identity_check,
    gamma_factor,
    predict,
    rate_limit,
    sector_expectation_check,
    sinr_limit,
)


def test_gamma_known_values():
    assert gamma_factor(1) == 0.0
    assert gamma_factor(2) == pytest.approx(1.0 / np.pi, abs=1e-15)
    assert gamma_factor(4) == pytest.approx(2.0 / np.pi, abs=1e-12)


def test_gamma_against_high_precision():
    mpmath.mp.dps = 50
    for nq in (2, 3, 4, 5, 8, 16, 64):
        exact = mpmath.mpf(nq) ** 2 / (4 * mpmath.pi) * mpmath.sin(mpmath.pi / nq) ** 2
        assert gamma_factor(nq) == pytest.approx(float(exact), rel=1e-14)


def test_gamma_large_nq_approaches_equal_gain_ratio():
    assert abs(gamma_factor(10**6) - np.pi / 4.0) < 1e-9


def test_gamma_monotone_and_bounded():
    values = [gamma_factor(nq) for nq in range(2, 65)]
    assert np.all(np.diff(values) > 0)
    assert values[-1] < np.pi / 4.0
    assert gamma_factor(1) <= values[0]


def test_gamma_invalid():
    with pytest.raises(InvalidParameterError):
        gamma_factor(0)


def test_sinr_limit_values():
    assert sinr_limit(8, 8, 1) == 0.0
    assert sinr_limit(64, 3, 4) == pytest.approx(64.0 / 3.0 * 2.0 / np.pi, rel=1e-12)
    assert sinr_limit(128, 3, 4) == pytest.approx(2.0 * sinr_limit(64, 3, 4), rel=1e-12)


def test_sinr_limit_invalid_dims():
    with pytest.raises(InvalidParameterError):
        sinr_limit(2, 3, 4)
    with pytest.raises(InvalidParameterError):
        sinr_limit(4, 0, 4)


def test_rate_limit_values():
    assert rate_limit(8, 2, 1) == 0.0
    expected = np.log2(1.0 + 64.0 / 3.0 * 2.0 / np.pi)
    assert rate_limit(64, 3, 4) == pytest.approx(expected, rel=1e-12)
    rates = [rate_limit(64, 3, nq) for nq in range(1, 17)]
    assert np.all(np.diff(rates) > 0)


def test_predict_bundle():
    p = predict(64, 3, 4)
    assert p.gamma == gamma_factor(4)
    assert p.sinr == sinr_limit(64, 3, 4)
    assert p.rate == rate_limit(64, 3, 4)


def test_appendix_identity_hand_value():
    lhs, rhs, diff = appendix_identity_check(2)
    assert lhs == pytest.approx(1.0 / np.pi, abs=1e-15)
    assert rhs == pytest.approx(1.0 / np.pi, abs=1e-15)
    assert diff < 1e-15
    assert appendix_identity_check(1)[2] == pytest.approx(0.0, abs=1e-15)


def test_appendix_identity_sweep():
    worst = max(appendix_identity_check(nq)[2] for nq in range(3, 65))
    assert worst < 1e-12


def test_sector_expectations_full_circle():
    # N_Q = 1: rotated phase is uniform on (0, 2*pi), so E[cos] = 0
    report = sector_expectation_check(1, 200_000, seed=42)
    by_name = {c.name: c for c in report.checks}
    assert by_name["cos_mean"].target == 0.0
    assert report.max_abs_z() < 3.0


def test_sector_expectations_quarter_sector():
    # N_Q = 4: E[cos(theta) | theta ~ U(0, pi/2)] = 2/pi
    report = sector_expectation_check(4, 200_000, seed=43)
    by_name = {c.name: c for c in report.checks}
    assert by_name["cos_mean"].target == pytest.approx(2.0 / np.pi, rel=1e-12)
    assert by_name["magnitude_mean"].target == pytest.approx(np.sqrt(np.pi) / 2.0, rel=1e-12)
    assert report.max_abs_z() < 3.0
    assert report.passed()


def test_sector_expectations_product_targets():
    report = sector_expectation_check(8, 100_000, seed=44)
    by_name = {c.name: c for c in report.checks}
    width = np.pi / 4.0
    assert by_name["magnitude_cos_mean"].target == pytest.approx(
        np.sqrt(np.pi) / 2.0 * np.sin(width) / width, rel=1e-12
    )
    assert by_name["magnitude_sin_mean"].target == pytest.approx(
        np.sqrt(np.pi) / 2.0 * (1.0 - np.cos(width)) / width, rel=1e-12
    )
    assert abs(by_name["independence_gap"].z_score) < 3.0


def test_sector_expectations_sample_floor():
    with pytest.raises(InsufficientSamplesError):
        sector_expectation_check(4, 5000, seed=0)
