import math

import numpy as np
import pytest
from scipy import stats as sps

from bbdigits import stats as st


def test_ecdf_examples():
    F = st.ecdf([3.0, 1.0, 2.0, 2.0])
    assert F(0.5) == 0.0
    assert F(1.0) == 0.25
    assert F(2.0) == 0.75
    assert F(10.0) == 1.0
    assert np.array_equal(F([1.0, 3.0]), [0.25, 1.0])
    with pytest.raises(ValueError):
        st.ecdf([])


def test_ks_critical_values():
    assert st.ks_critical(0.05, 1) == pytest.approx(1.3581, abs=1e-4)
    assert st.ks_critical(0.01, 1) == pytest.approx(1.6276, abs=1e-4)
    assert st.ks_critical(0.01, 100, 100) == pytest.approx(1.6276 * math.sqrt(0.02), abs=1e-4)
    with pytest.raises(ValueError):
        st.ks_critical(0.5, 10)


def test_ks_statistic_matches_scipy():
    x = np.random.default_rng(1).exponential(size=500)
    cdf = lambda t: 1 - np.exp(-t)
    assert st.ks_statistic(x, cdf) == pytest.approx(sps.ks_1samp(x, cdf).statistic, abs=1e-15)


def test_ks_two_sample_matches_scipy():
    g = np.random.default_rng(2)
    a, b = g.normal(size=700), g.normal(0.1, size=400)
    rep = st.ks_two_sample(a, b)
    assert rep.statistic == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-15)


def test_ks_identical_samples():
    x = np.random.default_rng(3).uniform(size=1000)
    rep = st.ks_two_sample(x, x.copy())
    assert rep.statistic == 0.0 and rep.passed


def test_ks_small_sample_rejected():
    with pytest.raises(ValueError):
        st.ks_test(np.zeros(10), lambda t: t)
    with pytest.raises(ValueError):
        st.ks_two_sample(np.zeros(10), np.zeros(100))


def test_ks_level_and_power():
    g = np.random.default_rng(4)
    passes = sum(st.ks_test(g.uniform(size=2000), lambda t: np.clip(t, 0, 1)).passed for _ in range(100))
    assert passes >= 95
    rep = st.ks_test(g.uniform(size=10_000) ** 1.2, lambda t: np.clip(t, 0, 1))
    assert not rep.passed


def test_chi_square_critical_values():
    assert st.chi_square_critical(0.05, 1) == pytest.approx(3.841459, abs=1e-6)
    assert st.chi_square_critical(0.01, 10) == pytest.approx(23.209251, abs=1e-6)
    assert st.chi_square_critical(0.001, 4) == pytest.approx(sps.chi2.ppf(0.999, 4), rel=1e-12)


def test_chi_square_matches_scipy():
    counts = np.array([48, 35, 15, 2 + 100])
    probs = np.array([0.25, 0.2, 0.1, 0.45])
    rep = st.chi_square_gof(counts, probs)
    ref = sps.chisquare(counts, probs * counts.sum())
    assert rep.statistic == pytest.approx(ref.statistic, rel=1e-13)
    assert rep.p_value == pytest.approx(ref.pvalue, rel=1e-10)
    assert rep.metadata["dof"] == 3


def test_chi_square_proportional_counts():
    rep = st.chi_square_gof([500, 300, 200], [0.5, 0.3, 0.2])
    assert rep.statistic == 0.0 and rep.passed


def test_chi_square_detects_swapped_probabilities():
    rep = st.chi_square_gof([7000, 3000], [0.3, 0.7])
    assert not rep.passed


def test_chi_square_requires_merged_tail():
    with pytest.raises(ValueError, match="merge"):
        st.chi_square_gof([100, 50, 3], [0.66, 0.33, 0.01])
    counts, probs = st.merge_tail([100, 50, 3], [0.66, 0.33, 0.01])
    assert list(counts) == [100, 53] and probs[-1] == pytest.approx(0.34)
    assert st.chi_square_gof(counts, probs).sample_size == 153


def test_chi_square_shape_checks():
    with pytest.raises(ValueError):
        st.chi_square_gof([1, 2], [0.5, 0.25, 0.25])
    with pytest.raises(ValueError):
        st.chi_square_gof([100, 100], [0.5, 0.6])


def test_independence_2x2_matches_scipy():
    g = np.random.default_rng(5)
    x = g.integers(0, 2, 5000)
    y = (g.uniform(size=5000) < 0.3 + 0.05 * x).astype(int)
    rep = st.independence_2x2(x, y)
    table = np.array([[np.sum((x == i) & (y == j)) for j in (0, 1)] for i in (0, 1)])
    ref = sps.chi2_contingency(table, correction=False)
    assert rep.statistic == pytest.approx(ref.statistic, rel=1e-12)


def test_independence_rejects_constant():
    with pytest.raises(ValueError):
        st.independence_2x2(np.ones(100), np.arange(100) % 2)


def test_digit_independence_copy_fails():
    g = np.random.default_rng(6)
    d = g.integers(0, 2, (20_000, 4))
    d[:, 3] = d[:, 0]
    family, pairs = st.digit_independence_test(d)
    assert not family.passed
    failed = [p.metadata["positions"] for p in pairs if not p.passed]
    assert failed == [[1, 4]]
    assert family.metadata["bonferroni_alpha"] == pytest.approx(0.01 / 6)


def test_digit_independence_fair_family_passes():
    d = np.random.default_rng(7).integers(0, 2, (20_000, 10))
    family, pairs = st.digit_independence_test(d)
    assert family.passed and len(pairs) == 45


def test_digit_independence_skips_constant_column():
    d = np.random.default_rng(8).integers(0, 2, (10_000, 3))
    d[:, 2] = 0
    family, pairs = st.digit_independence_test(d)
    assert family.metadata["skipped_pairs"] == [[1, 3], [2, 3]]
    assert len(pairs) == 1


def test_digit_independence_limits():
    with pytest.raises(ValueError):
        st.digit_independence_test(np.zeros((100, 3)))
    with pytest.raises(ValueError):
        st.digit_independence_test(np.zeros((10_000, 17)))


def test_bonferroni_family_error_bounded():
    g = np.random.default_rng(9)
    rejections = sum(
        not st.digit_independence_test(g.integers(0, 2, (10_000, 6)), alpha=0.05)[0].passed
        for _ in range(100)
    )
    # family-wise error should be at most ~5%; allow binomial slack
    assert rejections <= 11


def test_monobit_examples():
    alt = np.arange(10_000) % 2
    assert st.monobit_test(alt).statistic == 0.0
    assert not st.monobit_test(np.ones(10_000)).passed


def test_runs_examples():
    alt = np.arange(10_000) % 2
    rep = st.runs_test(alt)
    assert rep.metadata["runs"] == 10_000 and not rep.passed
    ones = st.runs_test(np.ones(10_000))
    assert math.isinf(ones.statistic) and not ones.passed
    fair = st.runs_test(np.random.default_rng(10).integers(0, 2, 100_000))
    assert fair.passed


def test_bit_tests_need_enough_bits():
    with pytest.raises(ValueError):
        st.monobit_test(np.zeros(100))
    with pytest.raises(ValueError):
        st.runs_test(np.zeros(100))


def test_moments_and_mean_check():
    m = st.moment_report([1.0, 2.0, 3.0, 4.0])
    assert m.mean == 2.5 and m.variance == pytest.approx(5 / 3) and m.n == 4
    assert m.stderr == pytest.approx(math.sqrt(5 / 12))
    assert st.mean_check([1.0, 2.0, 3.0, 4.0], 2.5).passed
    assert not st.mean_check([1.0, 2.0, 3.0, 4.0], 10.0).passed
    assert st.mean_check([2.0, 2.0], 2.0).passed
    assert not st.mean_check([2.0, 2.0], 2.1).passed


def test_report_serialises():
    rep = st.monobit_test(np.arange(10_000) % 2, seed=3)
    d = rep.to_dict()
    assert d["name"] == "monobit" and d["metadata"]["seed"] == 3
    assert set(d) == {"name", "statistic", "threshold", "sample_size", "passed", "p_value", "metadata"}


def test_merge_tail_folds_into_predecessor():
    counts, probs = st.merge_tail([90, 4, 3, 3], [0.9, 0.04, 0.03, 0.03])
    assert list(counts) == [90, 4, 6]
    assert probs == pytest.approx([0.9, 0.04, 0.06])
