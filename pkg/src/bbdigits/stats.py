"""Goodness-of-fit, independence and bit-stream tests returning :class:`TestReport`.

Critical values are asymptotic: Kolmogorov c(alpha) = sqrt(-ln(alpha/2)/2),
normal quantiles from :class:`statistics.NormalDist`, and chi-square
quantiles and tails from scipy's incomplete-gamma routines (``chdtri``,
``chdtrc``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import chdtrc, chdtri

__all__ = [
    "ALPHAS",
    "TestReport",
    "Moments",
    "ecdf",
    "ks_critical",
    "ks_statistic",
    "ks_test",
    "ks_two_sample",
    "chi_square_critical",
    "chi_square_gof",
    "merge_tail",
    "independence_2x2",
    "digit_independence_test",
    "monobit_test",
    "runs_test",
    "moment_report",
    "mean_check",
]

ALPHAS = (0.05, 0.01, 0.001)


@dataclass
class TestReport:
    """Outcome of one check. ``passed`` is decided by ``statistic < threshold``."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    statistic: float
    threshold: float
    sample_size: int
    passed: bool
    p_value: float | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class Moments(NamedTuple):
    mean: float
    variance: float
    stderr: float
    n: int


def _check_alpha(alpha: float) -> float:
    if alpha not in ALPHAS:
        raise ValueError(f"alpha must be one of {ALPHAS}, got {alpha!r}")
    return float(alpha)


def _report(name, statistic, threshold, n, p_value=None, **metadata) -> TestReport:
    statistic = float(statistic)
    threshold = float(threshold)
    return TestReport(
        name=name,
        statistic=statistic,
        threshold=threshold,
        sample_size=int(n),
        passed=bool(statistic < threshold),
        p_value=None if p_value is None else float(p_value),
        metadata=metadata,
    )


def ecdf(samples) -> Callable:
    """Right-continuous empirical CDF of ``samples``."""
    data = np.sort(np.asarray(samples, dtype=float).ravel())
    if data.size == 0:
        raise ValueError("ecdf needs at least one sample")
    n = data.size

    def evaluate(q):
        q = np.asarray(q, dtype=float)
        out = np.searchsorted(data, q, side="right") / n
        return float(out) if out.ndim == 0 else out

    return evaluate


def ks_critical(alpha: float, n: int, m: int | None = None) -> float:
    """Asymptotic Kolmogorov-Smirnov critical value for one or two samples."""
    c = math.sqrt(-math.log(_check_alpha(alpha) / 2.0) / 2.0)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def ks_statistic(samples, cdf: Callable) -> float:
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(samples, cdf: Callable, alpha: float = 0.01, name: str = "ks", **metadata) -> TestReport:
    """One-sample KS test of ``samples`` against the analytic ``cdf``."""
    alpha = _check_alpha(alpha)
    n = np.size(samples)
    if n < 30:
        raise ValueError("ks_test needs at least 30 samples")
    stat = ks_statistic(samples, cdf)
    return _report(name, stat, ks_critical(alpha, n), n, alpha=alpha, **metadata)


def ks_two_sample(a, b, alpha: float = 0.01, name: str = "ks_two_sample", **metadata) -> TestReport:
    alpha = _check_alpha(alpha)
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n, m = a.size, b.size
    if min(n, m) < 30:
        raise ValueError("ks_two_sample needs at least 30 samples per side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / n
    fb = np.searchsorted(b, grid, side="right") / m
    stat = float(np.max(np.abs(fa - fb)))
    return _report(name, stat, ks_critical(alpha, n, m), n + m, alpha=alpha, n_a=n, n_b=m, **metadata)


def chi_square_critical(alpha: float, dof: int) -> float:
    return float(chdtri(dof, alpha))


def merge_tail(counts, probs, min_expected: float = 5.0):
    """Fold trailing bins into their predecessor until every expected count is >= ``min_expected``.

    Returns new ``(counts, probs)`` arrays.
    """
    counts = list(np.asarray(counts, dtype=float))
    probs = list(np.asarray(probs, dtype=float))
    n = sum(counts)
    while len(probs) > 1 and probs[-1] * n < min_expected:
        p, c = probs.pop(), counts.pop()
        probs[-1] += p
        counts[-1] += c
    return np.asarray(counts), np.asarray(probs)


def chi_square_gof(counts, expected_probs, alpha: float = 0.01, name: str = "chi_square", **metadata) -> TestReport:
    """Pearson chi-square against bin probabilities, with bins - 1 degrees of freedom."""
    alpha = _check_alpha(alpha)
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    if counts.shape != probs.shape or counts.ndim != 1 or counts.size < 2:
        raise ValueError("counts and expected_probs must be 1-D of equal length >= 2")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"expected probabilities sum to {probs.sum()!r}, not 1")
    n = counts.sum()
    expected = n * probs
    if np.any(expected < 5.0):
        raise ValueError(
            "expected count below 5 in some bin; merge the tail bins first (see merge_tail)"
        )
    stat = float(np.sum((counts - expected) ** 2 / expected))
    dof = counts.size - 1
    return _report(
        name,
        stat,
        chi_square_critical(alpha, dof),
        n,
        p_value=chdtrc(dof, stat),
        alpha=alpha,
        dof=dof,
        **metadata,
    )


def _pair_chi_square(x: np.ndarray, y: np.ndarray) -> float:
    n = x.size
    n11 = int(np.count_nonzero(x & y))
    n1_ = int(np.count_nonzero(x))
    n_1 = int(np.count_nonzero(y))
    n10 = n1_ - n11
    n01 = n_1 - n11
    n00 = n - n1_ - n_1 + n11
    det = float(n11) * n00 - float(n10) * n01
    return n * det * det / (float(n1_) * (n - n1_) * n_1 * (n - n_1))


def independence_2x2(x, y, alpha: float = 0.01, name: str = "independence_2x2", **metadata) -> TestReport:
    """Pearson chi-square (1 dof, no continuity correction) for two binary variables."""
    alpha = _check_alpha(alpha)
    x = np.asarray(x).astype(bool).ravel()
    y = np.asarray(y).astype(bool).ravel()
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    n = x.size
    if x.all() or not x.any() or y.all() or not y.any():
        raise ValueError("a constant variable has no defined independence statistic")
    stat = _pair_chi_square(x, y)
    return _report(name, stat, chi_square_critical(alpha, 1), n, p_value=chdtrc(1, stat), alpha=alpha, **metadata)


def digit_independence_test(digits, alpha: float = 0.01, **metadata):
    """Pairwise 2x2 chi-square tests between digit columns.

    ``digits`` is an (N, K) 0/1 matrix. Every pair k < l is tested at the
    Bonferroni level alpha / (K(K-1)/2); a pair touching a constant column is
    skipped and listed in the family metadata. Returns ``(family, pairs)``.
    """
    alpha = _check_alpha(alpha)
    d = np.asarray(digits).astype(bool)
    if d.ndim != 2:
        raise ValueError("digit matrix must be 2-D (samples x positions)")
    n, k = d.shape
    if n < 10_000:
        raise ValueError("digit_independence_test needs at least 10^4 samples")
    if not 2 <= k <= 16:
        raise ValueError("digit_independence_test supports 2..16 positions")
    n_pairs = k * (k - 1) // 2
    level = alpha / n_pairs
    critical = chi_square_critical(level, 1)
    ones = d.sum(axis=0)
    constant = {j for j in range(k) if ones[j] in (0, n)}

    pairs, skipped = [], []
    for i in range(k):
        for j in range(i + 1, k):
            if i in constant or j in constant:
                skipped.append([i + 1, j + 1])
                continue
            stat = _pair_chi_square(d[:, i], d[:, j])
            pairs.append(
                _report(
                    f"digit_pair_{i + 1}_{j + 1}",
                    stat,
                    critical,
                    n,
                    p_value=chdtrc(1, stat),
                    alpha=level,
                    positions=[i + 1, j + 1],
                )
            )
    worst = max((p.statistic for p in pairs), default=0.0)
    family = TestReport(
        name="digit_independence",
        statistic=worst,
        threshold=critical,
        sample_size=n,
        passed=all(p.passed for p in pairs),
        p_value=None,
        metadata={
            "alpha": alpha,
            "bonferroni_alpha": level,
            "positions": k,
            "pairs_tested": len(pairs),
            "pairs_failed": sum(not p.passed for p in pairs),
            "skipped_pairs": skipped,
            **metadata,
        },
    )
    return family, pairs


def _bits(bits) -> np.ndarray:
    b = np.asarray(bits).ravel()
    if b.size < 10_000:
        raise ValueError("bit-stream tests need at least 10^4 bits")
    return b.astype(bool)


def _z_report(name, z, alpha, n, **metadata) -> TestReport:
    alpha = _check_alpha(alpha)
    quantile = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    p = 2.0 * NormalDist().cdf(-abs(z)) if math.isfinite(z) else 0.0
    return _report(name, abs(z), quantile, n, p_value=p, alpha=alpha, z=z, **metadata)


def monobit_test(bits, alpha: float = 0.01, **metadata) -> TestReport:
    """Frequency test: z = (2*ones - N)/sqrt(N)."""
    b = _bits(bits)
    n = b.size
    ones = int(np.count_nonzero(b))
    z = (2.0 * ones - n) / math.sqrt(n)
    return _z_report("monobit", z, alpha, n, ones=ones, **metadata)


def runs_test(bits, alpha: float = 0.01, **metadata) -> TestReport:
    """Wald-Wolfowitz runs test conditioned on the observed counts of 0s and 1s.

    A stream made of a single symbol has no defined null variance and is
    reported as a failure with an infinite statistic.
    """
    b = _bits(bits)
    n = b.size
    n1 = int(np.count_nonzero(b))
    n0 = n - n1
    runs = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    if n0 == 0 or n1 == 0:
        return _z_report("runs", math.inf, alpha, n, runs=runs, **metadata)
    prod = 2.0 * n0 * n1
    mean = prod / n + 1.0
    var = prod * (prod - n) / (float(n) * n * (n - 1))
    z = (runs - mean) / math.sqrt(var)
    return _z_report("runs", z, alpha, n, runs=runs, expected_runs=mean, **metadata)


def moment_report(samples) -> Moments:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("moment_report needs at least 2 samples")
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1))
    return Moments(mean, var, math.sqrt(var / x.size), int(x.size))


def mean_check(samples, expected: float, name: str = "mean", sigmas: float = 3.0, **metadata) -> TestReport:
    """Pass when the sample mean lies within ``sigmas`` standard errors of ``expected``."""
    m = moment_report(samples)
    if m.stderr == 0.0:
        z = 0.0 if m.mean == expected else math.inf
    else:
        z = abs(m.mean - expected) / m.stderr
    return _report(
        name, z, sigmas, m.n, mean=m.mean, expected=expected, stderr=m.stderr, **metadata
    )
