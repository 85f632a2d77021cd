"""Acceptance criteria, each at its stated tolerance.

Seeds for the repeated Monte Carlo criteria are fixed in advance as 0..99;
single-run criteria use the package default seed. A summary line per
criterion is printed at the end of the pytest run (see conftest.py).
"""

import itertools
import math
import time

import numpy as np
import pytest

from bbdigits import distributions as d
from bbdigits import samplers as s
from bbdigits import stats as st
from bbdigits.distributions import CODATA, DigitVector

SEEDS = range(100)
MIN_PASSES = 98


def rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def digit_vectors(max_depth):
    for n in range(1, max_depth + 1):
        yield from itertools.product((0, 1), repeat=n)


@pytest.mark.criterion(1, "independence identity, closed vs integral joint law")
def test_independence_identity(record_property):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for a in (-10.0, -1.0, -0.01, 0.01, 1.0, 10.0):
        for delta in digit_vectors(10):
            worst = max(worst, rel(d.digit_joint_closed(delta, a), d.digit_joint_integral(delta, a)))
            count += 1
    elapsed = time.perf_counter() - start
    record_property("summary", f"{count} cases, max rel {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-14
    assert elapsed < 1.0


@pytest.mark.criterion(2, "telescoping product of digit normalizers")
def test_telescoping_product(record_property):
    start = time.perf_counter()
    worst = 0.0
    for a in np.linspace(-10.0, 10.0, 100):
        for n in range(1, 31):
            worst = max(worst, rel(d.digit_partition_product(a, n), d.digit_partition_closed(a, n)))
    elapsed = time.perf_counter() - start
    record_property("summary", f"max rel {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-12
    assert elapsed < 1.0


@pytest.mark.criterion(3, "fractional mean plus Planck factor equals 1/beta")
def test_planck_factor_identity(record_property):
    worst = max(rel(d.zeta_mean(b) + d.mean_occupation(b), 1.0 / b) for b in np.geomspace(1e-4, 50.0, 1000))
    record_property("summary", f"max rel {worst:.2e}")
    assert worst <= 1e-13
    assert d.zeta_mean(0.0) == 0.5


def product_of_binary_marginals(n, beta, levels=80):
    prod = 1.0
    for level in range(levels):
        prod *= d.binary_photon_prob(level, beta)[(n >> level) & 1]
    return prod


@pytest.mark.criterion(4, "binary photons reproduce the Planck-Bose law")
def test_binary_photon_consistency(record_property):
    worst = 0.0
    for beta in (0.3, 1.0, 3.0):
        nbar = d.mean_occupation(beta)
        for n in range(101):
            worst = max(worst, rel(product_of_binary_marginals(n, beta), d.planck_bose_pmf(n, nbar)))
    record_property("summary", f"max rel {worst:.2e}")
    assert worst <= 1e-10


ROUTE_PAIRS = (("amplitude", "direct"), ("amplitude", "digits"), ("direct", "digits"))


@pytest.mark.criterion(5, "route equivalence, pairwise two-sample KS")
def test_route_equivalence(record_property):
    start = time.perf_counter()
    betas = (0.2, 1.0, 5.0)
    passes = {(b, pair): 0 for b in betas for pair in ROUTE_PAIRS}
    for seed in SEEDS:
        streams = iter(s.RngStream(seed).split(3 * len(betas)))
        for beta in betas:
            z = {
                "amplitude": s.sample_eta_via_amplitudes(next(streams), beta, 100_000).zeta,
                "direct": s.sample_eta_direct(next(streams), beta, 100_000).zeta,
                "digits": s.sample_zeta_via_digits(next(streams), beta, 53, 100_000)[0],
            }
            for pair in ROUTE_PAIRS:
                passes[beta, pair] += st.ks_two_sample(z[pair[0]], z[pair[1]], alpha=0.01).passed
    elapsed = time.perf_counter() - start
    fewest = min(passes.values())
    record_property("summary", f"fewest passes {fewest}/100 over 9 (beta, pair) cells, {elapsed:.1f} s")
    assert all(v >= MIN_PASSES for v in passes.values()), passes
    assert elapsed < 60.0


@pytest.mark.criterion(6, "digit independence of extracted digits")
def test_digit_independence(record_property):
    passes = 0
    for seed in SEEDS:
        zeta = s.sample_zeta_truncexp(s.RngStream(seed), 1.0, 100_000)
        family, _ = st.digit_independence_test(d.digits_of(zeta, 10), alpha=0.01)
        passes += family.passed
    record_property("summary", f"{passes}/100 seeds")
    assert passes >= MIN_PASSES


@pytest.mark.criterion(7, "digit marginal frequencies within 3 sigma")
@pytest.mark.parametrize("source", ["extracted", "sampled"])
def test_digit_marginals(source, record_property):
    n = 1_000_000
    worst = 0.0
    for beta in (0.5, 1.0, 2.0):
        rng = s.RngStream(s.DEFAULT_SEED)
        if source == "extracted":
            bits = d.digits_of(s.sample_zeta_truncexp(rng, beta, n), 12)
        else:
            bits = s.sample_zeta_via_digits(rng, beta, 12, n)[1].bits
        freq = bits.mean(axis=0)
        for k in range(1, 13):
            p = d.digit_prob(k, -beta)[1]
            worst = max(worst, abs(freq[k - 1] - p) / math.sqrt(p * (1 - p) / n))
    record_property("summary", f"{source}: max |z| {worst:.2f}")
    assert worst < 3.0


@pytest.mark.criterion(8, "zero-point generator: uniform mean, monobit, runs")
def test_zero_point_generator(record_property):
    n = 1_000_000
    u = s.zero_point_uniform(s.RngStream(s.DEFAULT_SEED), n)
    mean_ok = abs(u.mean() - 0.5) < 3 * math.sqrt(1 / 12 / n)
    monobit = runs = 0
    for seed in SEEDS:
        bits = s.zero_point_bits(s.RngStream(seed), n)
        monobit += st.monobit_test(bits, alpha=0.01).passed
        runs += st.runs_test(bits, alpha=0.01).passed
    record_property("summary", f"mean dev {abs(u.mean() - 0.5):.1e}, monobit {monobit}/100, runs {runs}/100")
    assert mean_ok
    assert monobit >= MIN_PASSES and runs >= MIN_PASSES


@pytest.mark.criterion(9, "Planck law from the mean oscillator energy, Rayleigh-Jeans limit")
def test_planck_law(record_property):
    worst = 0.0
    grid = list(itertools.product(np.geomspace(1e11, 1e13, 10), np.geomspace(300.0, 3000.0, 10)))
    for nu, temp in grid:
        modes = 8 * math.pi * nu**2 / CODATA.c**3
        rhs = modes * (d.oscillator_mean_energy(nu, temp) - CODATA.h * nu / 2)
        worst = max(worst, rel(d.spectral_density(nu, temp), rhs))
    temp = 300.0
    nu = 0.01 * CODATA.k * temp / CODATA.h
    ratio = d.spectral_density(nu, temp) * CODATA.c**3 / (8 * math.pi * nu**2 * CODATA.k * temp)
    record_property("summary", f"{len(grid)} points, max rel {worst:.2e}, RJ ratio {ratio:.6f}")
    assert len(grid) == 100
    assert worst <= 1e-14
    assert 0.995 <= ratio <= 1.0


@pytest.mark.criterion(10, "Planck-Bose entropy closed form")
def test_entropy(record_property):
    worst = max(rel(d.xi_entropy(nbar), d.xi_entropy_direct(nbar)) for nbar in (0.1, 1.0, 10.0))
    record_property("summary", f"max rel {worst:.2e}")
    assert worst <= 1e-10


@pytest.mark.criterion(11, "reconstruction exactness")
def test_round_trip_exhaustive():
    for delta in itertools.product((0, 1), repeat=10):
        z = s.reconstruct_zeta(DigitVector.fractional(delta))
        assert tuple(d.digit_of(z, k) for k in range(1, 11)) == delta


@pytest.mark.criterion(11, "reconstruction exactness")
def test_energy_split_exact():
    for seed, beta in itertools.product(range(5), (0.01, 0.2, 1.0, 5.0, 40.0)):
        rng = s.RngStream(seed)
        zeta, _ = s.sample_zeta_via_digits(rng, beta, 53, 10_000)
        xi, _ = s.sample_xi_via_binary_photons(rng, beta, size=10_000)
        for sample in (
            s.sample_eta_via_amplitudes(rng, beta, 10_000),
            s.sample_eta_direct(rng, beta, 10_000),
            s.EnergySample.from_eta(xi + zeta, "digits"),
        ):
            assert np.array_equal(sample.xi + sample.zeta, sample.eta)
            assert np.all((sample.zeta >= 0) & (sample.zeta < 1))
