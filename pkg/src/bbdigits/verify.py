"""Verification suites behind ``bbdigits verify``.

The exact suite checks closed-form identities at machine precision and draws
no random numbers except a fixed-seed set of probe points. The Monte Carlo
suite samples every route at each beta and runs the tests in :mod:`.stats`.
"""

from __future__ import annotations

import itertools
import math
import platform

import numpy as np
import scipy

from . import __version__
from . import distributions as dist
from . import samplers as smp
from . import stats as st

DEFAULT_BETAS = (0.2, 1.0, 5.0)
DEFAULT_COUNT = 100_000

# Thermal-infrared grid used for the Planck-law identity: beta in ~[1.6e-4, 1.6].
SPECTRUM_NUS = np.geomspace(1e11, 1e13, 10)
SPECTRUM_TEMPERATURES = np.geomspace(300.0, 3000.0, 10)


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    diff = np.abs(a - b)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(diff == 0.0, 0.0, diff / scale)
    return float(np.max(rel))


def _rel1(a: float, b: float) -> float:
    diff = abs(a - b)
    return 0.0 if diff == 0.0 else diff / max(abs(a), abs(b))


def _tol_report(name, err, tol, n, **metadata) -> st.TestReport:
    return st.TestReport(name, float(err), float(tol), int(n), bool(err < tol), None, metadata)


def _all_digit_vectors(max_depth: int):
    for n in range(1, max_depth + 1):
        yield from itertools.product((0, 1), repeat=n)


def check_independence_identity(max_depth=10, a_values=(-10, -1, -0.01, 0.01, 1, 10), tol=1e-14):
    worst, count = 0.0, 0
    for a in a_values:
        for delta in _all_digit_vectors(max_depth):
            worst = max(worst, _rel1(dist.digit_joint_closed(delta, a), dist.digit_joint_integral(delta, a)))
            count += 1
    return _tol_report("independence_identity", worst, tol, count, max_depth=max_depth, a=list(a_values))


def check_marginal_product(max_depth=10, a_values=(-10, -1, -0.01, 0.01, 1, 10), tol=1e-13):
    worst, count = 0.0, 0
    for a in a_values:
        table = [dist.digit_prob(k, a) for k in range(1, max_depth + 1)]
        for delta in _all_digit_vectors(max_depth):
            prod = 1.0
            for marginal, bit in zip(table, delta):
                prod *= marginal[bit]
            worst = max(worst, _rel1(prod, dist.digit_joint_closed(delta, a)))
            count += 1
    return _tol_report("marginal_product", worst, tol, count, max_depth=max_depth)


def check_telescoping(max_n=30, n_a=100, tol=1e-12):
    a_values = np.linspace(-10.0, 10.0, n_a)
    worst = 0.0
    for a in a_values.tolist():
        for n in range(1, max_n + 1):
            worst = max(worst, _rel1(dist.digit_partition_product(a, n), dist.digit_partition_closed(a, n)))
    return _tol_report("telescoping_product", worst, tol, n_a * max_n, max_n=max_n)


def check_planck_factor(n_beta=1000, tol=1e-13):
    betas = np.geomspace(1e-4, 50.0, n_beta)
    lhs = [dist.zeta_mean(b) + dist.mean_occupation(b) for b in betas]
    worst = _rel(lhs, 1.0 / betas)
    exact_zero = dist.zeta_mean(0.0) == 0.5
    return _tol_report(
        "planck_factor_identity",
        worst if exact_zero else math.inf,
        tol,
        n_beta,
        zeta_mean_at_zero=dist.zeta_mean(0.0),
    )


def binary_photon_pmf(n: int, beta: float, extra_levels: int = 40) -> float:
    """P(xi = n) as the product of independent binary-photon marginals."""
    top = math.ceil(math.log2(n + 1)) + extra_levels
    prod = 1.0
    for s in range(top + 1):
        prod *= dist.binary_photon_prob(s, beta)[(n >> s) & 1]
    return prod


def check_binary_photons(max_n=100, betas=(0.3, 1.0, 3.0), tol=1e-10):
    worst = 0.0
    for beta in betas:
        nbar = dist.mean_occupation(beta)
        for n in range(max_n + 1):
            worst = max(worst, _rel1(binary_photon_pmf(n, beta), dist.planck_bose_pmf(n, nbar)))
    return _tol_report("binary_photon_planck_bose", worst, tol, (max_n + 1) * len(betas), betas=list(betas))


def check_marginal_mean(betas=(0.2, 1.0, 1.7, 5.0), depth=60, tol=1e-12):
    worst = 0.0
    for beta in betas:
        s = math.fsum(math.ldexp(dist.digit_prob(k, -beta)[1], -k) for k in range(1, depth + 1))
        worst = max(worst, abs(s - dist.zeta_mean(beta)))
    return _tol_report("digit_marginal_mean", worst, tol, len(betas), depth=depth)


def check_planck_law(tol=1e-14, consts=dist.CODATA):
    worst = 0.0
    n = 0
    for nu in SPECTRUM_NUS:
        for temp in SPECTRUM_TEMPERATURES:
            modes = 8.0 * math.pi * nu * nu / consts.c**3
            u = dist.spectral_density(nu, temp, consts)
            rhs = modes * (dist.oscillator_mean_energy(nu, temp, consts) - consts.h * nu / 2.0)
            worst = max(worst, _rel1(u, rhs))
            n += 1
    return _tol_report("planck_law_identity", worst, tol, n)


def rayleigh_jeans_ratio(beta=0.01, temperature=300.0, consts=dist.CODATA) -> float:
    nu = beta * consts.k * temperature / consts.h
    u = dist.spectral_density(nu, temperature, consts)
    return u * consts.c**3 / (8.0 * math.pi * nu * nu * consts.k * temperature)


def check_rayleigh_jeans():
    ratio = rayleigh_jeans_ratio(0.01)
    ok = 0.995 <= ratio <= 1.0
    return st.TestReport("rayleigh_jeans_limit", ratio, 1.0, 1, ok, None, {"beta": 0.01, "band": [0.995, 1.0]})


def check_entropy(nbars=(0.1, 1.0, 10.0), tol=1e-10):
    worst = max(abs(dist.xi_entropy(m) - dist.xi_entropy_direct(m)) for m in nbars)
    return _tol_report("entropy_closed_form", worst, tol, len(nbars), nbars=list(nbars))


def check_round_trip(depth=10):
    every = np.array(list(itertools.product((0, 1), repeat=depth)), dtype=np.uint8)
    z = smp.reconstruct_zeta(dist.DigitVector(every, "fractional"))
    bad = int(np.count_nonzero((dist.digits_of(z, depth) != every).any(axis=1)))
    return st.TestReport("digit_round_trip", bad, 0.5, len(every), bad == 0, None, {"depth": depth})


def check_rademacher(n=10_000, max_k=20, seed=smp.DEFAULT_SEED):
    x = smp.RngStream(seed).uniform(n)
    digits = dist.digits_of(x, max_k).astype(int)
    bad = 0
    for k in range(1, max_k + 1):
        s = np.sign(np.sin(np.pi * np.ldexp(x, k)))
        r = 1 - 2 * digits[:, k - 1]
        bad += int(np.count_nonzero((s != 0) & (s != r)))
    return st.TestReport("rademacher_relation", bad, 0.5, n * max_k, bad == 0, None, {"max_k": max_k})


def check_normalization(tol=1e-9):
    from scipy import integrate

    worst = 0.0
    for p in (0.01, 0.1, 1.0, 5.0, 20.0):
        mass_eta = integrate.quad(lambda y: dist.eta_pdf(y, p), 0.0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
        mass_zeta = integrate.quad(lambda z: dist.zeta_pdf(z, p), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
        worst = max(worst, abs(mass_eta - 1.0), abs(mass_zeta - 1.0))
        for a in (p, -p):
            mass = integrate.quad(lambda x: dist.f_a(x, a), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
            worst = max(worst, abs(mass - 1.0))
    return _tol_report("normalization", worst, tol, 20)


def check_zero_point():
    ok = (
        all(dist.digit_prob(k, 0.0) == (0.5, 0.5) for k in range(1, 65))
        and dist.f_a(0.77, 0.0) == 1.0
        and dist.zeta_mean(0.0) == 0.5
    )
    return st.TestReport("zero_point_case", 0.0 if ok else 1.0, 0.5, 64, ok, None, {})


def exact_suite() -> list[st.TestReport]:
    return [
        check_independence_identity(),
        check_marginal_product(),
        check_telescoping(),
        check_planck_factor(),
        check_binary_photons(),
        check_marginal_mean(),
        check_planck_law(),
        check_rayleigh_jeans(),
        check_entropy(),
        check_round_trip(),
        check_rademacher(),
        check_normalization(),
        check_zero_point(),
    ]


# ---------------------------------------------------------------------------
# Monte Carlo


def planck_bose_bins(samples, beta: float):
    """Counts and probabilities on bins {0, 1, ..., tail}, tail merged to >= 5 expected."""
    samples = np.asarray(samples)
    n = samples.size
    nbar = dist.mean_occupation(beta)
    probs, counts = [], []
    top = 0
    while True:
        p = dist.planck_bose_pmf(top, nbar)
        tail = 1.0 - math.fsum(probs) - p
        if p * n < 5.0 or tail * n < 5.0:
            break
        probs.append(p)
        counts.append(int(np.count_nonzero(samples == top)))
        top += 1
    probs.append(1.0 - math.fsum(probs))
    counts.append(int(np.count_nonzero(samples >= top)))
    return st.merge_tail(counts, probs)


def digit_marginal_report(digits: np.ndarray, beta: float, sigmas: float = 3.0, **metadata) -> st.TestReport:
    """Largest binomial z-score of the per-position frequency of eps_k = 1."""
    n, k_max = digits.shape
    freqs = digits.mean(axis=0)
    zs = []
    for k in range(1, k_max + 1):
        p = dist.digit_prob(k, -beta)[1]
        zs.append(abs(freqs[k - 1] - p) / math.sqrt(p * (1.0 - p) / n))
    return st.TestReport(
        "digit_marginals",
        float(max(zs)),
        sigmas,
        n,
        bool(max(zs) < sigmas),
        None,
        {**metadata, "beta": beta, "positions": k_max, "z": [float(z) for z in zs]},
    )


def xi_zeta_independence(sample: smp.EnergySample, alpha: float, **metadata) -> st.TestReport:
    """2x2 chi-square of {xi = 0, xi >= 1} against {zeta below / above its median}."""
    a = np.asarray(sample.xi) >= 1
    b = np.asarray(sample.zeta) >= np.median(sample.zeta)
    return st.independence_2x2(a, b, alpha, name="xi_zeta_independence", **metadata)


def monte_carlo_beta(beta: float, rng: smp.RngStream, count: int, alpha: float, depth: int = 53):
    routes = dict(zip(smp.ROUTES, rng.split(3)))
    extra = rng.split(4)
    meta = {"beta": beta, "seed": rng.seed}
    reports = []

    zeta = {}
    energies = {}
    energies["amplitude"] = smp.sample_eta_via_amplitudes(routes["amplitude"], beta, count)
    energies["direct"] = smp.sample_eta_direct(routes["direct"], beta, count)
    zeta["amplitude"] = energies["amplitude"].zeta
    zeta["direct"] = energies["direct"].zeta
    zeta["digits"], digit_vec = smp.sample_zeta_via_digits(routes["digits"], beta, depth, count)

    for r1, r2 in itertools.combinations(smp.ROUTES, 2):
        reports.append(
            st.ks_two_sample(zeta[r1], zeta[r2], alpha, name=f"route_ks_{r1}_vs_{r2}", **meta)
        )
    reports.append(
        st.ks_test(zeta["digits"], lambda z: dist.zeta_cdf(z, beta), alpha, name="digit_route_ks_vs_cdf", **meta)
    )

    for name, xi in (
        ("planck_bose_geometric", smp.sample_xi_geometric(extra[0], beta, count)),
        ("planck_bose_binary_photons", smp.sample_xi_via_binary_photons(extra[1], beta, size=count)[0]),
    ):
        counts, probs = planck_bose_bins(xi, beta)
        if counts.size >= 2:
            reports.append(st.chi_square_gof(counts, probs, alpha, name=name, **meta))

    thermal = smp.sample_zeta_truncexp(extra[2], beta, count)
    family, _ = st.digit_independence_test(dist.digits_of(thermal, 10), alpha, **meta)
    reports.append(family)
    reports.append(digit_marginal_report(digit_vec.bits[:, :12], beta, seed=rng.seed))

    reports.append(st.mean_check(zeta["direct"], dist.zeta_mean(beta), name="zeta_mean", **meta))
    xi_direct = np.asarray(energies["direct"].xi)
    reports.append(st.mean_check(xi_direct, dist.mean_occupation(beta), name="xi_mean", **meta))
    if np.any(xi_direct >= 1) and np.any(xi_direct == 0):
        reports.append(xi_zeta_independence(energies["direct"], alpha, **meta))
    return reports


def zero_point_reports(rng: smp.RngStream, count: int, alpha: float):
    u_rng, b_rng = rng.split(2)
    meta = {"seed": rng.seed}
    uniforms = smp.zero_point_uniform(u_rng, count)
    bits = smp.zero_point_bits(b_rng, max(10 * count, 10_000))
    return [
        st.mean_check(uniforms, 0.5, name="zero_point_uniform_mean", **meta),
        st.monobit_test(bits, alpha, **meta),
        st.runs_test(bits, alpha, **meta),
    ]


def monte_carlo_suite(betas=DEFAULT_BETAS, seed=smp.DEFAULT_SEED, count=DEFAULT_COUNT, alpha=0.01):
    root = smp.RngStream(seed)
    streams = root.split(len(betas) + 1)
    reports = []
    for beta, stream in zip(betas, streams):
        reports.extend(monte_carlo_beta(float(beta), stream, count, alpha))
    reports.extend(zero_point_reports(streams[-1], count, alpha))
    return reports


def versions() -> dict:
    return {
        "bbdigits": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def run(betas=DEFAULT_BETAS, seed=smp.DEFAULT_SEED, count=DEFAULT_COUNT, alpha=0.01, exact_only=False) -> dict:
    reports = exact_suite()
    if not exact_only:
        reports += monte_carlo_suite(betas, seed, count, alpha)
    passed = sum(r.passed for r in reports)
    return {
        "summary": {
            "total": len(reports),
            "passed": passed,
            "failed": len(reports) - passed,
            "seed": seed,
            "versions": versions(),
        },
        "reports": [r.to_dict() for r in reports],
        "config": {
            "betas": [float(b) for b in betas],
            "seed": seed,
            "count": count,
            "alpha": alpha,
            "exact_only": exact_only,
        },
    }
