"""Closed-form laws for the energy of one thermal radiation mode.

Everything here is a pure function of its arguments. The mode energy in units
of h*nu is written ``eta``; it splits into an integer part ``xi`` (photon
number, Planck-Bose law) and a fractional part ``zeta`` (truncated exponential
on [0, 1)). All distributions depend on (nu, T) only through the
dimensionless ratio ``beta = h*nu / (k*T)``.

Continuous densities and distribution functions accept scalars or numpy
arrays. Scalar in, float out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "DomainError",
    "PhysicalConstants",
    "CODATA",
    "ModeParams",
    "DigitVector",
    "SpectralPoint",
    "beta_of",
    "eta_pdf",
    "eta_cdf",
    "zeta_pdf",
    "zeta_cdf",
    "zeta_mean",
    "mean_occupation",
    "planck_bose_pmf",
    "xi_entropy",
    "xi_entropy_direct",
    "spectral_density",
    "oscillator_mean_energy",
    "spectral_point",
    "binary_photon_prob",
    "digit_prob",
    "digit_partition_product",
    "digit_partition_closed",
    "digit_joint_closed",
    "digit_joint_integral",
    "digit_joint_marginals",
    "f_a",
    "digit_of",
    "digits_of",
    "rademacher",
]

# exp(-x) underflows to exactly 0 beyond this point.
_EXP_UNDERFLOW = 745.0
# Below this beta the fractional mean switches to its Taylor series.
_SMALL_BETA = 0.05
# |a| below this is indistinguishable from 0 at double precision in every
# e^(a x) ratio; routing it to the a = 0 branch avoids subnormal round-off.
NEGLIGIBLE = 2.0**-60


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def _finite_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _out(arr):
    arr = np.asarray(arr, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class PhysicalConstants:
    """CGS constants. Defaults are the exact CODATA 2018 values."""

    h: float = 6.62607015e-27  # erg s
    k: float = 1.380649e-16  # erg / K
    c: float = 2.99792458e10  # cm / s

    def __post_init__(self):
        for name in ("h", "k", "c"):
            _finite_positive(name, getattr(self, name))


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class ModeParams:
    """A single radiation mode at frequency ``nu`` (Hz) and temperature (K).

    ``beta`` is derived on access so it can never disagree with the inputs.
    """

    nu: float
    temperature: float
    constants: PhysicalConstants = field(default=CODATA)

    def __post_init__(self):
        _finite_positive("nu", self.nu)
        _finite_positive("temperature", self.temperature)

    @property
    def beta(self) -> float:
        return beta_of(self.nu, self.temperature, self.constants)

    @property
    def quantum(self) -> float:
        """Energy quantum h*nu in erg."""
        return self.constants.h * self.nu


@dataclass(frozen=True)
class DigitVector:
    """A finite block of binary digits.

    ``kind="fractional"`` holds eps_1..eps_n with weights 2**-k;
    ``kind="integer"`` holds mu_0..mu_{n-1} with weights 2**s.
    ``bits`` may carry leading batch axes; the last axis is the digit axis.
    """

    bits: np.ndarray
    kind: str = "fractional"

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim == 0 or bits.shape[-1] < 1:
            raise DomainError("a DigitVector needs at least one digit")
        if self.kind not in ("fractional", "integer"):
            raise DomainError(f"unknown digit kind {self.kind!r}")
        if bits.dtype != np.bool_ and bits.size and not ((bits == 0) | (bits == 1)).all():
            raise DomainError("digits must be 0 or 1")
        object.__setattr__(self, "bits", bits.astype(np.uint8, copy=False))

    @classmethod
    def fractional(cls, bits: Sequence[int]) -> "DigitVector":
        return cls(np.asarray(bits), "fractional")

    @classmethod
    def integer(cls, bits: Sequence[int]) -> "DigitVector":
        return cls(np.asarray(bits), "integer")

    @property
    def depth(self) -> int:
        return int(self.bits.shape[-1])

    def __len__(self) -> int:
        return self.depth

    def as_string(self) -> str:
        if self.bits.ndim != 1:
            raise ValueError("as_string needs a single digit vector")
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class SpectralPoint:
    nu: float
    temperature: float
    u_nu: float  # erg s / cm^3
    mean_energy: float  # erg, includes h*nu/2
    occupation: float
    beta: float


# ---------------------------------------------------------------------------
# Energy of the mode


def beta_of(nu: float, temperature: float, consts: PhysicalConstants = CODATA) -> float:
    """Dimensionless ratio h*nu / (k*T)."""
    nu = _finite_positive("nu", nu)
    temperature = _finite_positive("temperature", temperature)
    beta = consts.h * nu / (consts.k * temperature)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta overflowed or underflowed: {beta!r}")
    return beta


def eta_pdf(y, beta: float):
    """Exponential density beta*exp(-beta*y), zero for y < 0."""
    beta = _finite_positive("beta", beta)
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        dens = np.where(y >= 0.0, beta * np.exp(-beta * np.maximum(y, 0.0)), 0.0)
    return _out(dens)


def eta_cdf(y, beta: float):
    beta = _finite_positive("beta", beta)
    y = np.asarray(y, dtype=float)
    return _out(np.where(y > 0.0, -np.expm1(-beta * np.maximum(y, 0.0)), 0.0))


def _unit_interval(z, closed: bool = True) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    upper_ok = (z <= 1.0) if closed else (z < 1.0)
    if not np.all((z >= 0.0) & upper_ok):
        side = "]" if closed else ")"
        raise DomainError(f"argument must lie in [0, 1{side}")
    return z


def _nonneg_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0.0:
        raise DomainError(f"beta must be finite and >= 0, got {beta!r}")
    return beta


def zeta_pdf(z, beta: float):
    """Density of the fractional part, beta*exp(-beta*z)/(1 - exp(-beta)).

    ``beta = 0`` is accepted as the uniform limit.
    """
    beta = _nonneg_beta(beta)
    z = _unit_interval(z)
    if beta < NEGLIGIBLE:
        return _out(np.ones_like(z))
    return _out(beta * np.exp(-beta * z) / -math.expm1(-beta))


def zeta_cdf(z, beta: float):
    beta = _nonneg_beta(beta)
    z = _unit_interval(z)
    if beta < NEGLIGIBLE:
        return _out(z.copy())
    return _out(np.expm1(-beta * z) / math.expm1(-beta))


def zeta_mean(beta: float) -> float:
    """Mean of the fractional part, 1/beta - 1/(exp(beta) - 1).

    Tends to 1/2 as beta -> 0; exactly 0.5 at beta = 0.
    """
    beta = _nonneg_beta(beta)
    if beta == 0.0:
        return 0.5
    if beta < _SMALL_BETA:
        b2 = beta * beta
        # odd part of the Bernoulli series of x/(e^x - 1), divided through by x
        return 0.5 - beta * (
            1.0 / 12.0
            - b2 * (1.0 / 720.0 - b2 * (1.0 / 30240.0 - b2 * (1.0 / 1209600.0 - b2 / 47900160.0)))
        )
    return 1.0 / beta - mean_occupation(beta)


def mean_occupation(beta: float) -> float:
    """Planck factor 1/(exp(beta) - 1)."""
    beta = _finite_positive("beta", beta)
    if beta > 1.0:
        # expm1 overflows above ~709.8; this form just underflows to 0
        tail = math.exp(-beta)
        return tail / (1.0 - tail)
    return 1.0 / math.expm1(beta)


def planck_bose_pmf(n: int, nbar: float) -> float:
    """P(xi = n) = nbar**n / (1 + nbar)**(n + 1)."""
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    nbar = _finite_positive("nbar", nbar)
    ratio = nbar / (1.0 + nbar)
    return ratio ** int(n) / (1.0 + nbar)


def xi_entropy(nbar: float) -> float:
    """Entropy of the Planck-Bose law in units of k (natural log)."""
    nbar = _finite_positive("nbar", nbar)
    return (1.0 + nbar) * math.log1p(nbar) - nbar * math.log(nbar)


def xi_entropy_direct(nbar: float, tail: float = 1e-15) -> float:
    """-sum P ln P summed term by term until the remaining mass drops below ``tail``."""
    nbar = _finite_positive("nbar", nbar)
    ratio = nbar / (1.0 + nbar)
    log_ratio = math.log(ratio)
    log_p0 = -math.log1p(nbar)
    total = 0.0
    remaining = 1.0
    n = 0
    while remaining >= tail:
        logp = log_p0 + n * log_ratio
        p = math.exp(logp)
        total -= p * logp
        remaining = ratio ** (n + 1)  # P(xi > n)
        n += 1
    return total


# ---------------------------------------------------------------------------
# Spectral law


def spectral_density(nu: float, temperature: float, consts: PhysicalConstants = CODATA) -> float:
    """Planck spectral energy density u_nu in erg s / cm^3."""
    beta = beta_of(nu, temperature, consts)
    modes = 8.0 * math.pi * nu * nu / consts.c**3
    return modes * consts.h * nu * mean_occupation(beta)


def oscillator_mean_energy(nu: float, temperature: float, consts: PhysicalConstants = CODATA) -> float:
    """Mean oscillator energy h*nu*(nbar + 1/2) in erg, zero-point term included."""
    beta = beta_of(nu, temperature, consts)
    return consts.h * nu * (mean_occupation(beta) + 0.5)


def spectral_point(nu: float, temperature: float, consts: PhysicalConstants = CODATA) -> SpectralPoint:
    beta = beta_of(nu, temperature, consts)
    return SpectralPoint(
        nu=float(nu),
        temperature=float(temperature),
        u_nu=spectral_density(nu, temperature, consts),
        mean_energy=oscillator_mean_energy(nu, temperature, consts),
        occupation=mean_occupation(beta),
        beta=beta,
    )


# ---------------------------------------------------------------------------
# Binary digits


def _logistic_pair(t: float) -> tuple[float, float]:
    """(1/(1+e^t), e^t/(1+e^t)) without overflow."""
    if t >= 0.0:
        e = math.exp(-t)
        return e / (1.0 + e), 1.0 / (1.0 + e)
    e = math.exp(t)
    return 1.0 / (1.0 + e), e / (1.0 + e)


def binary_photon_prob(s: int, beta: float) -> tuple[float, float]:
    """(P(mu_s = 0), P(mu_s = 1)) for the binary photon of weight 2**s.

    P(mu_s = 1) = b**(2**s) / (1 + b**(2**s)) with b = exp(-beta). Once
    beta * 2**s passes the double underflow point the result saturates to
    exactly (1.0, 0.0).
    """
    if isinstance(s, bool) or int(s) != s or s < 0:
        raise DomainError(f"level s must be a non-negative integer, got {s!r}")
    beta = _finite_positive("beta", beta)
    x = math.ldexp(beta, int(s)) if s < 1024 else math.inf
    if x > _EXP_UNDERFLOW:
        return 1.0, 0.0
    return _logistic_pair(-x)


def digit_prob(k: int, a: float) -> tuple[float, float]:
    """(P(eps_k = 0), P(eps_k = 1)) under the density f_a.

    P(eps_k = 1) = e^(a/2^k) / (1 + e^(a/2^k)); ``a = -beta`` is the thermal
    fractional part, ``a = 0`` gives fair digits.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"digit position k must be an integer >= 1, got {k!r}")
    a = _finite("a", a)
    if a == 0.0:
        return 0.5, 0.5
    return _logistic_pair(math.ldexp(a, -int(k)))


def digit_partition_product(a: float, n: int) -> float:
    """prod_{k=1}^{n} (1 + e^(a/2^k)), multiplied out factor by factor."""
    a = _finite("a", a)
    prod = 1.0
    for k in range(1, n + 1):
        prod *= 1.0 + math.exp(math.ldexp(a, -k))
    return prod


def digit_partition_closed(a: float, n: int) -> float:
    """Telescoped form (e^a - 1)/(e^(a/2^n) - 1) of :func:`digit_partition_product`."""
    a = _finite("a", a)
    if n < 1:
        raise DomainError("n must be >= 1")
    if abs(a) < NEGLIGIBLE:
        return math.ldexp(1.0, n)
    return math.expm1(a) / math.expm1(math.ldexp(a, -n))


def _fractional_bits(delta) -> list[int]:
    if isinstance(delta, DigitVector):
        if delta.kind != "fractional":
            raise DomainError("expected a fractional DigitVector")
        if delta.bits.ndim != 1:
            raise DomainError("expected a single digit vector")
        return delta.bits.tolist()
    bits = [int(b) for b in delta]
    if not bits or any(b not in (0, 1) for b in bits):
        raise DomainError("digit block must be a non-empty sequence of 0/1")
    return bits


def _dyadic_left_end(bits: list[int]) -> float:
    # exact while depth <= 53
    m = 0
    for b in bits:
        m = (m << 1) | b
    return math.ldexp(m, -len(bits))


def digit_joint_closed(delta, a: float) -> float:
    """Joint probability of the digit block ``delta`` in closed form.

    The product of marginals is exp(a * sum_k delta_k 2^-k) over
    prod_k (1 + e^(a/2^k)); the denominator is replaced by its telescoped
    value (e^a - 1)/(e^(a/2^n) - 1).
    """
    bits = _fractional_bits(delta)
    a = _finite("a", a)
    n = len(bits)
    if abs(a) < NEGLIGIBLE:
        return math.ldexp(1.0, -n)
    weighted = math.fsum(math.ldexp(1.0, -k) for k, b in enumerate(bits, start=1) if b)
    return math.exp(a * weighted) / digit_partition_closed(a, n)


def digit_joint_integral(delta, a: float) -> float:
    """Mass that f_a puts on the dyadic interval [s, s + 2^-n) selected by ``delta``.

    Evaluated from the antiderivative e^(a x)/(e^a - 1) at the interval ends,
    factored as e^(a s) * expm1(a * width) / expm1(a) so the difference of two
    nearby exponentials never cancels.
    """
    bits = _fractional_bits(delta)
    a = _finite("a", a)
    lo = _dyadic_left_end(bits)
    hi = lo + math.ldexp(1.0, -len(bits))
    width = hi - lo
    if abs(a) < NEGLIGIBLE:
        return width
    return math.exp(a * lo) * math.expm1(a * width) / math.expm1(a)


def digit_joint_marginals(delta, a: float) -> float:
    """Product of :func:`digit_prob` marginals over the block ``delta``."""
    bits = _fractional_bits(delta)
    prod = 1.0
    for k, b in enumerate(bits, start=1):
        prod *= digit_prob(k, a)[b]
    return prod


def f_a(x, a: float):
    """Exponential density on [0, 1]: 1 for a = 0, a e^(a x)/(e^a - 1) otherwise."""
    a = _finite("a", a)
    x = _unit_interval(x)
    if abs(a) < NEGLIGIBLE:
        return _out(np.ones_like(x))
    if a > 0.0:
        # shifted so exp never overflows for large positive a
        return _out(a * np.exp(a * (x - 1.0)) / -math.expm1(-a))
    return _out(a * np.exp(a * x) / math.expm1(a))


def digit_of(x: float, k: int) -> int:
    """k-th binary digit of x in [0, 1), terminating expansion for dyadic rationals."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"digit position k must be an integer >= 1, got {k!r}")
    x = float(x)
    if not (0.0 <= x < 1.0):
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    return int(math.floor(math.ldexp(x, int(k)))) & 1


def digits_of(x, depth: int) -> np.ndarray:
    """Digits eps_1..eps_depth of every entry of ``x``, shape ``x.shape + (depth,)``."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    x = _unit_interval(x, closed=False)
    ks = np.arange(1, depth + 1)
    scaled = np.floor(np.ldexp(x[..., None], ks))
    return np.fmod(scaled, 2.0).astype(np.uint8)


def rademacher(x: float, k: int) -> int:
    """r_k(x) = 1 - 2 eps_k(x), i.e. sign(sin(2^k pi x)) off the dyadic grid."""
    return 1 - 2 * digit_of(x, k)
