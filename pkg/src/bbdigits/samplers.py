"""Seeded Monte Carlo realizations of the mode energy and its digits.

Three independent routes produce the fractional part ``zeta``:

* ``amplitude``: two Gaussian field quadratures, energy = squared modulus;
* ``direct``: inverse-transform exponential for ``eta`` (or truncated
  exponential for ``zeta`` alone);
* ``digits``: independent Bernoulli digits eps_k with the thermal marginals,
  summed with weights 2**-k.

Every sampler takes an :class:`RngStream` and an optional ``size``. With
``size=None`` one draw is returned as Python scalars, otherwise numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .distributions import (
    DigitVector,
    DomainError,
    binary_photon_prob,
    digit_prob,
)

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_DEPTH",
    "DEFAULT_MAX_LEVEL",
    "ROUTES",
    "RngStream",
    "EnergySample",
    "split_energy",
    "eta_from_amplitudes",
    "eta_from_uniform",
    "zeta_from_uniform",
    "sample_eta_via_amplitudes",
    "sample_eta_direct",
    "sample_xi_geometric",
    "sample_zeta_truncexp",
    "sample_zeta_via_digits",
    "sample_xi_via_binary_photons",
    "sample_zeta",
    "reconstruct_zeta",
    "reconstruct_xi",
    "reconstruct_eta",
    "zero_point_bits",
    "zero_point_uniform",
]

DEFAULT_SEED = 424242
DEFAULT_DEPTH = 53
DEFAULT_MAX_LEVEL = 62
ROUTES = ("amplitude", "direct", "digits")

_MANTISSA = 53
_ONE_MINUS = math.nextafter(1.0, 0.0)
_TWO_PI = 2.0 * math.pi


class RngStream:
    """A single-owner, reproducible random stream.

    Backed by numpy's PCG64 seeded through a ``SeedSequence``; Gaussians come
    from numpy's ziggurat sampler. ``split`` derives child streams whose
    spawn keys are recorded so any child can be rebuilt from metadata alone.
    Not safe to share between threads; split instead.
    """

    algorithm = "numpy-PCG64/SeedSequence/ziggurat-normal"

    def __init__(self, seed: int = DEFAULT_SEED, spawn_key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.spawn_key = tuple(int(k) for k in spawn_key)
        self._seq = np.random.SeedSequence(seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(self._seq))
        self.position = 0

    def __repr__(self):
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key}, position={self.position})"

    def split(self, n: int) -> list["RngStream"]:
        children = self._seq.spawn(n)
        return [RngStream(self.seed, child.spawn_key) for child in children]

    def describe(self) -> dict:
        return {
            "seed": self.seed,
            "spawn_key": list(self.spawn_key),
            "algorithm": self.algorithm,
            "position": self.position,
        }

    def _count(self, size) -> None:
        self.position += 1 if size is None else int(np.prod(size))

    def uniform(self, size=None):
        """Uniform on [0, 1), multiples of 2**-53."""
        self._count(size)
        return self._gen.random(size)

    def uniform_positive(self, size=None):
        """Uniform on (0, 1]; safe to feed into -log."""
        return 1.0 - self.uniform(size)

    def normal(self, size=None):
        self._count(size)
        return self._gen.standard_normal(size)

    def raw_bytes(self, n: int) -> bytes:
        self.position += n
        return self._gen.bytes(n)


@dataclass
class EnergySample:
    """One realization (or a batch) of the scaled mode energy.

    ``xi`` and ``zeta`` are derived from ``eta`` by :func:`split_energy`, so
    ``eta == xi + zeta`` holds exactly in floating point.
    """

    eta: object
    xi: object
    zeta: object
    route: str
    theta: object = None

    @classmethod
    def from_eta(cls, eta, route: str, theta=None) -> "EnergySample":
        xi, zeta = split_energy(eta)
        if np.ndim(eta) == 0:
            eta = float(eta)
            theta = None if theta is None else float(theta)
        return cls(eta=eta, xi=xi, zeta=zeta, route=route, theta=theta)

    def __len__(self):
        return 1 if np.ndim(self.eta) == 0 else len(self.eta)

    def rows(self) -> Iterator[dict]:
        eta = np.atleast_1d(self.eta)
        xi = np.atleast_1d(self.xi)
        zeta = np.atleast_1d(self.zeta)
        theta = None if self.theta is None else np.atleast_1d(self.theta)
        for i in range(len(eta)):
            row = {"eta": float(eta[i]), "xi": int(xi[i]), "zeta": float(zeta[i])}
            if theta is not None:
                row["theta"] = float(theta[i])
            row["route"] = self.route
            yield row


def _check_beta(beta: float, allow_zero: bool = False) -> float:
    beta = float(beta)
    ok = beta >= 0.0 if allow_zero else beta > 0.0
    if not (math.isfinite(beta) and ok):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"beta must be finite and {bound}, got {beta!r}")
    return beta


def split_energy(eta):
    """Integer and fractional parts of a non-negative energy.

    ``eta - floor(eta)`` is exact in binary floating point, so the split
    loses nothing.
    """
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(eta_arr < 0.0) or not np.all(np.isfinite(eta_arr)):
        raise DomainError("energy must be finite and >= 0")
    whole = np.floor(eta_arr)
    if np.any(whole >= 2.0**63):
        raise DomainError("integer part does not fit a signed 64-bit integer")
    frac = eta_arr - whole
    if eta_arr.ndim == 0:
        return int(whole), float(frac)
    return whole.astype(np.int64), frac


def eta_from_amplitudes(x, y, beta: float):
    """Energy and phase from two standard normal quadratures.

    eta = (x^2 + y^2) / (2 beta) is exponential with mean 1/beta;
    theta = arg(x + iy) is folded into [0, 2pi).
    """
    beta = _check_beta(beta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eta = (x * x + y * y) / (2.0 * beta)
    theta = np.mod(np.arctan2(y, x), _TWO_PI)
    theta = np.where(theta >= _TWO_PI, 0.0, theta)
    if eta.ndim == 0:
        return float(eta), float(theta)
    return eta, theta


def eta_from_uniform(u, beta: float):
    """Inverse exponential CDF, -ln(u)/beta for u in (0, 1]."""
    beta = _check_beta(beta)
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u > 1.0)):
        raise DomainError("u must lie in (0, 1]")
    eta = -np.log(u) / beta + 0.0  # + 0.0 turns -0.0 into 0.0
    return float(eta) if eta.ndim == 0 else eta


def zeta_from_uniform(u, beta: float):
    """Inverse truncated-exponential CDF on [0, 1); u in [0, 1), beta = 0 is uniform."""
    beta = _check_beta(beta, allow_zero=True)
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)):
        raise DomainError("u must lie in [0, 1)")
    if beta == 0.0:
        z = u.copy()
    else:
        z = -np.log1p(u * math.expm1(-beta)) / beta + 0.0
        # rounding near u -> 1 may land exactly on 1
        z = np.minimum(z, _ONE_MINUS)
    return float(z) if z.ndim == 0 else z


def sample_eta_via_amplitudes(rng: RngStream, beta: float, size=None) -> EnergySample:
    beta = _check_beta(beta)
    x = rng.normal(size)
    y = rng.normal(size)
    eta, theta = eta_from_amplitudes(x, y, beta)
    return EnergySample.from_eta(eta, "amplitude", theta)


def sample_eta_direct(rng: RngStream, beta: float, size=None) -> EnergySample:
    beta = _check_beta(beta)
    eta = eta_from_uniform(rng.uniform_positive(size), beta)
    return EnergySample.from_eta(eta, "direct")


def sample_xi_geometric(rng: RngStream, beta: float, size=None):
    """Photon number as the floor of an exponential; exactly Planck-Bose."""
    beta = _check_beta(beta)
    xi, _ = split_energy(eta_from_uniform(rng.uniform_positive(size), beta))
    return xi


def sample_zeta_truncexp(rng: RngStream, beta: float, size=None):
    beta = _check_beta(beta, allow_zero=True)
    return zeta_from_uniform(rng.uniform(size), beta)


def sample_zeta_via_digits(rng: RngStream, beta: float, depth: int = DEFAULT_DEPTH, size=None):
    """Draw eps_1..eps_depth independently and sum them with weights 2**-k.

    Returns ``(value, DigitVector)``. Digit k is 1 with probability
    ``digit_prob(k, -beta)[1]``. Above 53 digits the value is truncated to
    the 2**-53 grid (see :func:`reconstruct_zeta`).
    """
    beta = _check_beta(beta, allow_zero=True)
    if isinstance(depth, bool) or int(depth) != depth or not 1 <= depth <= 64:
        raise DomainError(f"depth must be an integer in [1, 64], got {depth!r}")
    n = 1 if size is None else int(size)
    depth = int(depth)
    p1 = np.array([digit_prob(k, -beta)[1] for k in range(1, depth + 1)])
    # one block of n uniforms per position, in order k = 1..depth
    block = (rng.uniform((depth, n)) < p1[:, None]).view(np.uint8)
    used = min(depth, _MANTISSA)
    value = np.ldexp(1.0, -np.arange(1, used + 1)) @ block[:used]  # exact, see reconstruct_zeta
    if size is None:
        return float(value[0]), DigitVector(block[:, 0], "fractional")
    return value, DigitVector(block.T, "fractional")


def sample_xi_via_binary_photons(
    rng: RngStream, beta: float, max_level: int = DEFAULT_MAX_LEVEL, size=None
):
    """Photon number as a sum of independent binary photons mu_s * 2**s, s = 0..max_level.

    Levels whose occupation probability saturates to exactly 0 are filled with
    zeros without consuming random numbers. Returns ``(xi, DigitVector)``.
    The law differs from Planck-Bose by at most sum_{s > max_level} P(mu_s = 1).
    """
    beta = _check_beta(beta)
    if isinstance(max_level, bool) or int(max_level) != max_level or not 0 <= max_level <= 62:
        raise DomainError(f"max_level must be an integer in [0, 62], got {max_level!r}")
    n = 1 if size is None else int(size)
    bits = np.zeros((n, int(max_level) + 1), dtype=np.uint8)
    for s in range(int(max_level) + 1):
        p1 = binary_photon_prob(s, beta)[1]
        if p1 == 0.0:
            break  # decreasing in s, so every later level is 0 too
        bits[:, s] = rng.uniform(n) < p1
    digits = DigitVector(bits[0] if size is None else bits, "integer")
    return reconstruct_xi(digits), digits


def sample_zeta(rng: RngStream, beta: float, route: str, size=None, depth: int = DEFAULT_DEPTH):
    """Fractional part along one of :data:`ROUTES`."""
    if route == "amplitude":
        return sample_eta_via_amplitudes(rng, beta, size).zeta
    if route == "direct":
        return sample_eta_direct(rng, beta, size).zeta
    if route == "digits":
        return sample_zeta_via_digits(rng, beta, depth, size)[0]
    raise DomainError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")


def _as_bits(digits: DigitVector, kind: str) -> np.ndarray:
    if not isinstance(digits, DigitVector):
        digits = DigitVector(np.asarray(digits), kind)
    if digits.kind != kind:
        raise DomainError(f"expected a {kind} DigitVector, got {digits.kind}")
    return digits.bits


def reconstruct_zeta(digits: DigitVector):
    """sum_k eps_k 2**-k, accumulated as an integer and scaled exactly.

    Exact for depth <= 53. Deeper expansions are truncated toward zero onto
    the 2**-53 grid, which keeps the value strictly below 1.
    """
    bits = _as_bits(digits, "fractional")
    depth = bits.shape[-1]
    used = min(depth, _MANTISSA)
    # Every partial sum is a multiple of 2**-53 below 1, hence representable:
    # the dot product is exact whatever order the BLAS adds in.
    weights = np.ldexp(1.0, -np.arange(1, used + 1))
    value = bits[..., :used] @ weights
    return float(value) if value.ndim == 0 else value


def reconstruct_xi(digits: DigitVector):
    """sum_s mu_s 2**s for an integer-kind digit block (at most 63 levels)."""
    bits = _as_bits(digits, "integer")
    depth = bits.shape[-1]
    if depth > 63:
        raise DomainError("integer digit blocks are limited to 63 levels")
    m = np.zeros(bits.shape[:-1], dtype=np.int64)
    for s in range(depth):
        m |= bits[..., s].astype(np.int64) << np.int64(s)
    return int(m) if m.ndim == 0 else m


def reconstruct_eta(int_digits: DigitVector, frac_digits: DigitVector, exact: bool = False):
    """Bidirectional sum over lambda_r 2**r: integer digits r >= 0, fractional r < 0.

    With ``exact=True`` (single vectors only) the result is a ``Fraction``
    with no rounding; otherwise the float sum ``xi + zeta``.
    """
    xi = reconstruct_xi(int_digits)
    if exact:
        frac_bits = _as_bits(frac_digits, "fractional")
        if frac_bits.ndim != 1:
            raise DomainError("exact reconstruction takes single digit vectors")
        num = 0
        for b in frac_bits:
            num = (num << 1) | int(b)
        return Fraction(int(xi)) + Fraction(num, 1 << len(frac_bits))
    return xi + reconstruct_zeta(frac_digits)


def zero_point_bits(rng: RngStream, count: int) -> np.ndarray:
    """``count`` independent fair bits (the a = 0 digit law), as uint8."""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    raw = np.frombuffer(rng.raw_bytes((count + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw)[:count]


def zero_point_uniform(rng: RngStream, size: Optional[int] = None):
    """Uniform variate on [0, 1) assembled from 53 fair bits."""
    n = 1 if size is None else int(size)
    bits = zero_point_bits(rng, _MANTISSA * n).reshape(n, _MANTISSA)
    value = reconstruct_zeta(DigitVector(bits[0] if size is None else bits, "fractional"))
    return value
