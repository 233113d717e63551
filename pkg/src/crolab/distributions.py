"""Perturbation distributions: density evaluation and variate generation.

Four interchangeable laws drive the engine's neighborhood moves: gaussian,
cauchy, a mirrored (two-sided) exponential, and a shifted-and-mirrored
rayleigh.  One `scale` knob maps onto each law's natural parameter:

    gaussian     sigma = scale          (variance = scale^2)
    cauchy       gamma = scale          (half-width at half-maximum)
    exponential  rate  = 1 / scale      (so E|eps| = scale)
    rayleigh     sigma = scale          (mode of the one-sided density)

Sampling uses closed-form transforms with a fixed uniform budget per call
(gaussian 2, cauchy 1, exponential 2, rayleigh 2), which keeps streams
replayable and lets the compiled kernel consume the identical sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .rng import RandomSource

GAUSSIAN = "gaussian"
CAUCHY = "cauchy"
EXPONENTIAL = "exponential"
RAYLEIGH = "rayleigh"

KINDS = (GAUSSIAN, CAUCHY, EXPONENTIAL, RAYLEIGH)

# integer codes shared with the compiled kernel
KIND_CODES = {GAUSSIAN: 0, CAUCHY: 1, EXPONENTIAL: 2, RAYLEIGH: 3}

_TWO_PI = 2.0 * math.pi
_TINY_UNIFORM = 1.0 / 9007199254740992.0  # smallest nonzero 53-bit uniform


@dataclass(frozen=True)
class PerturbationSpec:
    """Distribution kind plus scale; the source of perturbation offsets.

    `location` is only meaningful for density evaluation of the gaussian and
    cauchy laws; perturbations are always zero-centered and the two mirrored
    laws are symmetric around 0 by construction.
    """

    kind: str
    scale: float
    location: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}; expected one of {KINDS}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.location != 0.0 and self.kind in (EXPONENTIAL, RAYLEIGH):
            raise ValueError(f"{self.kind} perturbations are defined with location 0")


def pdf_gaussian(x: float, mu: float, sigma2: float) -> float:
    """Normal density with mean mu and variance sigma2."""
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    d = x - mu
    return math.exp(-(d * d) / (2.0 * sigma2)) / math.sqrt(_TWO_PI * sigma2)


def pdf_cauchy(x: float, x0: float, gamma: float) -> float:
    """Cauchy density located at x0 with half-width-at-half-maximum gamma."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    d = x - x0
    return gamma / (math.pi * (d * d + gamma * gamma))


def pdf_exponential_mirrored(x: float, gamma: float) -> float:
    """Two-sided exponential density: rate-gamma decay reflected about 0.

    The one-sided exponential is halved and mirrored onto the negative axis
    so the result integrates to 1 over the whole real line.
    """
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 0.5 * gamma * math.exp(-gamma * abs(x))


def pdf_rayleigh(x: float, sigma2: float) -> float:
    """One-sided rayleigh density; zero for x < 0, peak at x = sqrt(sigma2)."""
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if x < 0.0:
        return 0.0
    return (x / sigma2) * math.exp(-(x * x) / (2.0 * sigma2))


def step(x: float, sigma: float) -> int:
    """Unit step: 1 when x >= sigma, else 0."""
    return 1 if x >= sigma else 0


def pdf_modified_rayleigh(x: float, sigma2: float) -> float:
    """Symmetric rayleigh density: left-shifted by sigma, mirrored, averaged.

    Both branches are kept in the indicator form so the evaluation is exactly
    even in x and each half integrates to 1/2.
    """
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    sigma = math.sqrt(sigma2)
    up = sigma + x
    dn = sigma - x
    left = (up / sigma2) * math.exp(-(up * up) / (2.0 * sigma2)) * step(x, -sigma)
    right = (dn / sigma2) * math.exp(-(dn * dn) / (2.0 * sigma2)) * (1 - step(x, sigma))
    return (left + right) / 2.0


def pdf(spec: PerturbationSpec, x: float) -> float:
    """Density of `spec` at x, with the engine's scale mapping applied."""
    if spec.kind == GAUSSIAN:
        return pdf_gaussian(x, spec.location, spec.scale * spec.scale)
    if spec.kind == CAUCHY:
        return pdf_cauchy(x, spec.location, spec.scale)
    if spec.kind == EXPONENTIAL:
        return pdf_exponential_mirrored(x, 1.0 / spec.scale)
    return pdf_modified_rayleigh(x, spec.scale * spec.scale)


def sample(spec: PerturbationSpec, rng: RandomSource) -> float:
    """Draw one perturbation offset distributed per `spec`.

    Uniform consumption is fixed per kind (see module docstring) and the
    arithmetic matches the compiled kernel expression by expression.
    """
    if spec.kind == GAUSSIAN:
        u1 = rng.uniform()
        u2 = rng.uniform()
        return spec.location + spec.scale * math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(_TWO_PI * u2)
    if spec.kind == CAUCHY:
        u = rng.uniform()
        if u == 0.0:
            u = _TINY_UNIFORM  # keep tan() off the -pi/2 pole
        return spec.location + spec.scale * math.tan(math.pi * (u - 0.5))
    if spec.kind == EXPONENTIAL:
        u1 = rng.uniform()
        u2 = rng.uniform()
        mag = -math.log(1.0 - u1) * spec.scale
        return mag if u2 < 0.5 else -mag
    # rayleigh: shift a one-sided variate left by sigma, then mirror at random
    u1 = rng.uniform()
    u2 = rng.uniform()
    y = spec.scale * math.sqrt(-2.0 * math.log(1.0 - u1)) - spec.scale
    return y if u2 < 0.5 else -y


def sample_many(spec: PerturbationSpec, n: int, seed: int) -> list[float]:
    """n variates from a fresh stream; the pure-Python audit surface."""
    rng = RandomSource(seed)
    return [sample(spec, rng) for _ in range(n)]
