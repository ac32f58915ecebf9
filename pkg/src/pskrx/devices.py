"""Imperfect displacement and single-photon detector models.

The displacement beam splitter has transmittance tau and mode-match
factor xi (xi = 1 means the local field overlaps the signal mode
perfectly; the mismatched fraction 1 - xi adds powers instead of
interfering).  Detectors have quantum efficiency eta and a mean dark
count nu per duration, so every detection is Poissonian with mean
nu + eta * intensity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

# Inversion sampling is used below this mean; the exact Poisson quantile
# function takes over above it.  Both consume a single uniform draw.
POISSON_INVERSION_MEAN_MAX = 30.0


@dataclass(frozen=True)
class DeviceParams:
    """Receiver imperfection parameters.

    Attributes:
        eta: detector quantum efficiency in [0, 1].
        nu: mean dark counts per duration (>= 0).
        tau: beam-splitter transmittance in [0, 1].
        xi: mode-match factor in [0, 1]; 1 is perfect overlap.
    """

    eta: float = 1.0
    nu: float = 0.0
    tau: float = 1.0
    xi: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.nu < 0.0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must be in [0, 1], got {self.xi}")

    @classmethod
    def ideal(cls) -> "DeviceParams":
        return cls(eta=1.0, nu=0.0, tau=1.0, xi=1.0)


class DetectorKind(Enum):
    """Single-photon detector variants."""

    ONOFF = "onoff"
    PNRD = "pnrd"


def displaced_intensity(signal: complex, local: complex,
                        dev: DeviceParams) -> float:
    """Mean intensity after the displacement beam splitter, in photon units.

    The matched mode fraction xi interferes coherently,
    |sqrt(tau)*signal - local|^2, while the mismatched fraction adds the
    attenuated signal and local powers incoherently.
    """
    coherent = abs(math.sqrt(dev.tau) * signal - local) ** 2
    incoherent = dev.tau * abs(signal) ** 2 + abs(local) ** 2
    return (1.0 - dev.xi) * incoherent + dev.xi * coherent


def detection_mean(intensity: float, dev: DeviceParams) -> float:
    """Poisson mean seen by the detector: nu + eta * intensity."""
    return dev.nu + dev.eta * intensity


def pnrd_likelihood(intensity: float, n: int, dev: DeviceParams) -> float:
    """Probability that a photon-number-resolving detector reports n counts.

    Poisson with mean nu + eta*intensity, evaluated in the log domain so
    large counts cannot overflow the factorial.  A zero mean gives exactly
    1 for n = 0 and exactly 0 otherwise.
    """
    if n < 0:
        raise ValueError(f"count must be >= 0, got {n}")
    mean = detection_mean(intensity, dev)
    if mean == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mean + n * math.log(mean) - math.lgamma(n + 1))


def onoff_likelihood(intensity: float, outcome: int, dev: DeviceParams) -> float:
    """Probability of an on-off detector outcome (0 = off, nonzero = on).

    Off is the Poisson zero-count probability exp(-nu - eta*intensity);
    on is its complement.
    """
    p_off = math.exp(-detection_mean(intensity, dev))
    return p_off if outcome == 0 else 1.0 - p_off


def poisson_from_uniform(mean: float, u: float) -> int:
    """Poisson quantile: smallest n whose CDF reaches u.

    Sequential inversion below POISSON_INVERSION_MEAN_MAX, exact quantile
    function above it.  Feeding u ~ U[0, 1) yields a Poisson(mean) draw.
    """
    if mean <= 0.0:
        return 0
    if mean >= POISSON_INVERSION_MEAN_MAX:
        return int(stats.poisson.ppf(u, mean))
    p = math.exp(-mean)
    cdf = p
    n = 0
    while u > cdf:
        n += 1
        p *= mean / n
        cdf += p
        if p == 0.0:  # exhausted representable tail mass
            break
    return n


def poisson_counts_from_uniforms(means: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Vectorized form of poisson_from_uniform for equal-shaped arrays."""
    means = np.asarray(means, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    counts = np.zeros(means.shape, dtype=np.int64)
    small = means < POISSON_INVERSION_MEAN_MAX
    if np.any(small):
        m = means[small]
        uu = u[small]
        p = np.exp(-m)
        cdf = p.copy()
        n = np.zeros(m.shape, dtype=np.int64)
        active = uu > cdf
        while np.any(active):
            n[active] += 1
            p = np.where(active, p * m / np.maximum(n, 1), p)
            cdf = np.where(active, cdf + p, cdf)
            active = active & (uu > cdf) & (p > 0.0)
        counts[small] = n
    large = ~small
    if np.any(large):
        counts[large] = stats.poisson.ppf(u[large], means[large]).astype(np.int64)
    return counts


def sample_outcome(intensity: float, kind: DetectorKind, dev: DeviceParams,
                   rng) -> int:
    """Draw one detection outcome for the given intensity.

    PNRD returns a Poisson(nu + eta*intensity) count; on-off returns 1
    with the on probability and 0 otherwise.  Exactly one uniform is
    consumed from rng per call, so counter-based streams replay exactly.
    """
    mean = detection_mean(intensity, dev)
    u = rng.random()
    if kind is DetectorKind.ONOFF:
        return 1 if u > math.exp(-mean) else 0
    return poisson_from_uniform(mean, u)
