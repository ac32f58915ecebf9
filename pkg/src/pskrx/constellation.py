"""M-ary PSK coherent-state constellation and per-duration partitioning.

Amplitudes are dimensionless complex numbers in photon-number units: the
squared magnitude of an amplitude is a mean photon number.  Splitting a
symbol interval into N equal durations divides the amplitude by sqrt(N),
so the per-duration energies sum back to the symbol energy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constellation:
    """Symmetric M-ary PSK constellation.

    Attributes:
        m_ary: number of symbols M (>= 2).
        alpha_mag: per-symbol amplitude magnitude |alpha| (>= 0); |alpha|^2
            is the mean photon number of one symbol.
        phase_offset: global phase rotation in radians applied to every
            symbol.  Adjacent symbols stay 2*pi/M apart, and all error
            probabilities are invariant under this rotation.
    """

    m_ary: int
    alpha_mag: float
    phase_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.m_ary < 2:
            raise ValueError(f"m_ary must be >= 2, got {self.m_ary}")
        if self.alpha_mag < 0:
            raise ValueError(f"alpha_mag must be >= 0, got {self.alpha_mag}")

    @classmethod
    def from_mean_photon(cls, m_ary: int, mean_photon: float,
                         phase_offset: float = 0.0) -> "Constellation":
        """Build a constellation from the symbol mean photon number |alpha|^2."""
        if mean_photon < 0:
            raise ValueError(f"mean_photon must be >= 0, got {mean_photon}")
        return cls(m_ary, math.sqrt(mean_photon), phase_offset)

    @property
    def mean_photon(self) -> float:
        """Mean photon number of one symbol, |alpha|^2."""
        return self.alpha_mag ** 2


@dataclass(frozen=True)
class PartitionedSymbol:
    """One symbol split into equal durations.

    Every duration of the symbol carries the same amplitude
    ``per_duration_amplitude`` with squared magnitude |alpha|^2 / N.
    """

    per_duration_amplitude: complex
    duration_count: int


def symbol_amplitude(c: Constellation, m: int) -> complex:
    """Amplitude of symbol m: |alpha| * exp(i*(phase_offset + 2*pi*m/M)).

    Raises:
        IndexError: if m is not in 0..M-1.
    """
    if not 0 <= m < c.m_ary:
        raise IndexError(f"symbol index {m} out of range for M={c.m_ary}")
    return c.alpha_mag * cmath.exp(1j * (c.phase_offset + TWO_PI * m / c.m_ary))


def partition(c: Constellation, m: int, n_partitions: int) -> PartitionedSymbol:
    """Split symbol m into n_partitions equal durations.

    The per-duration amplitude is the symbol amplitude divided by
    sqrt(n_partitions), so the duration energies sum to |alpha_m|^2.

    Raises:
        ValueError: if n_partitions < 1.
        IndexError: if m is not in 0..M-1.
    """
    if n_partitions < 1:
        raise ValueError(f"n_partitions must be >= 1, got {n_partitions}")
    amp = symbol_amplitude(c, m) / math.sqrt(n_partitions)
    return PartitionedSymbol(per_duration_amplitude=amp, duration_count=n_partitions)


def local_field(c: Constellation, hypothesis: int, n_partitions: int,
                tau: float) -> complex:
    """Displacement field that nulls the hypothesis symbol in one duration.

    Returns sqrt(tau) * symbol_amplitude(c, hypothesis) / sqrt(N).  With
    tau = 1 and hypothesis equal to the transmitted symbol, this exactly
    cancels the per-duration signal on the beam splitter.

    Raises:
        ValueError: if tau is outside [0, 1] or n_partitions < 1.
        IndexError: if hypothesis is not in 0..M-1.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if n_partitions < 1:
        raise ValueError(f"n_partitions must be >= 1, got {n_partitions}")
    return math.sqrt(tau) * symbol_amplitude(c, hypothesis) / math.sqrt(n_partitions)
