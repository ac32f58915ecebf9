"""Adaptive displace-and-count receiver: single trials and exact evaluation.

One symbol interval is split into N equal durations.  Each duration the
receiver displaces the incoming field by the nulling field of its current
hypothesis, counts photons, and refines a Bayesian posterior over all M
symbols; the first duration always nulls symbol 0, every later duration
nulls the current MAP hypothesis, and the final MAP hypothesis is the
decision.

Because every duration carries the same per-duration amplitudes, the
intensity seen by the detector depends only on (transmitted symbol,
hypothesis), and both the simulator and the exact enumerator work from one
precomputed M x M intensity table per model.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bayes import (DegenerateEvidenceError, initial_prior, map_hypothesis,
                    update)
from .constellation import Constellation, local_field, partition
from .devices import (DetectorKind, DeviceParams, displaced_intensity,
                      onoff_likelihood, pnrd_likelihood, sample_outcome)

# Hard cap on enumerated outcome sequences in exact_error_probability.
MAX_ENUMERATION_BRANCHES = 10_000_000


class EnumerationTooLargeError(ValueError):
    """The exact evaluator would visit more branches than the cap allows."""

    def __init__(self, branch_count: int, limit: int = MAX_ENUMERATION_BRANCHES):
        self.branch_count = branch_count
        super().__init__(
            f"exact enumeration needs {branch_count} branches, "
            f"limit is {limit}")


@dataclass(frozen=True)
class ReceiverConfig:
    """Full description of one receiver instance.

    Attributes:
        constellation: the M-ary PSK alphabet.
        n_partitions: number of equal durations N per symbol (>= 1).
        device: physical beam-splitter and detector parameters.
        detector: on-off or photon-number-resolving detector.
        priors: optional symbol prior; None means uniform.  Used both as
            the receiver's initial posterior and as the transmitted-symbol
            weights of the exact evaluator.
        pnrd_count_cutoff: per-duration count ceiling for the exact PNRD
            enumeration; None picks mean + 10*sqrt(mean) + 10.
        inference_device: device model the receiver believes in when
            computing likelihoods and choosing nulling fields.  None means
            matched to `device`.
        transmit_phase: extra phase (radians) on the transmitted field
            only, unknown to the receiver.  Zero for a calibrated link.
    """

    constellation: Constellation
    n_partitions: int
    device: DeviceParams
    detector: DetectorKind
    priors: tuple[float, ...] | None = None
    pnrd_count_cutoff: int | None = None
    inference_device: DeviceParams | None = None
    transmit_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.n_partitions < 1:
            raise ValueError(
                f"n_partitions must be >= 1, got {self.n_partitions}")
        if self.pnrd_count_cutoff is not None and self.pnrd_count_cutoff < 1:
            raise ValueError(
                f"pnrd_count_cutoff must be >= 1, got {self.pnrd_count_cutoff}")
        if self.priors is not None:
            initial_prior(self.constellation.m_ary, self.priors)  # validates

    @property
    def m_ary(self) -> int:
        return self.constellation.m_ary

    def inference_params(self) -> DeviceParams:
        return self.inference_device if self.inference_device is not None else self.device


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one simulated symbol transmission.

    `hypotheses[j]` is the nulling hypothesis the receiver applied during
    duration j; it is a deterministic function of `outcomes[:j]`, which is
    what makes the feedback causal and replayable.
    """

    transmitted: int
    outcomes: tuple[int, ...]
    hypotheses: tuple[int, ...]
    decided: int
    correct: bool


class DurationModel:
    """Per-duration intensity tables for one receiver configuration.

    phys_intensity[m, h]: beam-splitter output intensity when symbol m was
        actually sent and the receiver nulls hypothesis h.
    infer_intensity[l, h]: intensity the receiver's own model assigns to
        hypothesis l under the same nulling field.  Equals phys_intensity
        when the inference model is matched and transmit_phase is zero.

    All N durations share these tables because each duration carries the
    same amplitudes.
    """

    def __init__(self, cfg: ReceiverConfig):
        c = cfg.constellation
        m_ary = c.m_ary
        n = cfg.n_partitions
        dev = cfg.device
        idev = cfg.inference_params()

        # The receiver *sets* the nulling field using its own model's tau.
        locals_ = [local_field(c, h, n, idev.tau) for h in range(m_ary)]
        nominal = [partition(c, m, n).per_duration_amplitude for m in range(m_ary)]
        rot = cmath.exp(1j * cfg.transmit_phase)

        self.cfg = cfg
        self.phys_intensity = np.array(
            [[displaced_intensity(nominal[m] * rot, locals_[h], dev)
              for h in range(m_ary)] for m in range(m_ary)])
        self.infer_intensity = np.array(
            [[displaced_intensity(nominal[l], locals_[h], idev)
              for h in range(m_ary)] for l in range(m_ary)])
        self.phys_mean = dev.nu + dev.eta * self.phys_intensity
        self.infer_mean = idev.nu + idev.eta * self.infer_intensity


def run_trial(cfg: ReceiverConfig, transmitted: int, rng) -> TrialRecord:
    """Simulate one full adaptive-receiver symbol.

    Duration j uses the nulling field of hypothesis 0 (j = 1) or of the
    MAP hypothesis of the previous posterior (j > 1), samples a detector
    outcome at the physical intensity, and updates the posterior with the
    receiver-model likelihood of that outcome under every hypothesis.

    Args:
        cfg: receiver configuration.
        transmitted: index of the symbol actually sent.
        rng: random stream with a `random()` method (numpy Generator or a
            counter-based trial stream); exactly one uniform is consumed
            per duration.

    Raises:
        DegenerateEvidenceError: if an outcome is impossible under every
            hypothesis of the receiver's model (requires a mismatched
            inference model).
    """
    m_ary = cfg.m_ary
    if not 0 <= transmitted < m_ary:
        raise IndexError(f"transmitted symbol {transmitted} out of range")
    model = DurationModel(cfg)
    idev = cfg.inference_params()

    state = initial_prior(m_ary, cfg.priors)
    hypothesis = 0
    outcomes: list[int] = []
    hypotheses: list[int] = []
    for _ in range(cfg.n_partitions):
        hypotheses.append(hypothesis)
        outcome = sample_outcome(
            model.phys_intensity[transmitted, hypothesis], cfg.detector,
            cfg.device, rng)
        outcomes.append(outcome)
        state = update(state, _likelihood_vector(model, idev, cfg.detector,
                                                 hypothesis, outcome))
        hypothesis = map_hypothesis(state)

    decided = map_hypothesis(state)
    return TrialRecord(transmitted=transmitted, outcomes=tuple(outcomes),
                       hypotheses=tuple(hypotheses), decided=decided,
                       correct=decided == transmitted)


def _likelihood_vector(model: DurationModel, idev: DeviceParams,
                       detector: DetectorKind, hypothesis: int,
                       outcome: int) -> list[float]:
    """Receiver-model likelihood of `outcome` under each symbol hypothesis."""
    if detector is DetectorKind.ONOFF:
        return [onoff_likelihood(model.infer_intensity[l, hypothesis], outcome, idev)
                for l in range(model.cfg.m_ary)]
    return [pnrd_likelihood(model.infer_intensity[l, hypothesis], outcome, idev)
            for l in range(model.cfg.m_ary)]


@dataclass(frozen=True)
class ExactResult:
    """Exact (enumerated) error probability with truncation accounting.

    For on-off detectors the enumeration is exhaustive and
    `p_error == p_error_upper`.  For PNRDs, counts above the per-duration
    cutoff are not enumerated; their total probability mass is the width
    of the [p_error, p_error_upper] interval.
    """

    p_error: float
    p_error_upper: float
    branch_count: int
    per_symbol_error: tuple[float, ...]
    per_symbol_mass: tuple[float, ...]

    @property
    def truncated_mass(self) -> float:
        return self.p_error_upper - self.p_error


def exact_error(cfg: ReceiverConfig) -> ExactResult:
    """Enumerate every outcome sequence and sum exact error-path weights.

    Walks the full outcome tree once; the receiver's posterior trajectory
    depends only on outcomes, so one walk serves all transmitted symbols
    and the path probability is carried as a length-M vector.  Transmitted
    symbols are weighted by cfg.priors (uniform when None).

    Raises:
        EnumerationTooLargeError: if branches exceed the cap (2^N for
            on-off, (cutoff+1)^N for PNRD).
    """
    m_ary = cfg.m_ary
    n = cfg.n_partitions
    model = DurationModel(cfg)

    if cfg.detector is DetectorKind.ONOFF:
        n_outcomes = 2
    else:
        cutoff = cfg.pnrd_count_cutoff
        if cutoff is None:
            top = float(model.phys_mean.max())
            cutoff = math.ceil(top + 10.0 * math.sqrt(top) + 10.0)
        n_outcomes = cutoff + 1
    branch_count = n_outcomes ** n
    if branch_count > MAX_ENUMERATION_BRANCHES:
        raise EnumerationTooLargeError(branch_count)

    # lik_phys[h][k, m]: probability of outcome k when symbol m was sent
    # and hypothesis h was nulled; lik_infer is the receiver-model analog.
    lik_phys = _outcome_tables(model.phys_mean, n_outcomes)
    lik_infer = _outcome_tables(model.infer_mean, n_outcomes)

    prior = np.asarray(initial_prior(m_ary, cfg.priors).probs)
    err = np.zeros(m_ary)
    mass = np.zeros(m_ary)

    def walk(depth: int, posterior: np.ndarray, pathprob: np.ndarray) -> None:
        if depth == n:
            d = int(np.argmax(posterior))
            mass += pathprob
            err_here = pathprob.copy()
            err_here[d] = 0.0
            err += err_here
            return
        # First duration always nulls symbol 0, later ones the current MAP.
        h = 0 if depth == 0 else int(np.argmax(posterior))
        phys = lik_phys[h]
        infer = lik_infer[h]
        for k in range(n_outcomes):
            branch_prob = pathprob * phys[k]
            if not branch_prob.any():
                continue  # physically impossible prefix, prune
            post = posterior * infer[k]
            total = post.sum()
            if total == 0.0:
                raise DegenerateEvidenceError(
                    f"outcome {k} in duration {depth + 1} is impossible "
                    "under every hypothesis of the receiver model")
            walk(depth + 1, post / total, branch_prob)

    walk(0, prior.copy(), np.ones(m_ary))

    per_err = err
    p_error = float(np.dot(prior, per_err))
    p_upper = p_error + float(np.dot(prior, 1.0 - mass))
    return ExactResult(p_error=p_error,
                       p_error_upper=min(1.0, p_upper),
                       branch_count=branch_count,
                       per_symbol_error=tuple(per_err),
                       per_symbol_mass=tuple(mass))


def exact_error_probability(cfg: ReceiverConfig) -> float:
    """Exact average symbol-error probability (see exact_error)."""
    return exact_error(cfg).p_error


def _outcome_tables(mean: np.ndarray, n_outcomes: int) -> np.ndarray:
    """Stack of outcome-likelihood tables, one (n_outcomes, M) slab per h.

    For two outcomes these are the off/on probabilities; otherwise
    Poisson probabilities for counts 0..n_outcomes-1.
    """
    m_ary = mean.shape[0]
    tables = np.empty((m_ary, n_outcomes, m_ary))
    if n_outcomes == 2:
        p_off = np.exp(-mean)  # [m, h]
        for h in range(m_ary):
            tables[h, 0, :] = p_off[:, h]
            tables[h, 1, :] = 1.0 - p_off[:, h]
        return tables
    counts = np.arange(n_outcomes)
    log_fact = np.array([math.lgamma(k + 1) for k in counts])
    for h in range(m_ary):
        mu = mean[:, h]  # length M over source symbols
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = (-mu[None, :] + counts[:, None] * np.log(mu[None, :])
                     - log_fact[:, None])
        table = np.exp(log_p)
        zero = mu == 0.0
        if np.any(zero):
            table[:, zero] = 0.0
            table[0, zero] = 1.0
        tables[h] = table
    return tables
