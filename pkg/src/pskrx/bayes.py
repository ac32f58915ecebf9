"""Posterior tracking over transmitted-symbol hypotheses with MAP selection.

Posteriors are stored in the linear domain.  An update switches to the log
domain whenever a likelihood is small enough to underflow the linear
product, so long measurement sequences stay normalizable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this likelihood the linear-domain product risks underflow and the
# update reroutes through log space.
LOG_DOMAIN_THRESHOLD = 1e-280


class DegenerateEvidenceError(ValueError):
    """Every hypothesis was assigned exactly zero posterior weight."""


@dataclass(frozen=True)
class PosteriorState:
    """Probability vector over the M transmitted-symbol hypotheses."""

    probs: tuple[float, ...]

    @property
    def m_ary(self) -> int:
        return len(self.probs)


def initial_prior(m_ary: int, priors=None) -> PosteriorState:
    """Starting posterior: uniform, or a normalized copy of `priors`.

    Any nonnegative vector with positive finite sum is accepted and
    normalized.

    Raises:
        ValueError: on negative entries, wrong length, or a vector that
            cannot be normalized.
    """
    if m_ary < 2:
        raise ValueError(f"m_ary must be >= 2, got {m_ary}")
    if priors is None:
        return PosteriorState(probs=(1.0 / m_ary,) * m_ary)
    p = np.asarray(priors, dtype=np.float64)
    if p.shape != (m_ary,):
        raise ValueError(f"priors must have length {m_ary}, got shape {p.shape}")
    if np.any(p < 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("priors must be nonnegative and finite")
    total = p.sum()
    if total <= 0.0:
        raise ValueError("priors sum to zero; cannot normalize")
    return PosteriorState(probs=tuple(p / total))


def update(state: PosteriorState, likelihoods) -> PosteriorState:
    """Bayes step: posterior[m] proportional to prior[m] * likelihood[m].

    The output is invariant under scaling all likelihoods by a positive
    constant.  Likelihoods below LOG_DOMAIN_THRESHOLD trigger a log-domain
    evaluation with log-sum-exp normalization.

    Raises:
        DegenerateEvidenceError: if every prior*likelihood product is
            exactly zero, which only happens for genuinely impossible
            evidence (not underflow).
        ValueError: on negative likelihoods or a length mismatch.
    """
    lik = np.asarray(likelihoods, dtype=np.float64)
    prior = np.asarray(state.probs)
    if lik.shape != prior.shape:
        raise ValueError(f"likelihoods must have length {prior.size}")
    if np.any(lik < 0.0):
        raise ValueError("likelihoods must be nonnegative")

    if np.all(lik >= LOG_DOMAIN_THRESHOLD):
        post = prior * lik
        total = post.sum()
        if total > 0.0:
            return PosteriorState(probs=tuple(post / total))

    # Log-domain path: survives likelihood underflow; true zeros map to -inf.
    with np.errstate(divide="ignore"):
        log_post = np.log(prior) + np.log(lik)
    peak = log_post.max()
    if peak == -np.inf:
        raise DegenerateEvidenceError(
            "all prior*likelihood products are exactly zero")
    w = np.exp(log_post - peak)
    return PosteriorState(probs=tuple(w / w.sum()))


def map_hypothesis(state: PosteriorState) -> int:
    """Index of the most probable hypothesis; ties go to the lowest index."""
    return int(np.argmax(state.probs))
