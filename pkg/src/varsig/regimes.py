"""Discrete-regime Bayes filter with Markov switching.

The hidden state takes one of finitely many values, each with its own noise
variance ``f(a*_i)``. Filtering alternates a transition step (``regime_predict``)
with a Bayes step on the observed signal (``regime_update``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import as_variance_function
from .errors import DomainError, ZeroEvidence

__all__ = [
    "DiscreteBelief",
    "RegimeModel",
    "regime_update",
    "regime_predict",
    "regime_filter_run",
    "simulate_regimes",
    "most_probable",
]

SIMPLEX_TOL = 1e-12


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _check_states(states: np.ndarray):
    if np.any(np.diff(states) <= 0):
        raise DomainError("states must be strictly increasing")


@dataclass(frozen=True, eq=False)
class DiscreteBelief:
    states: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        states = _frozen(self.states, "states")
        probs = _frozen(self.probs, "probs")
        _check_states(states)
        if probs.shape != states.shape:
            raise DomainError("states and probs differ in length")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"probs must be nonnegative and sum to 1, got sum {probs.sum()!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, states: Sequence[float]) -> "DiscreteBelief":
        n = len(states)
        return cls(states, np.full(n, 1.0 / n))

    @classmethod
    def from_weights(cls, states: Sequence[float], weights: Sequence[float]) -> "DiscreteBelief":
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or not w.sum() > 0:
            raise DomainError("weights must be nonnegative with a positive sum")
        return cls(states, w / w.sum())

    def most_probable(self) -> int:
        return most_probable(self)


@dataclass(frozen=True, eq=False)
class RegimeModel:
    """Regime values, their noise variances and a row-stochastic transition matrix."""

    states: np.ndarray
    variances: np.ndarray
    transition: np.ndarray

    def __post_init__(self):
        states = _frozen(self.states, "states")
        _check_states(states)
        variances = _frozen(self.variances, "variances")
        if variances.shape != states.shape:
            raise DomainError("states and variances differ in length")
        if np.any(variances < 0):
            raise DomainError("variances must be >= 0")
        P = np.array(self.transition, dtype=float)
        n = states.size
        if P.shape != (n, n):
            raise DomainError(f"transition must be {n}x{n}, got shape {P.shape}")
        if np.any(P < 0) or not np.all(np.isfinite(P)):
            raise DomainError("transition entries must be finite and >= 0")
        rows = P.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > SIMPLEX_TOL):
            raise DomainError(f"transition rows must sum to 1, got {rows.tolist()}")
        P.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "variances", variances)
        object.__setattr__(self, "transition", P)

    @classmethod
    def from_function(cls, states: Sequence[float], f, transition) -> "RegimeModel":
        f = as_variance_function(f)
        return cls(states, f.evaluate(np.asarray(states, dtype=float)), transition)

    @classmethod
    def persistent(cls, states: Sequence[float], variances: Sequence[float], stay: float) -> "RegimeModel":
        """Model that stays put with probability ``stay`` and otherwise moves uniformly."""
        n = len(states)
        if n < 2:
            return cls(states, variances, np.ones((1, 1)))
        P = np.full((n, n), (1.0 - stay) / (n - 1))
        np.fill_diagonal(P, stay)
        return cls(states, variances, P)


def _same_states(belief: DiscreteBelief, model: RegimeModel):
    if belief.states.shape != model.states.shape or np.any(belief.states != model.states):
        raise DomainError("belief and model disagree on the regime values")


def regime_update(prior: DiscreteBelief, s: float, model: RegimeModel) -> DiscreteBelief:
    """Bayes step: reweight regimes by the normal likelihood of ``s``.

    A zero-variance regime has a point-mass likelihood at its value. If ``s``
    hits such a value exactly, the matching zero-variance regimes take all of
    the posterior mass (the vanishing-variance limit).
    """
    _same_states(prior, model)
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"signal must be finite, got {s!r}")
    v = model.variances
    zero = v == 0
    exact = zero & (model.states == s) & (prior.probs > 0)
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.probs)
    if np.any(exact):
        log_w = np.where(exact, log_prior, -np.inf)
    else:
        safe_v = np.where(zero, 1.0, v)
        loglik = -0.5 * np.log(2.0 * np.pi * safe_v) - (s - model.states) ** 2 / (2.0 * safe_v)
        log_w = np.where(zero, -np.inf, loglik + log_prior)
    top = log_w.max()
    if not math.isfinite(top):
        raise ZeroEvidence(f"signal {s!r} has zero likelihood under every regime with prior support")
    w = np.exp(log_w - top)
    return DiscreteBelief(prior.states, w / w.sum())


def regime_predict(belief: DiscreteBelief, model: RegimeModel) -> DiscreteBelief:
    _same_states(belief, model)
    p = belief.probs @ model.transition
    return DiscreteBelief(belief.states, p / p.sum())


def regime_filter_run(initial: DiscreteBelief, signals: Sequence[float], model: RegimeModel) -> list[DiscreteBelief]:
    """Predict-then-update over ``signals``; returns the filtered belief after each one."""
    out = []
    belief = initial
    for t, s in enumerate(signals):
        try:
            belief = regime_update(regime_predict(belief, model), s, model)
        except ZeroEvidence as exc:
            raise ZeroEvidence(exc.message, where=f"step {t}") from exc
        out.append(belief)
    return out


def most_probable(belief: DiscreteBelief) -> int:
    """Index of the most probable regime; ties go to the lowest index."""
    return int(np.argmax(belief.probs))


def simulate_regimes(
    model: RegimeModel,
    initial: DiscreteBelief,
    steps: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw a regime path and its signals.

    The regime at step 0 is drawn from ``initial`` pushed through one transition,
    matching the filter's predict-then-update order. Returns ``(regime_indices,
    signals)``.
    """
    n = model.states.size
    idx = np.empty(steps, dtype=np.int64)
    sig = np.empty(steps)
    j = int(rng.choice(n, p=initial.probs))
    for t in range(steps):
        j = int(rng.choice(n, p=model.transition[j]))
        idx[t] = j
        sig[t] = model.states[j] + rng.standard_normal() * math.sqrt(model.variances[j])
    return idx, sig
