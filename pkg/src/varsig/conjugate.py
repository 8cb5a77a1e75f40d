"""Closed-form normal-normal updates.

All three variants reduce to adding a signal precision to the prior precision;
they share :func:`update_with_precision` so that ``update_count(a=1)``,
``update_mass(m=1)`` and ``update_constant`` agree bit for bit.
"""

from __future__ import annotations

import math

from .core import GaussianBelief, as_count, as_mass
from .errors import DomainError

__all__ = ["update_with_precision", "update_constant", "update_count", "update_mass"]


def _check_sigma(sigma_eps_sq: float) -> float:
    sigma_eps_sq = float(sigma_eps_sq)
    if math.isnan(sigma_eps_sq) or sigma_eps_sq <= 0.0:
        raise DomainError(f"sigma_eps_sq must be > 0, got {sigma_eps_sq!r}")
    return sigma_eps_sq


def update_with_precision(prior: GaussianBelief, s: float, signal_precision: float) -> GaussianBelief:
    if signal_precision == 0.0:
        return prior
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"signal must be finite, got {s!r}")
    prior_precision = 1.0 / prior.variance
    precision = prior_precision + signal_precision
    mean = (prior_precision * prior.mean + signal_precision * s) / precision
    return GaussianBelief(mean, 1.0 / precision)


def update_constant(prior: GaussianBelief, s: float, sigma_eps_sq: float) -> GaussianBelief:
    """Posterior after one signal with constant noise variance ``sigma_eps_sq``."""
    sigma_eps_sq = _check_sigma(sigma_eps_sq)
    return update_with_precision(prior, s, 1.0 / sigma_eps_sq)


def update_count(prior: GaussianBelief, s_bar: float, a, sigma_eps_sq: float) -> GaussianBelief:
    """Posterior after observing the mean ``s_bar`` of ``a`` iid signals.

    ``a = 0`` carries no information and returns ``prior`` itself.
    """
    n = as_count(a)
    sigma_eps_sq = _check_sigma(sigma_eps_sq)
    return update_with_precision(prior, s_bar, n / sigma_eps_sq)


def update_mass(prior: GaussianBelief, s: float, m: float, sigma_eps_sq: float) -> GaussianBelief:
    """Posterior after a public signal whose precision scales with participation ``m``."""
    m = as_mass(m)
    sigma_eps_sq = _check_sigma(sigma_eps_sq)
    return update_with_precision(prior, s, m / sigma_eps_sq)
