"""Social-learning economy with an endogenous public signal.

Each period a mass ``m`` of agents takes the informative action. Their activity
produces one public signal with variance ``sigma_eps_sq / m``, so when
participation collapses the economy stops generating data. Beliefs and the
true state then shrink by the AR(1) coefficient ``rho``.

Participation rule: agent cutoffs are uniform on ``[cutoff, cutoff + 1]`` and an
agent participates when ``mean - risk_weight * sd`` clears its cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conjugate import update_mass
from .core import GaussianBelief, as_mass
from .errors import DomainError, EmptyInput

__all__ = [
    "PopulationState",
    "TrapConfig",
    "ForecastRecord",
    "participation_mass",
    "initial_state",
    "trap_step",
    "simulate_trap",
    "trap_dispersion",
    "forecast_error_variance",
]


@dataclass(frozen=True)
class PopulationState:
    belief: GaussianBelief
    true_state: float
    mass: float
    t: int = 0

    def __post_init__(self):
        as_mass(self.mass, "mass")
        if not math.isfinite(self.true_state):
            raise DomainError("true_state must be finite")
        if self.t < 0:
            raise DomainError("t must be >= 0")


@dataclass(frozen=True)
class TrapConfig:
    rho: float
    sigma_eps_sq: float
    cutoff: float = 0.0
    risk_weight: float = 1.0
    innovation_var: float = 0.0
    horizon: int = 1

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho!r}")
        if not self.sigma_eps_sq > 0 or not math.isfinite(self.sigma_eps_sq):
            raise DomainError(f"sigma_eps_sq must be > 0, got {self.sigma_eps_sq!r}")
        if not self.innovation_var >= 0 or not math.isfinite(self.innovation_var):
            raise DomainError(f"innovation_var must be >= 0, got {self.innovation_var!r}")
        if not self.risk_weight >= 0:
            raise DomainError(f"risk_weight must be >= 0, got {self.risk_weight!r}")
        if math.isnan(self.cutoff):
            raise DomainError("cutoff must not be NaN")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DomainError(f"horizon must be an integer >= 1, got {self.horizon!r}")


@dataclass(frozen=True)
class ForecastRecord:
    forecasts: tuple[float, ...]
    realized: float

    def __post_init__(self):
        object.__setattr__(self, "forecasts", tuple(float(x) for x in self.forecasts))
        if not self.forecasts:
            raise EmptyInput("a forecast record needs at least one forecast")


def participation_mass(belief: GaussianBelief, cutoff: float, risk_weight: float) -> float:
    """Share of agents whose risk-adjusted belief clears their cutoff."""
    if risk_weight < 0:
        raise DomainError(f"risk_weight must be >= 0, got {risk_weight!r}")
    score = belief.mean - risk_weight * belief.sd - cutoff
    return min(max(score, 0.0), 1.0)


def initial_state(belief: GaussianBelief, true_state: float, config: TrapConfig) -> PopulationState:
    """Period-0 state with the participation mass implied by ``belief``."""
    return PopulationState(belief, float(true_state), participation_mass(belief, config.cutoff, config.risk_weight), 0)


def trap_step(state: PopulationState, config: TrapConfig, rng: np.random.Generator) -> PopulationState:
    """Advance the economy one period.

    Two standard normals are drawn every period (signal noise, then state
    innovation) whether or not they are used, so streams stay aligned.
    """
    belief = state.belief
    m = participation_mass(belief, config.cutoff, config.risk_weight)
    z_signal = rng.standard_normal()
    z_state = rng.standard_normal()
    if m > 0.0:
        s = state.true_state + z_signal * math.sqrt(config.sigma_eps_sq / m)
        belief = update_mass(belief, s, m, config.sigma_eps_sq)
    rho = config.rho
    nxt = GaussianBelief(rho * belief.mean, rho * rho * belief.variance + config.innovation_var)
    truth = rho * state.true_state + z_state * math.sqrt(config.innovation_var)
    return PopulationState(nxt, truth, participation_mass(nxt, config.cutoff, config.risk_weight), state.t + 1)


def simulate_trap(initial: PopulationState, config: TrapConfig, seed) -> list[PopulationState]:
    """Trajectory of ``config.horizon`` steps, including ``initial``."""
    rng = np.random.default_rng(seed)
    path = [initial]
    for _ in range(int(config.horizon)):
        path.append(trap_step(path[-1], config, rng))
    return path


def trap_dispersion(sigma_hat_sq: float, sigma_eps_sq: float, m: float, rho: float) -> float:
    """Variance of next period's posterior mean, ``rho^2 (v - 1/(1/v + m/sigma_eps_sq))``."""
    if not sigma_hat_sq > 0 or not sigma_eps_sq > 0:
        raise DomainError("variances must be > 0")
    m = as_mass(m)
    if m == 0.0:
        return 0.0
    # v - 1/(1/v + q) rewritten as v^2 q / (1 + v q) to avoid cancellation.
    q = m / sigma_eps_sq
    return rho * rho * sigma_hat_sq * sigma_hat_sq * q / (1.0 + sigma_hat_sq * q)


def forecast_error_variance(records: Sequence[ForecastRecord]) -> float:
    """Average squared forecast error across agents, then across records."""
    if not records:
        raise EmptyInput("need at least one forecast record")
    per_record = [np.mean((np.asarray(r.forecasts) - r.realized) ** 2) for r in records]
    return float(np.mean(per_record))

