"""Tracking-error learning and the project bandit.

The signal about a project's target is sharper the closer the action is to it:
``s = a* + eps`` with ``Var(eps) = k (a - a*)^2``. The realized project output
``A - (a - a*)^2`` is deterministic and is logged as the reward; learning runs
through the tracking-error signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import GaussianBelief, TrackingError, VarianceFunction, sample_signal
from .errors import DegeneratePosterior, DomainError, VarsigError
from .posterior import F_FLOOR, GridSpec, PosteriorGrid, default_grid, grid_posterior, posterior_moments

__all__ = [
    "BanditEnv",
    "EpisodeStep",
    "EpisodeLog",
    "tracking_variance",
    "tracking_function",
    "bandit_output",
    "invert_output",
    "tracking_update",
    "run_bandit_episode",
    "POLICIES",
]

POLICIES = ("greedy", "round_robin")

# Relative resolution below which a belief counts as having identified the target.
RESOLUTION = 1e-8


@dataclass(frozen=True)
class BanditEnv:
    base_output: float
    targets: tuple[float, ...]
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        if not self.targets:
            raise DomainError("targets must be nonempty")
        if not self.k > 0 or not math.isfinite(self.k):
            raise DomainError(f"k must be > 0, got {self.k!r}")
        if not math.isfinite(self.base_output):
            raise DomainError("base_output must be finite")


@dataclass(frozen=True)
class EpisodeStep:
    step: int
    project: int
    action: float
    output: float
    signal: float
    mean: float
    variance: float
    identified: bool = False


@dataclass
class EpisodeLog:
    steps: list[EpisodeStep] = field(default_factory=list)
    beliefs: list[GaussianBelief] = field(default_factory=list)

    def for_project(self, j: int) -> list[EpisodeStep]:
        return [r for r in self.steps if r.project == j]


def tracking_variance(k: float, action: float, state: float) -> float:
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k!r}")
    return k * (float(action) - float(state)) ** 2


def tracking_function(k: float, action: float) -> VarianceFunction:
    """``a* -> k (action - a*)^2`` as a state function for the grid posterior."""
    k, action = float(k), float(action)
    return VarianceFunction.custom(lambda x: k * (action - np.asarray(x)) ** 2, f"tracking(k={k!r}, a={action!r})")


def bandit_output(env: BanditEnv, j: int, action: float) -> float:
    if not 0 <= j < len(env.targets):
        raise IndexError(f"project index {j} out of range for {len(env.targets)} projects")
    return env.base_output - (float(action) - env.targets[j]) ** 2


def invert_output(base_output: float, action: float, output: float, prior_mean: float) -> float:
    """Target implied by an observed output.

    ``A - (a - a*)^2 = y`` has roots ``a +/- sqrt(A - y)``; the one nearer
    ``prior_mean`` is returned, the smaller one on a tie.
    """
    gap = base_output - output
    if gap < 0:
        raise DomainError(f"output {output!r} exceeds the base output {base_output!r}")
    d = math.sqrt(gap)
    lo, hi = action - d, action + d
    return hi if abs(hi - prior_mean) < abs(lo - prior_mean) else lo


def tracking_update(
    prior: GaussianBelief,
    action: float,
    s: float,
    k: float,
    grid: GridSpec | None = None,
) -> PosteriorGrid:
    """Grid posterior of the target after a tracking-error signal."""
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k!r}")
    return grid_posterior(prior, s, tracking_function(k, action), grid)


def _identified_belief(action: float) -> GaussianBelief:
    sd = RESOLUTION * max(1.0, abs(action))
    return GaussianBelief(action, sd * sd)


def _episode_grid(belief: GaussianBelief, grid: GridSpec | None) -> GridSpec:
    if grid is not None:
        return grid
    floor = RESOLUTION * max(1.0, abs(belief.mean))
    if belief.sd < floor:
        belief = GaussianBelief(belief.mean, floor * floor)
    return default_grid(belief)


def _pick(policy: str, step: int, beliefs: Sequence[GaussianBelief]) -> int:
    if policy == "round_robin":
        return step % len(beliefs)
    # Greedy: expected output A - variance is highest for the tightest belief.
    return int(np.argmin([b.variance for b in beliefs]))


def run_bandit_episode(
    env: BanditEnv,
    priors: Sequence[GaussianBelief],
    steps: int,
    policy: str = "greedy",
    grid: GridSpec | None = None,
    seed=0,
) -> EpisodeLog:
    """Play ``steps`` rounds, acting at the posterior mean of the chosen project.

    Each round logs the deterministic output and a tracking-error signal drawn
    with ``env.k``; the chosen project's belief is replaced by the moment-matched
    grid posterior. When the signal lands on the action (zero variance) the
    target counts as identified and the belief collapses onto the action; a
    degenerate grid with the signal elsewhere leaves the belief unchanged.
    ``grid=None`` re-centres a default grid on each belief.
    """
    if len(priors) != len(env.targets):
        raise DomainError(f"need one prior per project: {len(priors)} priors for {len(env.targets)} projects")
    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if int(steps) != steps or steps < 1:
        raise DomainError(f"steps must be an integer >= 1, got {steps!r}")
    rng = np.random.default_rng(seed)
    spec = TrackingError(env.k)
    beliefs = list(priors)
    log = EpisodeLog()
    for t in range(int(steps)):
        j = _pick(policy, t, beliefs)
        prior = beliefs[j]
        action = prior.mean
        output = bandit_output(env, j, action)
        s = sample_signal(env.targets[j], action, spec, rng)
        identified = False
        try:
            mean, var = posterior_moments(tracking_update(prior, action, s, env.k, _episode_grid(prior, grid)))
            floor = RESOLUTION * max(1.0, abs(mean))
            post = GaussianBelief(mean, max(var, floor * floor))
        except DegeneratePosterior:
            if abs(s - action) <= math.sqrt(F_FLOOR / env.k):
                post, identified = _identified_belief(action), True
            else:
                # Belief is narrower than the variance floor resolves; nothing to learn.
                post = prior
        except VarsigError as exc:
            raise type(exc)(exc.message, where=f"step {t}") from exc
        beliefs[j] = post
        log.steps.append(EpisodeStep(t, j, action, output, s, post.mean, post.variance, identified))
    log.beliefs = beliefs
    return log
