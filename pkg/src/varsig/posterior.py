"""Non-conjugate posteriors when the noise variance depends on the state.

With ``s | a* ~ N(a*, f(a*))`` and a normal prior the posterior has no closed
form. It is tabulated on a uniform grid in log space and normalized with a
log-sum-exp trapezoid rule; a random-walk Metropolis sampler provides an
independent second route to the same distribution.

``f`` is floored at :data:`F_FLOOR` so that zeros of ``f`` (e.g. ``f(a*) = a*^2``
at the origin) stay finite. When more than 99% of the normalized mass sits on
floored nodes the posterior is reported as degenerate instead of returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .core import GaussianBelief, as_variance_function
from .errors import DegeneratePosterior, DomainError, NegativeVariance

__all__ = [
    "F_FLOOR",
    "DEGENERATE_MASS",
    "GridSpec",
    "PosteriorGrid",
    "MHResult",
    "default_grid",
    "log_unnormalized_posterior",
    "grid_posterior",
    "posterior_moments",
    "mh_sample",
    "default_proposal_scale",
    "posterior_curves",
    "figure1_curves",
]

F_FLOOR = 1e-12
DEGENERATE_MASS = 0.99
DEFAULT_WIDTH = 8.0
DEFAULT_NODES = 4001
DEFAULT_PROPOSAL_FACTOR = 1.5
BURN_IN_FRACTION = 0.2


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n_nodes: int = DEFAULT_NODES

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise DomainError(f"grid needs finite lo < hi, got lo={lo!r}, hi={hi!r}")
        n = self.n_nodes
        if isinstance(n, bool) or int(n) != n or n < 3 or n % 2 == 0:
            raise DomainError(f"n_nodes must be an odd integer >= 3, got {n!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n_nodes", int(n))

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n_nodes - 1)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def nodes(self) -> np.ndarray:
        # Built outward from the midpoint so a grid centred on c is exactly
        # mirror-symmetric about c.
        half = self.n_nodes // 2
        offsets = np.arange(-half, half + 1, dtype=float) * self.step
        return self.midpoint + offsets


def default_grid(prior: GaussianBelief, width: float = DEFAULT_WIDTH, n_nodes: int = DEFAULT_NODES) -> GridSpec:
    """Grid spanning ``width`` prior standard deviations either side of the prior mean."""
    half = width * prior.sd
    return GridSpec(prior.mean - half, prior.mean + half, n_nodes)


def _trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


@dataclass(frozen=True, eq=False)
class PosteriorGrid:
    """Normalized posterior density tabulated on a uniform grid."""

    nodes: np.ndarray
    log_unnormalized: np.ndarray
    density: np.ndarray
    step: float
    log_evidence: float
    floored: np.ndarray | None = None

    @classmethod
    def from_log_values(cls, grid: GridSpec, log_unnormalized, floored=None) -> "PosteriorGrid":
        nodes = grid.nodes()
        lu = np.asarray(log_unnormalized, dtype=float)
        if lu.shape != nodes.shape:
            raise DomainError("log values and grid nodes differ in length")
        if np.any(np.isnan(lu)) or np.any(lu == np.inf):
            raise DomainError("log density must not be NaN or +inf")
        top = lu.max()
        if not math.isfinite(top):
            raise DomainError("log density is -inf on every node")
        w = _trapezoid_weights(nodes.size, grid.step)
        log_evidence = top + math.log(float(np.dot(w, np.exp(lu - top))))
        density = np.exp(lu - log_evidence)
        for arr in (nodes, lu, density):
            arr.setflags(write=False)
        if floored is not None:
            floored = np.asarray(floored, dtype=bool)
            floored.setflags(write=False)
        return cls(nodes, lu, density, grid.step, log_evidence, floored)

    @property
    def weights(self) -> np.ndarray:
        return _trapezoid_weights(self.nodes.size, self.step)

    def integral(self) -> float:
        return float(np.dot(self.weights, self.density))

    def floored_mass(self) -> float:
        if self.floored is None:
            return 0.0
        return float(np.dot(self.weights[self.floored], self.density[self.floored]))

    def to_belief(self) -> GaussianBelief:
        """Moment-matched Gaussian approximation."""
        mean, var = posterior_moments(self)
        return GaussianBelief(mean, var)


def _log_terms(prior_mean, prior_var, s, astar, fvals):
    fl = np.maximum(fvals, F_FLOOR)
    return -0.5 * np.log(fl) - (s - astar) ** 2 / (2.0 * fl) - (astar - prior_mean) ** 2 / (2.0 * prior_var)


def log_unnormalized_posterior(prior: GaussianBelief, s: float, f, astar: float) -> float:
    """Log of ``f^{-1/2} exp(-(s-a*)^2 / 2f - (a*-mu)^2 / 2 sigma^2)`` at one point."""
    f = as_variance_function(f)
    fv = f.evaluate(np.asarray(float(astar)))
    return float(_log_terms(prior.mean, prior.variance, float(s), float(astar), fv))


def grid_posterior(prior: GaussianBelief, s: float, f, grid: GridSpec | None = None) -> PosteriorGrid:
    """Tabulate and normalize the posterior of ``a*`` given signal ``s``.

    Raises :class:`DegeneratePosterior` when the floored nodes carry more than
    99% of the mass.
    """
    f = as_variance_function(f)
    grid = grid or default_grid(prior)
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"signal must be finite, got {s!r}")
    nodes = grid.nodes()
    fvals = f.evaluate(nodes)
    lu = _log_terms(prior.mean, prior.variance, s, nodes, fvals)
    post = PosteriorGrid.from_log_values(grid, lu, floored=fvals < F_FLOOR)
    mass = post.floored_mass()
    if mass > DEGENERATE_MASS:
        raise DegeneratePosterior(
            f"{mass:.4f} of the posterior mass sits where f < {F_FLOOR:g} (signal s={s!r})",
            where=f"s={s!r}",
        )
    return post


def posterior_moments(grid: PosteriorGrid) -> tuple[float, float]:
    """Trapezoid mean and variance of a tabulated density."""
    w = grid.weights * grid.density
    mean = float(np.dot(w, grid.nodes))
    var = float(np.dot(w, (grid.nodes - mean) ** 2))
    return mean, max(var, 0.0)


@dataclass(frozen=True, eq=False)
class MHResult:
    samples: np.ndarray
    acceptance_rate: float
    burn_in: int

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def variance(self) -> float:
        return float(np.var(self.samples))


def default_proposal_scale(prior: GaussianBelief) -> float:
    return DEFAULT_PROPOSAL_FACTOR * prior.sd


def mh_sample(
    prior: GaussianBelief,
    s: float,
    f,
    n_samples: int,
    proposal_scale: float | None = None,
    seed: int = 0,
) -> MHResult:
    """Random-walk Metropolis chain targeting the unnormalized posterior.

    The chain starts at the prior mean and runs ``n_samples`` steps; the first
    20% are discarded as burn-in. Normal increments (all ``n_samples`` of them)
    and then the uniforms are drawn from ``numpy.random.default_rng(seed)``.
    Named state functions run through a compiled loop; other callables use a
    pure-Python loop with the same arithmetic.
    """
    f = as_variance_function(f)
    if isinstance(n_samples, bool) or int(n_samples) != n_samples or n_samples < 1:
        raise DomainError(f"n_samples must be a positive integer, got {n_samples!r}")
    n = int(n_samples)
    scale = default_proposal_scale(prior) if proposal_scale is None else float(proposal_scale)
    if not math.isfinite(scale) or scale <= 0:
        raise DomainError(f"proposal_scale must be > 0, got {proposal_scale!r}")
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"signal must be finite, got {s!r}")

    rng = np.random.default_rng(seed)
    steps = rng.standard_normal(n) * scale
    with np.errstate(divide="ignore"):
        log_u = np.log(rng.random(n))

    kind = _KERNEL_KINDS.get(f.name) if f.fn is None else None
    if kind is not None:
        chain, accepted = _mh_kernel(prior.mean, prior.variance, s, kind, f.c, steps, log_u, F_FLOOR)
        if accepted < 0:
            raise NegativeVariance(f"state function {f.name!r} returned a negative value")
    else:
        chain, accepted = _mh_python(prior, s, f, steps, log_u)
    burn = int(BURN_IN_FRACTION * n)
    return MHResult(chain[burn:].copy(), accepted / n, burn)


_KERNEL_KINDS = {"square": 0, "square_plus": 1, "abs": 2, "const": 3}


@numba.njit(cache=True)
def _mh_kernel(mu, var, s, kind, c, steps, log_u, floor):
    n = steps.shape[0]
    chain = np.empty(n)
    x = mu
    lp = 0.0
    accepted = 0
    for t in range(-1, n):
        prop = x if t < 0 else x + steps[t]
        if kind == 0:
            fv = prop * prop
        elif kind == 1:
            fv = prop * prop + c
        elif kind == 2:
            fv = abs(prop)
        else:
            fv = c
        if fv < 0.0:
            return chain, -1
        fl = max(fv, floor)
        lpp = -0.5 * np.log(fl) - (s - prop) ** 2 / (2.0 * fl) - (prop - mu) ** 2 / (2.0 * var)
        if t < 0:
            lp = lpp
            continue
        if log_u[t] < lpp - lp:
            x = prop
            lp = lpp
            accepted += 1
        chain[t] = x
    return chain, accepted


def _mh_python(prior, s, f, steps, log_u):
    def logp(a):
        return float(_log_terms(prior.mean, prior.variance, s, a, f.evaluate(np.asarray(a))))

    n = steps.shape[0]
    chain = np.empty(n)
    x = prior.mean
    lp = logp(x)
    accepted = 0
    for t in range(n):
        prop = x + steps[t]
        lpp = logp(prop)
        if log_u[t] < lpp - lp:
            x, lp = prop, lpp
            accepted += 1
        chain[t] = x
    return chain, accepted


def posterior_curves(prior: GaussianBelief, f, signals: Sequence[float], grid: GridSpec | None = None):
    """One normalized posterior curve per signal value, as ``(signal, PosteriorGrid)`` pairs."""
    if len(signals) == 0:
        raise DomainError("signals must be nonempty")
    curves = []
    for i, s in enumerate(signals):
        try:
            curves.append((float(s), grid_posterior(prior, s, f, grid)))
        except DegeneratePosterior as exc:
            raise DegeneratePosterior(exc.message, where=f"signals[{i}]") from exc
    return curves


# Alias under the operation name used by downstream callers.
figure1_curves = posterior_curves
