"""Beliefs, signals and the noise-variance dispatch.

The observed signal is ``s = a* + eps`` with ``eps ~ N(0, Sigma(a*, a))``. Every
functional form of ``Sigma`` the package supports is a small frozen dataclass;
:func:`noise_variance` evaluates any of them.

Actions and signals are plain floats. Count semantics (``InverseCount``) and
participation-mass semantics (``InverseMass``) are checked per variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, EmptyInput, NegativeVariance, NoInformation

__all__ = [
    "INFINITE_VARIANCE",
    "GaussianBelief",
    "VarianceFunction",
    "Constant",
    "InverseCount",
    "InverseMass",
    "StateFunction",
    "TrackingError",
    "VarianceSpec",
    "noise_variance",
    "sample_signal",
    "aggregate_signals",
    "as_count",
]

# Sentinel for "no information": zero signals collected or nobody participating.
INFINITE_VARIANCE = math.inf


def _finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _positive(x: float, name: str) -> float:
    x = _finite(x, name)
    if x <= 0.0:
        raise DomainError(f"{name} must be > 0, got {x!r}")
    return x


@dataclass(frozen=True)
class GaussianBelief:
    """Normal belief ``N(mean, variance)`` over the hidden state."""

    mean: float
    variance: float

    def __post_init__(self):
        object.__setattr__(self, "mean", _finite(self.mean, "mean"))
        object.__setattr__(self, "variance", _positive(self.variance, "variance"))

    @property
    def precision(self) -> float:
        return 1.0 / self.variance

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class VarianceFunction:
    """A state -> variance mapping with a label that survives config round trips.

    Built-in names: ``square`` (a*^2), ``square_plus`` (a*^2 + c), ``abs`` (|a*|)
    and ``const`` (c). Arbitrary callables can be wrapped with :meth:`custom`;
    they should accept numpy arrays but scalar-only callables also work.
    """

    name: str
    c: float = 0.0
    fn: Callable | None = None

    BUILTIN = ("square", "square_plus", "abs", "const")

    def __post_init__(self):
        if self.fn is None:
            if self.name not in self.BUILTIN:
                raise DomainError(f"unknown state function {self.name!r}; expected one of {self.BUILTIN}")
            if self.name in ("square_plus", "const") and float(self.c) < 0:
                raise DomainError(f"{self.name} needs c >= 0, got {self.c!r}")
        object.__setattr__(self, "c", float(self.c))

    @classmethod
    def custom(cls, fn: Callable, label: str = "custom") -> "VarianceFunction":
        return cls(name=label, fn=fn)

    def __call__(self, x):
        if self.fn is not None:
            return self.fn(x)
        if self.name == "square":
            return np.square(x)
        if self.name == "square_plus":
            return np.square(x) + self.c
        if self.name == "abs":
            return np.abs(x)
        return np.full_like(np.asarray(x, dtype=float), self.c)[()]

    def evaluate(self, x) -> np.ndarray:
        """Evaluate on an array, checking values are nonnegative and finite."""
        x = np.asarray(x, dtype=float)
        try:
            out = np.asarray(self(x), dtype=float)
        except TypeError:
            out = None
        if out is None or out.shape != x.shape:
            out = np.array([float(self(v)) for v in x.ravel()]).reshape(x.shape)
        if np.any(np.isnan(out)) or np.any(np.isinf(out)):
            raise DomainError(f"state function {self.name!r} returned a non-finite value")
        if np.any(out < 0):
            bad = x[out < 0].ravel()[0]
            raise NegativeVariance(f"state function {self.name!r} is negative at a*={bad!r}")
        return out


def as_variance_function(f) -> VarianceFunction:
    if isinstance(f, VarianceFunction):
        return f
    if isinstance(f, str):
        return VarianceFunction(f)
    if callable(f):
        return VarianceFunction.custom(f, getattr(f, "__name__", "custom"))
    raise DomainError(f"cannot interpret {f!r} as a state function")


@dataclass(frozen=True)
class Constant:
    sigma_eps_sq: float

    def __post_init__(self):
        _positive(self.sigma_eps_sq, "sigma_eps_sq")


@dataclass(frozen=True)
class InverseCount:
    """Variance ``sigma_eps_sq / a`` of the mean of ``a`` iid signals."""

    sigma_eps_sq: float

    def __post_init__(self):
        _positive(self.sigma_eps_sq, "sigma_eps_sq")


@dataclass(frozen=True)
class InverseMass:
    """Variance ``sigma_eps_sq / m`` of a public signal with participation mass ``m``."""

    sigma_eps_sq: float

    def __post_init__(self):
        _positive(self.sigma_eps_sq, "sigma_eps_sq")


@dataclass(frozen=True)
class StateFunction:
    f: VarianceFunction

    def __post_init__(self):
        object.__setattr__(self, "f", as_variance_function(self.f))


@dataclass(frozen=True)
class TrackingError:
    """Variance ``k * (a - a*)**2``; zero when the action hits the state."""

    k: float

    def __post_init__(self):
        _positive(self.k, "k")


VarianceSpec = Union[Constant, InverseCount, InverseMass, StateFunction, TrackingError]


def as_count(a, name: str = "a") -> int:
    """Coerce a signal count, rejecting negatives and fractional values."""
    if isinstance(a, bool):
        raise DomainError(f"{name} must be an integer count, got {a!r}")
    if isinstance(a, (int, np.integer)):
        n = int(a)
    else:
        x = float(a)
        if not math.isfinite(x) or not x.is_integer():
            raise DomainError(f"{name} must be an integer count, got {a!r}")
        n = int(x)
    if n < 0:
        raise DomainError(f"{name} must be >= 0, got {a!r}")
    return n


def as_mass(m, name: str = "m") -> float:
    m = _finite(m, name)
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {m!r}")
    return m


def noise_variance(spec: VarianceSpec, state: float, action: float) -> float:
    """Evaluate ``Sigma(a*, a)`` for the given variant.

    Zero counts and zero participation give :data:`INFINITE_VARIANCE`.
    """
    if isinstance(spec, Constant):
        return float(spec.sigma_eps_sq)
    if isinstance(spec, InverseCount):
        n = as_count(action, "action")
        return INFINITE_VARIANCE if n == 0 else spec.sigma_eps_sq / n
    if isinstance(spec, InverseMass):
        m = as_mass(action, "action")
        return INFINITE_VARIANCE if m == 0.0 else spec.sigma_eps_sq / m
    state = _finite(state, "state")
    if isinstance(spec, StateFunction):
        return float(spec.f.evaluate(state))
    if isinstance(spec, TrackingError):
        action = _finite(action, "action")
        return spec.k * (action - state) ** 2
    raise DomainError(f"unsupported variance spec {spec!r}")


def sample_signal(state: float, action: float, spec: VarianceSpec, rng: np.random.Generator) -> float:
    """Draw ``state + z * sqrt(Sigma(state, action))`` using ``rng``."""
    v = noise_variance(spec, state, action)
    if math.isinf(v):
        raise NoInformation("signal variance is infinite; skip the update instead of sampling")
    z = rng.standard_normal()
    return float(state) + z * math.sqrt(v)


def aggregate_signals(signals: Sequence[float]) -> float:
    """Mean of a batch of iid signals, the sufficient statistic for ``a*``."""
    values = [float(s) for s in signals]
    if not values:
        raise EmptyInput("cannot aggregate an empty list of signals")
    return math.fsum(values) / len(values)
