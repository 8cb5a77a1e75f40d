import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varsig import (
    INFINITE_VARIANCE,
    Constant,
    GaussianBelief,
    InverseCount,
    InverseMass,
    StateFunction,
    TrackingError,
    VarianceFunction,
    aggregate_signals,
    noise_variance,
    sample_signal,
)
from varsig.errors import DomainError, EmptyInput, NegativeVariance, NoInformation

reals = st.floats(-1e3, 1e3, allow_nan=False)


def test_noise_variance_examples():
    assert noise_variance(Constant(1.0), 5.0, 123.0) == 1.0
    assert noise_variance(InverseCount(2.0), 0.0, 4) == 0.5
    assert noise_variance(TrackingError(2.0), 3.0, 1.0) == 8.0
    assert noise_variance(InverseMass(1.0), 0.0, 0.0) == INFINITE_VARIANCE
    assert noise_variance(InverseCount(1.0), 0.0, 0) == INFINITE_VARIANCE
    assert noise_variance(InverseMass(2.0), 0.0, 0.5) == 4.0


def test_state_function_builtins():
    assert noise_variance(StateFunction("square"), -3.0, 0.0) == 9.0
    assert noise_variance(StateFunction(VarianceFunction("square_plus", 1.0)), 2.0, 0.0) == 5.0
    assert noise_variance(StateFunction("abs"), -2.5, 0.0) == 2.5
    assert noise_variance(StateFunction(VarianceFunction("const", 0.7)), 9.0, 0.0) == 0.7


@pytest.mark.parametrize(
    "spec, action",
    [(InverseCount(1.0), -1), (InverseCount(1.0), 2.5), (InverseMass(1.0), 1.5), (InverseMass(1.0), -0.1)],
)
def test_action_domain_errors(spec, action):
    with pytest.raises(DomainError):
        noise_variance(spec, 0.0, action)


def test_negative_state_function_rejected():
    spec = StateFunction(VarianceFunction.custom(lambda x: x - 1.0, "shifted"))
    with pytest.raises(NegativeVariance):
        noise_variance(spec, 0.0, 0.0)
    assert noise_variance(spec, 3.0, 0.0) == 2.0


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_nonpositive_parameters_rejected(bad):
    for cls in (Constant, InverseCount, InverseMass, TrackingError):
        with pytest.raises(DomainError):
            cls(bad)


def test_belief_requires_positive_variance():
    with pytest.raises(DomainError):
        GaussianBelief(0.0, 0.0)
    with pytest.raises(DomainError):
        GaussianBelief(math.nan, 1.0)


@given(state=reals, action=reals, k=st.floats(1e-6, 1e3))
def test_variance_nonnegative_everywhere(state, action, k):
    for spec in (Constant(k), TrackingError(k), StateFunction("square"), StateFunction("abs")):
        assert noise_variance(spec, state, action) >= 0


# Lattice values keep (a - a*)**2 clear of float underflow.
lattice = st.integers(-10**6, 10**6).map(lambda i: i / 1000)


@given(state=lattice, action=lattice)
def test_tracking_zero_iff_congruent(state, action):
    v = noise_variance(TrackingError(1.0), state, action)
    assert (v == 0) == (state == action)


def test_inverse_count_strictly_decreasing():
    values = [noise_variance(InverseCount(3.0), 0.0, a) for a in range(1, 200)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_perfect_precision_signal_equals_state():
    rng = np.random.default_rng(0)
    assert sample_signal(1.25, 1.25, TrackingError(3.0), rng) == 1.25


def test_sample_signal_deterministic():
    a = sample_signal(0.0, 0.0, Constant(1.0), np.random.default_rng(42))
    b = sample_signal(0.0, 0.0, Constant(1.0), np.random.default_rng(42))
    assert a == b


def test_sample_signal_no_information():
    with pytest.raises(NoInformation):
        sample_signal(0.0, 0, InverseCount(1.0), np.random.default_rng(0))


def test_sample_signal_moments():
    rng = np.random.default_rng(7)
    draws = np.array([sample_signal(0.0, 0.0, Constant(4.0), rng) for _ in range(100_000)])
    assert abs(draws.mean()) < 0.05 * 2.0
    assert draws.var() == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("signals", [[2.0], [1.0, 3.0], [0.5, 1.5, 2.5, 3.5]])
def test_aggregate_signals(signals):
    assert aggregate_signals(signals) == 2.0


def test_aggregate_empty():
    with pytest.raises(EmptyInput):
        aggregate_signals([])
