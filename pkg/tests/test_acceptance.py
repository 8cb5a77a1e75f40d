"""Acceptance criteria, one test per criterion.

Each test prints ``ACCEPTANCE <n> PASS|FAIL <title> (<seconds>s)`` and the
lines are repeated in the pytest terminal summary. Run on its own with
``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import functools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from harness import next_mean_draws
from varsig import (
    DiscreteBelief,
    GaussianBelief,
    RegimeModel,
    VarianceFunction,
    posterior_curves,
    grid_posterior,
    mh_sample,
    posterior_moments,
    regime_filter_run,
    regime_predict,
    regime_update,
    trap_dispersion,
    update_constant,
    update_count,
    update_mass,
)
from varsig.bandit import BanditEnv, run_bandit_episode, tracking_variance
from varsig.cli import main
from varsig.errors import DegeneratePosterior
from varsig.regimes import most_probable, simulate_regimes

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

RESULTS: list[str] = []


def criterion(number, title, max_seconds=None):
    """Time the test, enforce its runtime budget and record a pass/fail line."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            ok = False
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                if max_seconds is not None:
                    assert elapsed < max_seconds, f"took {elapsed:.1f}s, budget {max_seconds}s"
                ok = True
            finally:
                elapsed = time.perf_counter() - start
                line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s)"
                RESULTS.append(line)
                print(line)

        return run

    return wrap


def random_conjugate_cases(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        var = rng.uniform(0.25, 2.0)
        noise = rng.uniform(0.25, 4.0)
        mu = rng.uniform(-2.0, 2.0)
        s = mu + rng.standard_normal() * math.sqrt(var + noise)
        yield GaussianBelief(mu, var), float(s), noise


@criterion(1, "conjugate oracle triangle: closed form, grid, Metropolis", max_seconds=60)
def test_conjugate_oracle_triangle():
    worst_grid = worst_mh = worst_cross = 0.0
    for i, (prior, s, noise) in enumerate(random_conjugate_cases(200, seed=20240)):
        closed = update_constant(prior, s, noise)
        exact = np.array([closed.mean, closed.variance])
        f = VarianceFunction("const", noise)
        grid = np.array(posterior_moments(grid_posterior(prior, s, f)))
        mh = mh_sample(prior, s, f, 200_000, seed=i)
        chain = np.array([mh.mean(), mh.variance()])
        worst_grid = max(worst_grid, np.max(np.abs(grid - exact)))
        worst_mh = max(worst_mh, np.max(np.abs(chain - exact)))
        worst_cross = max(worst_cross, np.max(np.abs(chain - grid)))
    assert worst_grid < 1e-6
    assert worst_mh < 0.05
    assert worst_cross < 0.05


@criterion(2, "reduction chain: count and mass updates against repeated constant updates")
def test_reduction_chain():
    rng = np.random.default_rng(7)
    for _ in range(100):
        prior = GaussianBelief(rng.uniform(-5, 5), rng.uniform(0.01, 10))
        s = rng.uniform(-5, 5)
        noise = rng.uniform(0.01, 10)
        one = update_constant(prior, s, noise)
        assert update_count(prior, s, 1, noise) == one
        assert update_mass(prior, s, 1.0, noise) == one

        a = int(rng.integers(2, 20))
        signals = s + rng.standard_normal(a)
        sequential = prior
        for x in signals:
            sequential = update_constant(sequential, float(x), noise)
        pooled = update_count(prior, math.fsum(signals) / a, a, noise)
        assert pooled.mean == pytest.approx(sequential.mean, abs=1e-10)
        assert pooled.variance == pytest.approx(sequential.variance, rel=1e-13)


@criterion(3, "posterior curves for f(a*) = a*^2 under a standard normal prior", max_seconds=5)
def test_posterior_curves():
    prior = GaussianBelief(0.0, 1.0)
    signals = [-2.0, -1.0, 1.0, 2.0]
    curves = dict(posterior_curves(prior, "square", signals))
    for s in signals:
        assert curves[s].integral() == pytest.approx(1.0, abs=1e-6)
        assert np.array_equal(curves[s].nodes, -curves[-s].nodes[::-1])
        assert np.max(np.abs(curves[s].density - curves[-s].density[::-1])) <= 1e-10
    with pytest.raises(DegeneratePosterior):
        grid_posterior(prior, 0.0, "square")


@criterion(4, "regime filter: two-state example, simplex fuzz, persistence benchmark", max_seconds=30)
def test_regime_filter():
    unit = RegimeModel([-1.0, 1.0], [1.0, 1.0], np.eye(2))
    post = regime_update(DiscreteBelief.uniform([-1.0, 1.0]), 1.0, unit)
    assert abs(post.probs[1] - 1 / (1 + math.exp(-2))) <= 1e-12

    rng = np.random.default_rng(4)
    for _ in range(10_000):
        n = int(rng.integers(2, 6))
        states = np.cumsum(rng.uniform(0.1, 2.0, n)) - 3.0
        model = RegimeModel(states, rng.uniform(0.05, 4.0, n), rng.dirichlet(np.ones(n), size=n))
        prior = DiscreteBelief(states, rng.dirichlet(np.ones(n)))
        b = regime_update(regime_predict(prior, model), rng.uniform(-4, 4), model)
        assert np.all(b.probs >= 0) and abs(b.probs.sum() - 1) <= 1e-12

    model = RegimeModel.persistent([-1.0, 1.0], [0.25, 4.0], 0.95)
    initial = DiscreteBelief.uniform(model.states)
    accuracies = []
    for seed in range(100):
        idx, signals = simulate_regimes(model, initial, 200, np.random.default_rng(seed))
        beliefs = regime_filter_run(initial, signals, model)
        accuracies.append(np.mean([most_probable(b) == j for b, j in zip(beliefs, idx)]))
    assert min(accuracies) >= 0.70


TRAP_SETTINGS = [
    # (mean, sigma_hat_sq, sigma_eps_sq, m, rho)
    (1.0, 1.0, 1.0, 1.0, 0.9),
    (1.0, 0.5, 2.0, 0.4, 0.7),
    (2.0, 2.0, 0.5, 0.7, 0.95),
]


@criterion(5, "next-period posterior mean law and dispersion monotonicity", max_seconds=60)
def test_trap_law():
    for k, (mean, v, noise, m, rho) in enumerate(TRAP_SETTINGS):
        draws, realized = next_mean_draws(mean, v, noise, m, rho, 100_000, seed=100 + k)
        assert realized == pytest.approx(m, abs=1e-12)
        assert draws.mean() == pytest.approx(rho * mean, rel=0.01)
        assert draws.var() == pytest.approx(trap_dispersion(v, noise, m, rho), rel=0.03)
        values = [trap_dispersion(v, noise, mass, rho) for mass in np.linspace(0.1, 1.0, 10)]
        assert all(b > a for a, b in zip(values, values[1:]))


@criterion(6, "tracking variance sweep and greedy bandit convergence", max_seconds=60)
def test_tracking_and_bandit():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        k, x, d = rng.uniform(0.01, 10), rng.uniform(-10, 10), rng.uniform(-5, 5)
        lam = rng.uniform(0.1, 10)
        assert tracking_variance(k, x, x) == 0.0
        base = tracking_variance(k, x + d, x)
        assert base > 0
        assert tracking_variance(k, x + lam * d, x) == pytest.approx(lam**2 * base, rel=1e-9)

    env = BanditEnv(5.0, (2.0,))
    converged = sum(
        abs(run_bandit_episode(env, [GaussianBelief(0.0, 1.0)], 25, "greedy", seed=seed).beliefs[0].mean - 2.0) < 0.1
        for seed in range(100)
    )
    assert converged >= 90


@criterion(7, "CLI determinism and replica invariance to parallelism")
def test_cli_determinism(tmp_path, capsys):
    for path in sorted(SCENARIO_DIR.glob("*.json")):
        scenario = json.loads(path.read_text())["scenario"]
        first, second = tmp_path / f"{path.stem}-1.csv", tmp_path / f"{path.stem}-2.csv"
        assert main([scenario, "--config", str(path), "--out", str(first)]) == 0
        assert main([scenario, "--config", str(path), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    trap = SCENARIO_DIR / "trap.json"
    outputs = []
    for workers in (1, 2, 4):
        out = tmp_path / f"trap-w{workers}.csv"
        assert main(["trap", "--config", str(trap), "--out", str(out), "--workers", str(workers)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    capsys.readouterr()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
