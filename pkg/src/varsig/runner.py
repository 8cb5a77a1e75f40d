"""Scenario execution: dispatch a validated config and write CSV results.

Each scenario produces a header, rows and a few summary statistics for one
seed. Replicas use seeds from :func:`~varsig.seeds.derive_replica_seed` and
are merged in replica order, so output does not depend on ``workers``.
Floats are written with 17 significant digits, which round-trips doubles.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bandit import BanditEnv, run_bandit_episode
from .config import ScenarioConfig, regime_model
from .conjugate import update_constant, update_count, update_mass
from .core import (
    Constant,
    GaussianBelief,
    InverseCount,
    InverseMass,
    aggregate_signals,
    as_count,
    noise_variance,
    sample_signal,
)
from .population import TrapConfig, initial_state, simulate_trap
from .posterior import posterior_curves, mh_sample, posterior_moments
from .regimes import DiscreteBelief, most_probable, regime_filter_run, simulate_regimes
from .seeds import derive_replica_seed

__all__ = ["ScenarioResult", "RunResult", "run_scenario", "run_replica", "format_value", "render_csv"]

log = logging.getLogger(__name__)


@dataclass
class ScenarioResult:
    header: list[str]
    rows: list[list]
    stats: dict


@dataclass
class RunResult:
    scenario: str
    seed: int
    output: Path
    replicas: list[ScenarioResult]

    def summary(self) -> str:
        stats = " ".join(f"{k}={format_value(v, short=True)}" for k, v in self.replicas[0].stats.items())
        return f"{self.scenario} seed={self.seed} replicas={len(self.replicas)} out={self.output} {stats}".rstrip()


def format_value(v, short: bool = False) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".6g" if short else ".17g")
    return str(v)


def render_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _update(config: ScenarioConfig, seed: int) -> ScenarioResult:
    block = config.update
    spec = config.variance_spec()
    sigma = spec.sigma_eps_sq
    belief = config.prior_belief()
    rows = [[0, None, None, belief.mean, belief.variance]]
    rng = np.random.default_rng(seed)

    def step(b: GaussianBelief, s: float, a) -> GaussianBelief:
        if isinstance(spec, Constant):
            return update_constant(b, s, sigma)
        if isinstance(spec, InverseCount):
            return update_count(b, s, a, sigma)
        return update_mass(b, s, a, sigma)

    if block.signals is not None:
        actions = block.actions or [1] * len(block.signals)
        for t, (a, s) in enumerate(zip(actions, block.signals), start=1):
            a = as_count(a) if not isinstance(spec, InverseMass) else a
            belief = step(belief, s, a)
            rows.append([t, a, s, belief.mean, belief.variance])
    else:
        truth = block.true_state
        for t, a in enumerate(block.actions, start=1):
            if isinstance(spec, InverseCount):
                a = as_count(a)
                if a == 0:
                    s = None
                else:
                    raw = [sample_signal(truth, 1, Constant(sigma), rng) for _ in range(a)]
                    s = aggregate_signals(raw)
            elif math.isinf(noise_variance(spec, truth, a)):
                s = None
            else:
                s = sample_signal(truth, a, spec, rng)
            if s is not None:
                belief = step(belief, s, a)
            rows.append([t, a, s, belief.mean, belief.variance])
    return ScenarioResult(["step", "action", "signal", "mean", "variance"], rows, {"mean": belief.mean, "variance": belief.variance})


def _grid(config: ScenarioConfig, seed: int) -> ScenarioResult:
    block = config.curves
    prior = config.prior_belief()
    f = config.state_function()
    curves = posterior_curves(prior, f, block.signals, config.grid.spec())
    rows = []
    stats = {}
    for i, (s, post) in enumerate(curves):
        rows.extend([s, a, d] for a, d in zip(post.nodes, post.density))
        mean, var = posterior_moments(post)
        stats[f"mean[{s:g}]"] = mean
        stats[f"var[{s:g}]"] = var
        if block.mh_samples:
            mh = mh_sample(prior, s, f, block.mh_samples, block.proposal_scale, derive_replica_seed(seed, i))
            stats[f"mh_mean[{s:g}]"] = mh.mean()
            stats[f"mh_var[{s:g}]"] = mh.variance()
            stats[f"mh_accept[{s:g}]"] = mh.acceptance_rate
    return ScenarioResult(["signal", "a_star", "density"], rows, stats)


def _regimes(config: ScenarioConfig, seed: int) -> ScenarioResult:
    block = config.regimes
    model = regime_model(block)
    if block.initial is not None:
        initial = DiscreteBelief(model.states, block.initial)
    else:
        initial = DiscreteBelief.uniform(model.states)
    if block.steps is not None:
        idx, signals = simulate_regimes(model, initial, block.steps, np.random.default_rng(seed))
        truth = [float(model.states[j]) for j in idx]
    else:
        signals, truth = list(block.signals), [None] * len(block.signals)
    beliefs = regime_filter_run(initial, signals, model)
    n = model.states.size
    header = ["t", "signal", "true_state", "map_state"] + [f"p_{i}" for i in range(n)]
    rows = [[0, None, None, float(model.states[most_probable(initial)]), *initial.probs]]
    hits = 0
    for t, (s, x, b) in enumerate(zip(signals, truth, beliefs), start=1):
        guess = float(model.states[most_probable(b)])
        hits += guess == x
        rows.append([t, float(s), x, guess, *b.probs])
    stats = {"steps": len(signals)}
    if block.steps is not None:
        stats["accuracy"] = hits / len(signals)
    return ScenarioResult(header, rows, stats)


def _trap(config: ScenarioConfig, seed: int) -> ScenarioResult:
    block = config.trap
    cfg = TrapConfig(
        rho=block.rho,
        sigma_eps_sq=block.sigma_eps_sq,
        cutoff=block.cutoff,
        risk_weight=block.risk_weight,
        innovation_var=block.innovation_var,
        horizon=block.horizon,
    )
    prior = config.prior_belief()
    truth = prior.mean if block.true_state is None else block.true_state
    path = simulate_trap(initial_state(prior, truth, cfg), cfg, seed)
    rows = [[p.t, p.mass, p.belief.mean, p.belief.variance, p.true_state] for p in path]
    last = path[-1]
    stats = {
        "mean": last.belief.mean,
        "variance": last.belief.variance,
        "avg_mass": float(np.mean([p.mass for p in path])),
    }
    return ScenarioResult(["t", "mass", "mean", "variance", "true_state"], rows, stats)


def _bandit(config: ScenarioConfig, seed: int) -> ScenarioResult:
    block = config.bandit
    env = BanditEnv(block.base_output, block.targets, block.k)
    if block.priors is not None:
        priors = [p.belief() for p in block.priors]
    else:
        priors = [config.prior_belief()] * len(block.targets)
    grid = block.grid.spec() if block.grid is not None else None
    episode = run_bandit_episode(env, priors, block.steps, block.policy, grid, seed)
    header = ["step", "project", "action", "output", "signal", "mean", "variance", "identified"]
    rows = [[r.step, r.project, r.action, r.output, r.signal, r.mean, r.variance, r.identified] for r in episode.steps]
    stats = {}
    for j, b in enumerate(episode.beliefs):
        stats[f"mean[{j}]"] = b.mean
        stats[f"var[{j}]"] = b.variance
    return ScenarioResult(header, rows, stats)


_RUNNERS = {"update": _update, "grid": _grid, "regimes": _regimes, "trap": _trap, "bandit": _bandit}


def run_replica(config: ScenarioConfig, seed: int) -> ScenarioResult:
    return _RUNNERS[config.scenario](config, seed)


def run_scenario(
    config: ScenarioConfig,
    seed: int | None = None,
    out: str | Path | None = None,
    workers: int | None = None,
) -> RunResult:
    """Run every replica of ``config`` and write the merged CSV.

    ``seed``, ``out`` and ``workers`` override the config's values.
    """
    master = config.seed if seed is None else int(seed)
    path = Path(out if out is not None else config.output)
    workers = config.workers if workers is None else int(workers)
    seeds = [derive_replica_seed(master, i) for i in range(config.replicas)]
    log.info("running %s with %d replica(s) on %d worker(s)", config.scenario, len(seeds), workers)
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: run_replica(config, s), seeds))
    else:
        results = [run_replica(config, s) for s in seeds]

    header = results[0].header
    if len(results) > 1:
        header = ["replica"] + header
        rows = [[i] + row for i, res in enumerate(results) for row in res.rows]
    else:
        rows = results[0].rows
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(header, rows), encoding="utf-8", newline="")
    log.debug("wrote %d rows to %s", len(rows), path)
    return RunResult(config.scenario, master, path, results)
