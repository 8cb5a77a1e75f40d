"""Scenario configuration: a strict JSON schema built on pydantic.

Unknown keys are rejected everywhere. Errors come back as
:class:`~varsig.errors.ValidationError` carrying dotted field paths such as
``prior.variance`` or ``trap.rho``.

Layout (only the block named after the scenario may appear)::

    {
      "scenario": "update" | "grid" | "regimes" | "trap" | "bandit",
      "seed": 0, "output": "out.csv", "replicas": 1, "workers": 1,
      "prior": {"mean": 0.0, "variance": 1.0},
      "variance": {"kind": "constant", "sigma_eps_sq": 1.0},   # update, grid
      "grid": {"lo": -8.0, "hi": 8.0, "n_nodes": 4001},        # defaults from prior
      "update": {...} | "curves": {...} | "regimes": {...} | "trap": {...} | "bandit": {...}
    }
"""

from __future__ import annotations

import json
from typing import Annotated, Literal, Optional, Union

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core import Constant, GaussianBelief, InverseCount, InverseMass, StateFunction, VarianceFunction
from .errors import DomainError, ParseError, ValidationError
from .posterior import DEFAULT_NODES, DEFAULT_WIDTH, GridSpec, default_grid

__all__ = ["ScenarioConfig", "parse_config", "SCENARIOS"]

SCENARIOS = ("update", "grid", "regimes", "trap", "bandit")

# Which block each scenario reads; "grid" reads the "curves" block.
_BLOCKS = {"update": "update", "grid": "curves", "regimes": "regimes", "trap": "trap", "bandit": "bandit"}


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class PriorBlock(Strict):
    mean: FiniteFloat
    variance: PositiveFloat

    def belief(self) -> GaussianBelief:
        return GaussianBelief(self.mean, self.variance)


class ConstantVariance(Strict):
    kind: Literal["constant"]
    sigma_eps_sq: PositiveFloat


class InverseCountVariance(Strict):
    kind: Literal["inverse_count"]
    sigma_eps_sq: PositiveFloat


class InverseMassVariance(Strict):
    kind: Literal["inverse_mass"]
    sigma_eps_sq: PositiveFloat


class FunctionBlock(Strict):
    name: Literal["square", "square_plus", "abs", "const"]
    c: Annotated[float, Field(ge=0, allow_inf_nan=False)] = 0.0

    def function(self) -> VarianceFunction:
        return VarianceFunction(self.name, self.c)


class StateFunctionVariance(Strict):
    kind: Literal["state_function"]
    function: FunctionBlock


VarianceBlock = Annotated[
    Union[ConstantVariance, InverseCountVariance, InverseMassVariance, StateFunctionVariance],
    Field(discriminator="kind"),
]
_VARIANCE_TAGS = {"constant", "inverse_count", "inverse_mass", "state_function"}


class GridBlock(Strict):
    lo: FiniteFloat
    hi: FiniteFloat
    n_nodes: Annotated[int, Field(ge=3)] = DEFAULT_NODES

    @model_validator(mode="after")
    def _check(self):
        if self.lo >= self.hi:
            raise ValueError("lo must be < hi")
        if self.n_nodes % 2 == 0:
            raise ValueError("n_nodes must be odd")
        return self

    def spec(self) -> GridSpec:
        return GridSpec(self.lo, self.hi, self.n_nodes)


class UpdateBlock(Strict):
    signals: Optional[list[FiniteFloat]] = None
    actions: Optional[list[Annotated[float, Field(ge=0, allow_inf_nan=False)]]] = None
    true_state: Optional[FiniteFloat] = None

    @model_validator(mode="after")
    def _check(self):
        if self.signals is None:
            if self.true_state is None or self.actions is None:
                raise ValueError("without signals, both true_state and actions are required")
        elif self.actions is not None and len(self.actions) != len(self.signals):
            raise ValueError("actions and signals must have equal length")
        if not (self.signals or self.actions):
            raise ValueError("need at least one signal or action")
        return self


class CurvesBlock(Strict):
    signals: Annotated[list[FiniteFloat], Field(min_length=1)] = [-2.0, -1.0, 1.0, 2.0]
    mh_samples: Annotated[int, Field(ge=0)] = 0
    proposal_scale: Optional[PositiveFloat] = None


class RegimesBlock(Strict):
    states: Annotated[list[FiniteFloat], Field(min_length=1)]
    variances: Optional[list[Annotated[float, Field(ge=0, allow_inf_nan=False)]]] = None
    function: Optional[FunctionBlock] = None
    transition: Optional[list[list[Annotated[float, Field(ge=0, allow_inf_nan=False)]]]] = None
    stay: Optional[Annotated[float, Field(ge=0, le=1)]] = None
    initial: Optional[list[Annotated[float, Field(ge=0, allow_inf_nan=False)]]] = None
    signals: Optional[list[FiniteFloat]] = None
    steps: Optional[Annotated[int, Field(ge=1)]] = None

    @model_validator(mode="after")
    def _check(self):
        if (self.variances is None) == (self.function is None):
            raise ValueError("give exactly one of variances or function")
        if (self.transition is None) == (self.stay is None):
            raise ValueError("give exactly one of transition or stay")
        if (self.signals is None) == (self.steps is None):
            raise ValueError("give exactly one of signals or steps")
        n = len(self.states)
        if self.variances is not None and len(self.variances) != n:
            raise ValueError("variances must match states in length")
        if self.initial is not None and len(self.initial) != n:
            raise ValueError("initial must match states in length")
        return self


class TrapBlock(Strict):
    rho: Annotated[float, Field(gt=0, lt=1)]
    sigma_eps_sq: PositiveFloat
    horizon: Annotated[int, Field(ge=1)]
    innovation_var: Annotated[float, Field(ge=0, allow_inf_nan=False)] = 0.0
    cutoff: FiniteFloat = 0.0
    risk_weight: Annotated[float, Field(ge=0, allow_inf_nan=False)] = 1.0
    true_state: Optional[FiniteFloat] = None


class BanditBlock(Strict):
    base_output: FiniteFloat
    targets: Annotated[list[FiniteFloat], Field(min_length=1)]
    steps: Annotated[int, Field(ge=1)]
    k: PositiveFloat = 1.0
    policy: Literal["greedy", "round_robin"] = "greedy"
    priors: Optional[list[PriorBlock]] = None
    grid: Optional[GridBlock] = None

    @model_validator(mode="after")
    def _check(self):
        if self.priors is not None and len(self.priors) != len(self.targets):
            raise ValueError("priors must match targets in length")
        return self


class ScenarioConfig(Strict):
    scenario: Literal["update", "grid", "regimes", "trap", "bandit"]
    prior: PriorBlock
    seed: Annotated[int, Field(ge=0, le=2**64 - 1)] = 0
    output: Optional[str] = None
    replicas: Annotated[int, Field(ge=1)] = 1
    workers: Annotated[int, Field(ge=1)] = 1
    variance: Optional[VarianceBlock] = None
    grid: Optional[GridBlock] = None
    update: Optional[UpdateBlock] = None
    curves: Optional[CurvesBlock] = None
    regimes: Optional[RegimesBlock] = None
    trap: Optional[TrapBlock] = None
    bandit: Optional[BanditBlock] = None

    @model_validator(mode="after")
    def _check(self):
        wanted = _BLOCKS[self.scenario]
        for block in _BLOCKS.values():
            present = getattr(self, block) is not None
            if block == wanted and not present and block != "curves":
                raise _FieldError(block, f"block required by scenario {self.scenario!r}")
            if block != wanted and present:
                raise _FieldError(block, f"block not used by scenario {self.scenario!r}")
        if self.scenario in ("update", "grid"):
            if self.variance is None:
                raise _FieldError("variance", f"required by scenario {self.scenario!r}")
            allowed = {"update": {"constant", "inverse_count", "inverse_mass"}, "grid": {"constant", "state_function"}}
            if self.variance.kind not in allowed[self.scenario]:
                raise _FieldError("variance.kind", f"{self.variance.kind!r} not supported by scenario {self.scenario!r}")
        elif self.variance is not None:
            raise _FieldError("variance", f"not used by scenario {self.scenario!r}")
        if self.scenario == "update" and self.variance.kind == "inverse_mass" and self.update.actions:
            if any(a > 1 for a in self.update.actions):
                raise _FieldError("update.actions", "participation masses must lie in [0, 1]")
        if self.scenario == "update" and self.variance.kind in ("constant", "inverse_count") and self.update.actions:
            if any(not float(a).is_integer() for a in self.update.actions):
                raise _FieldError("update.actions", "signal counts must be integers")
        if self.scenario == "grid" and self.curves is None:
            object.__setattr__(self, "curves", CurvesBlock())
        if self.grid is None:
            g = default_grid(self.prior.belief(), DEFAULT_WIDTH, DEFAULT_NODES)
            object.__setattr__(self, "grid", GridBlock(lo=g.lo, hi=g.hi, n_nodes=g.n_nodes))
        if self.output is None:
            object.__setattr__(self, "output", f"{self.scenario}.csv")
        if self.scenario == "regimes":
            _check_regimes(self.regimes)
        return self

    # Domain-object accessors

    def prior_belief(self) -> GaussianBelief:
        return self.prior.belief()

    def variance_spec(self):
        v = self.variance
        if v is None:
            return None
        if v.kind == "constant":
            return Constant(v.sigma_eps_sq)
        if v.kind == "inverse_count":
            return InverseCount(v.sigma_eps_sq)
        if v.kind == "inverse_mass":
            return InverseMass(v.sigma_eps_sq)
        return StateFunction(v.function.function())

    def state_function(self) -> VarianceFunction:
        """The ``f`` used by the grid scenario; a constant variance becomes ``const``."""
        v = self.variance
        if v.kind == "constant":
            return VarianceFunction("const", v.sigma_eps_sq)
        return v.function.function()


class _FieldError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(message)
        self.path = path
        self.message = message


def _check_regimes(block: RegimesBlock):
    from .regimes import DiscreteBelief

    try:
        model = regime_model(block)
    except DomainError as exc:
        raise _FieldError("regimes", exc.message) from None
    if block.initial is not None:
        try:
            DiscreteBelief(model.states, block.initial)
        except DomainError as exc:
            raise _FieldError("regimes.initial", exc.message) from None
    return model


def regime_model(block: RegimesBlock):
    from .regimes import RegimeModel

    if block.function is not None:
        variances = block.function.function().evaluate(np.asarray(block.states, dtype=float))
    else:
        variances = block.variances
    if block.stay is not None:
        return RegimeModel.persistent(block.states, variances, block.stay)
    return RegimeModel(block.states, variances, block.transition)


def _format_loc(loc) -> str:
    parts: list[str] = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        elif item in _VARIANCE_TAGS and parts and parts[-1] == "variance":
            continue
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def _convert(exc: pydantic.ValidationError) -> ValidationError:
    errors = []
    for err in exc.errors():
        loc = _format_loc(err["loc"])
        ctx_err = (err.get("ctx") or {}).get("error")
        if isinstance(ctx_err, _FieldError):
            errors.append((f"{loc}.{ctx_err.path}" if loc else ctx_err.path, ctx_err.message))
        elif err["type"] == "extra_forbidden":
            errors.append((loc, "unknown key"))
        else:
            msg = err["msg"]
            if msg.startswith("Value error, "):
                msg = msg[len("Value error, "):]
            errors.append((loc, msg))
    return ValidationError(errors)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a JSON scenario document."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except (json.JSONDecodeError, ValueError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object")
    try:
        return ScenarioConfig.model_validate(data)
    except pydantic.ValidationError as exc:
        raise _convert(exc) from None


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def dump_config(config: ScenarioConfig) -> str:
    return config.model_dump_json(indent=2, exclude_none=True)

