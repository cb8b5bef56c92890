"""Experiment configuration: JSON schema, loading and validation.

A config file is a JSON object with explicit keys (no positional anything):

{
  "algorithms": ["robust_moss", "moss", "robust_ucb_truncated", "robust_ucb_catoni"],
  "horizon": 100000,
  "arm_means": [-0.3, 0.0, 0.3],
  "noise": {"kind": "gpd_symmetric", "shape": 0.33, "scale": 0.32},
  "moment_scale": 1.0,
  "moment_order_eps": 1.0,
  "grid_base": 1.1,
  "inflation": 2.2,
  "runs": 200,
  "master_seed": 20240,
  "quantile_levels": [0.05, 0.5, 0.95],
  "grid_points": 200,
  "output_dir": "results",
  "save_runs": false
}

`noise.kind` is one of "gpd_symmetric" (keys shape, scale), "none", or
"bounded_uniform" (key half_width). The number of arms is the length of
`arm_means`. Every arm must satisfy the moment bound with the configured
moment_scale, and robust_moss additionally requires the (grid_base,
inflation) validity condition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .environments import (
    ArmModel,
    BoundedUniformNoise,
    GpdNoise,
    NoiseSpec,
    NoNoise,
    moment_bound_check,
)
from .errors import ConfigError, MomentDivergenceError
from .math_core import ProblemParams, validate_params
from .policies import POLICY_KINDS
from .simulator import DEFAULT_GRID_POINTS, DEFAULT_QUANTILES

__all__ = ["ExperimentConfig", "load_config", "parse_config"]

_REQUIRED_KEYS = {
    "algorithms",
    "horizon",
    "arm_means",
    "noise",
    "moment_scale",
    "moment_order_eps",
    "grid_base",
    "inflation",
    "runs",
    "master_seed",
}
_OPTIONAL_KEYS = {"quantile_levels", "grid_points", "output_dir", "save_runs"}


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[str, ...]
    horizon: int
    arm_means: tuple[float, ...]
    noise: NoiseSpec
    moment_scale: float
    moment_order_eps: float
    grid_base: float
    inflation: float
    runs: int
    master_seed: int
    quantile_levels: tuple[float, ...] = DEFAULT_QUANTILES
    grid_points: int = DEFAULT_GRID_POINTS
    output_dir: str = "results"
    save_runs: bool = False

    @property
    def num_arms(self) -> int:
        return len(self.arm_means)

    def problem_params(self) -> ProblemParams:
        try:
            return ProblemParams(
                horizon=self.horizon,
                num_arms=self.num_arms,
                moment_scale=self.moment_scale,
                eps=self.moment_order_eps,
                grid_base=self.grid_base,
                inflation=self.inflation,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def arm_models(self) -> tuple[ArmModel, ...]:
        return tuple(ArmModel(mean=m, noise=self.noise) for m in self.arm_means)


def _parse_noise(raw: object) -> NoiseSpec:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("noise must be an object with a 'kind' key")
    kind = raw["kind"]
    try:
        if kind == "gpd_symmetric":
            return GpdNoise(shape=float(raw["shape"]), scale=float(raw["scale"]))
        if kind == "none":
            return NoNoise()
        if kind == "bounded_uniform":
            return BoundedUniformNoise(half_width=float(raw["half_width"]))
    except KeyError as exc:
        raise ConfigError(f"noise kind {kind!r} is missing key {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"invalid noise parameters: {exc}") from None
    raise ConfigError(
        f"unknown noise kind {kind!r}; expected gpd_symmetric, none or bounded_uniform"
    )


def parse_config(raw: dict) -> ExperimentConfig:
    """Build and fully validate a config from a parsed JSON object."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    keys = set(raw)
    missing = _REQUIRED_KEYS - keys
    if missing:
        raise ConfigError(f"config is missing required keys: {sorted(missing)}")
    unknown = keys - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise ConfigError(f"config has unknown keys: {sorted(unknown)}")

    algorithms = tuple(raw["algorithms"])
    if not algorithms:
        raise ConfigError("algorithms must not be empty")
    for alg in algorithms:
        if alg not in POLICY_KINDS:
            raise ConfigError(
                f"unknown algorithm {alg!r}; expected a subset of {POLICY_KINDS}"
            )
    if len(set(algorithms)) != len(algorithms):
        raise ConfigError("algorithms must not repeat")

    config = ExperimentConfig(
        algorithms=algorithms,
        horizon=int(raw["horizon"]),
        arm_means=tuple(float(m) for m in raw["arm_means"]),
        noise=_parse_noise(raw["noise"]),
        moment_scale=float(raw["moment_scale"]),
        moment_order_eps=float(raw["moment_order_eps"]),
        grid_base=float(raw["grid_base"]),
        inflation=float(raw["inflation"]),
        runs=int(raw["runs"]),
        master_seed=int(raw["master_seed"]),
        quantile_levels=tuple(
            float(q) for q in raw.get("quantile_levels", DEFAULT_QUANTILES)
        ),
        grid_points=int(raw.get("grid_points", DEFAULT_GRID_POINTS)),
        output_dir=str(raw.get("output_dir", "results")),
        save_runs=bool(raw.get("save_runs", False)),
    )
    _validate(config)
    return config


def _validate(config: ExperimentConfig) -> None:
    params = config.problem_params()  # structural invariants

    if config.runs < 1:
        raise ConfigError(f"runs must be >= 1, got {config.runs}")
    if config.master_seed < 0:
        raise ConfigError(f"master_seed must be >= 0, got {config.master_seed}")
    if config.grid_points < 2:
        raise ConfigError(f"grid_points must be >= 2, got {config.grid_points}")
    if any(not 0.0 < q < 1.0 for q in config.quantile_levels):
        raise ConfigError(
            f"quantile_levels must lie in (0, 1), got {config.quantile_levels}"
        )

    for arm_index, model in enumerate(config.arm_models()):
        try:
            needed = moment_bound_check(model, config.moment_order_eps)
        except MomentDivergenceError as exc:
            raise ConfigError(f"arm {arm_index}: {exc}") from None
        if needed > config.moment_scale * (1.0 + 1e-9):
            raise ConfigError(
                f"arm {arm_index} violates the moment bound: needs moment_scale >= "
                f"{needed:.6g} but config has {config.moment_scale:g}"
            )

    if "robust_moss" in config.algorithms:
        check = validate_params(params)
        if not check:
            raise ConfigError(
                "robust_moss requires eta*psi(2*eta/a) >= 2*a; got "
                f"{check.lhs:.6g} < {check.rhs:.6g} "
                f"(grid_base={config.grid_base:g}, inflation={config.inflation:g})"
            )
    if "robust_ucb_catoni" in config.algorithms and config.moment_order_eps != 1.0:
        raise ConfigError(
            "robust_ucb_catoni requires moment_order_eps = 1, got "
            f"{config.moment_order_eps:g}"
        )


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return parse_config(raw)
