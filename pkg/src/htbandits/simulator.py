"""Deterministic batch simulation and cross-run aggregation.

Each run is an independent select/sample/update loop; run r of a batch draws
its rewards from a stream seeded by (master_seed, r), so results do not
depend on execution order or on how many worker processes are used. Regret
is pseudo-regret: the gap of the chosen arm accumulates, reward noise does
not.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .environments import ArmModel, RngStream, sample_reward
from .errors import ConfigError
from .math_core import ProblemParams
from .policies import make_policy

__all__ = [
    "RegretTrace",
    "AggregateStats",
    "recording_grid",
    "run_single",
    "aggregate",
    "run_batch",
]

DEFAULT_GRID_POINTS = 200
DEFAULT_QUANTILES = (0.05, 0.5, 0.95)


@dataclass(frozen=True)
class RegretTrace:
    """Cumulative pseudo-regret of one run, sampled on a recording grid."""

    run_index: int
    grid: np.ndarray
    cum_regret: np.ndarray


@dataclass(frozen=True)
class AggregateStats:
    """Per-algorithm mean and nearest-rank quantiles across runs."""

    grid: np.ndarray
    run_count: int
    quantile_levels: tuple[float, ...]
    mean: dict[str, np.ndarray]
    quantiles: dict[str, dict[float, np.ndarray]]


def recording_grid(horizon: int, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Roughly geometric grid of distinct integers from 1 to horizon inclusive."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if points < 2:
        raise ValueError(f"grid needs at least 2 points, got {points}")
    if horizon <= points:
        return np.arange(1, horizon + 1, dtype=np.int64)
    raw = np.geomspace(1.0, float(horizon), num=points)
    grid = np.unique(np.rint(raw).astype(np.int64))
    if grid[-1] != horizon:
        grid = np.append(grid, np.int64(horizon))
    return grid


def run_single(
    arms: Sequence[ArmModel],
    policy_kind: str,
    params: ProblemParams,
    master_seed: int,
    run_index: int,
    grid: np.ndarray | None = None,
) -> RegretTrace:
    """One full run of `policy_kind` against `arms` for `params.horizon` steps."""
    if len(arms) != params.num_arms:
        raise ConfigError(
            f"params.num_arms={params.num_arms} but {len(arms)} arm models given"
        )
    policy = make_policy(policy_kind, params)
    if grid is None:
        grid = recording_grid(params.horizon)

    rng = RngStream(master_seed, run_index)
    best = max(model.mean for model in arms)
    gaps = [best - model.mean for model in arms]

    cum = 0.0
    out = np.empty(grid.shape[0], dtype=np.float64)
    next_record = int(grid[0])
    gi = 0
    for t in range(1, params.horizon + 1):
        arm = policy.select_arm()
        reward = sample_reward(arms[arm], rng)
        policy.update(arm, reward)
        cum += gaps[arm]
        if t == next_record:
            out[gi] = cum
            gi += 1
            next_record = int(grid[gi]) if gi < grid.shape[0] else 0
    return RegretTrace(run_index=run_index, grid=grid, cum_regret=out)


def _nearest_rank_row(level: float, run_count: int) -> int:
    return max(math.ceil(level * run_count), 1) - 1


def aggregate(
    traces: Mapping[str, Sequence[RegretTrace]],
    quantile_levels: Sequence[float] = DEFAULT_QUANTILES,
) -> AggregateStats:
    """Pointwise mean and nearest-rank quantiles (the ceil(q R)-th order statistic)."""
    if not traces:
        raise ValueError("no traces to aggregate")
    levels = tuple(quantile_levels)
    if any(not 0.0 < q < 1.0 for q in levels):
        raise ValueError(f"quantile levels must lie in (0, 1), got {levels}")

    first = next(iter(traces.values()))[0]
    grid = first.grid
    run_count = None
    mean: dict[str, np.ndarray] = {}
    quantiles: dict[str, dict[float, np.ndarray]] = {}
    for alg, runs in traces.items():
        if run_count is None:
            run_count = len(runs)
        elif len(runs) != run_count:
            raise ValueError("all algorithms must have the same number of runs")
        for trace in runs:
            if trace.grid.shape != grid.shape or np.any(trace.grid != grid):
                raise ValueError("all traces must share one recording grid")
        stacked = np.vstack([trace.cum_regret for trace in runs])
        mean[alg] = stacked.mean(axis=0)
        ordered = np.sort(stacked, axis=0)
        quantiles[alg] = {
            q: ordered[_nearest_rank_row(q, run_count)].copy() for q in levels
        }
    return AggregateStats(
        grid=grid,
        run_count=run_count,
        quantile_levels=levels,
        mean=mean,
        quantiles=quantiles,
    )


def _run_spec(args) -> RegretTrace:
    arms, kind, params, master_seed, run_index, grid = args
    return run_single(arms, kind, params, master_seed, run_index, grid)


def run_batch(
    arms: Sequence[ArmModel],
    algorithms: Sequence[str],
    params: ProblemParams,
    runs: int,
    master_seed: int,
    quantile_levels: Sequence[float] = DEFAULT_QUANTILES,
    grid_points: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
    keep_traces: bool = False,
) -> tuple[AggregateStats, dict[str, list[RegretTrace]] | None]:
    """R independent runs of each algorithm; run r is seeded by (master_seed, r).

    Execution may fan out across `workers` processes; the aggregate (and any
    kept traces) are identical to a sequential execution. Any failing run
    aborts the whole batch.
    """
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    grid = recording_grid(params.horizon, grid_points)
    arms = tuple(arms)

    traces: dict[str, list[RegretTrace]] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for alg in algorithms:
                specs = [(arms, alg, params, master_seed, r, grid) for r in range(runs)]
                traces[alg] = list(pool.map(_run_spec, specs))
    else:
        for alg in algorithms:
            traces[alg] = [
                run_single(arms, alg, params, master_seed, r, grid) for r in range(runs)
            ]
    stats = aggregate(traces, quantile_levels)
    return stats, (traces if keep_traces else None)
