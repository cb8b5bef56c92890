"""Command-line front end.

    htbandits run <config.json> [--out DIR] [--threads N]
    htbandits bounds <config.json>
    htbandits validate --a X --eta Y

`run` executes the configured batch and writes aggregate.csv, optionally
runs.csv, and a vector plot of mean regret with quantile bands. The default
worker count comes from the HTBANDITS_THREADS environment variable. Exit
codes: 0 success, 2 configuration/validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bounds import (
    GapProfile,
    dist_dependent_bound,
    minimax_constant_terms,
    minimax_lower_bound,
    minimax_upper_bound,
)
from .config import ExperimentConfig, load_config
from .errors import ConfigError
from .math_core import check_condition
from .simulator import AggregateStats, RegretTrace, run_batch

__all__ = ["main", "entry_point"]

THREADS_ENV_VAR = "HTBANDITS_THREADS"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _quantile_column(level: float) -> str:
    return f"q{round(level * 100):02d}"


def write_aggregate_csv(stats: AggregateStats, algorithms, path: Path) -> None:
    columns = ["algorithm", "t", "mean_regret"] + [
        _quantile_column(q) for q in stats.quantile_levels
    ]
    lines = [",".join(columns)]
    for alg in algorithms:
        mean = stats.mean[alg]
        qs = stats.quantiles[alg]
        for i, t in enumerate(stats.grid):
            row = [alg, str(int(t)), _fmt(mean[i])]
            row += [_fmt(qs[q][i]) for q in stats.quantile_levels]
            lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_runs_csv(traces: dict[str, list[RegretTrace]], algorithms, path: Path) -> None:
    lines = ["algorithm,run,t,cum_regret"]
    for alg in algorithms:
        for trace in traces[alg]:
            for t, value in zip(trace.grid, trace.cum_regret):
                lines.append(f"{alg},{trace.run_index},{int(t)},{_fmt(value)}")
    path.write_text("\n".join(lines) + "\n")


def write_plot(stats: AggregateStats, algorithms, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(algorithms)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(6.0 * ncols, 4.0 * nrows), squeeze=False, sharex=True
    )
    lo_q = min(stats.quantile_levels)
    hi_q = max(stats.quantile_levels)
    mid_levels = [q for q in stats.quantile_levels if q not in (lo_q, hi_q)]
    for i, alg in enumerate(algorithms):
        ax = axes[i // ncols][i % ncols]
        grid = stats.grid
        ax.fill_between(
            grid,
            stats.quantiles[alg][lo_q],
            stats.quantiles[alg][hi_q],
            alpha=0.25,
            color="tab:blue",
            label=f"{_quantile_column(lo_q)}-{_quantile_column(hi_q)}",
        )
        for q in mid_levels:
            ax.plot(grid, stats.quantiles[alg][q], "--", lw=1.0, color="tab:blue")
        ax.plot(grid, stats.mean[alg], lw=2.0, color="tab:blue", label="mean")
        ax.set_xscale("log")
        ax.set_title(alg)
        ax.set_xlabel("t")
        ax.set_ylabel("cumulative regret")
        ax.legend(loc="upper left", fontsize=8)
    for j in range(n, nrows * ncols):
        axes[j // ncols][j % ncols].set_visible(False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _resolve_workers(arg_threads: int | None) -> int:
    if arg_threads is not None:
        value = arg_threads
    else:
        value = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if value < 1:
        raise ConfigError(f"thread count must be >= 1, got {value}")
    return value


def cmd_run(config_path: str, out_dir: str | None, threads: int | None) -> int:
    config = load_config(config_path)
    workers = _resolve_workers(threads)
    out = Path(out_dir) if out_dir is not None else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    stats, traces = run_batch(
        arms=config.arm_models(),
        algorithms=config.algorithms,
        params=config.problem_params(),
        runs=config.runs,
        master_seed=config.master_seed,
        quantile_levels=config.quantile_levels,
        grid_points=config.grid_points,
        workers=workers,
        keep_traces=config.save_runs,
    )

    write_aggregate_csv(stats, config.algorithms, out / "aggregate.csv")
    if traces is not None:
        write_runs_csv(traces, config.algorithms, out / "runs.csv")
    write_plot(stats, config.algorithms, out / "regret.svg")

    final = {alg: stats.mean[alg][-1] for alg in config.algorithms}
    print(f"wrote {out / 'aggregate.csv'}")
    if traces is not None:
        print(f"wrote {out / 'runs.csv'}")
    print(f"wrote {out / 'regret.svg'}")
    print(f"runs per algorithm: {config.runs}, horizon: {config.horizon}")
    for alg, value in final.items():
        print(f"  mean final regret  {alg:<22s} {_fmt(value)}")
    return 0


def cmd_bounds(config_path: str) -> int:
    config = load_config(config_path)
    params = config.problem_params()

    print(f"lower bound            {_fmt(minimax_lower_bound(params))}")
    t1, t2, t3 = minimax_constant_terms(params)
    print(f"worst-case upper bound {_fmt(minimax_upper_bound(params))}")
    print(f"  constant C = {_fmt(t1 + t2 + t3)} (terms {_fmt(t1)}, {_fmt(t2)}, {_fmt(t3)})")

    gaps = GapProfile.from_means(config.arm_means)
    result = dist_dependent_bound(gaps, params)
    print(f"gap-dependent bound    {_fmt(result.total)}")
    print(f"  C1 = {_fmt(result.c1)}, C2 = {_fmt(result.c2)}")
    for term in result.per_arm:
        flag = "  [log argument <= 1]" if term.log_argument <= 1.0 else ""
        print(
            f"  gap {_fmt(term.gap):>12s}: term {_fmt(term.value)} "
            f"(log argument {_fmt(term.log_argument)}){flag}"
        )
    if result.small_log_warning:
        print("warning: some log argument <= 1; those terms are reported unclamped")
    return 0


def cmd_validate(a: float, eta: float) -> int:
    if a <= 1.0:
        raise ConfigError(f"--a must be > 1, got {a:g}")
    if eta <= 0.0:
        raise ConfigError(f"--eta must be > 0, got {eta:g}")
    check = check_condition(a, eta)
    print(f"eta*psi(2*eta/a) = {_fmt(check.lhs)}")
    print(f"2*a              = {_fmt(check.rhs)}")
    if check.ok:
        print("condition eta*psi(2*eta/a) >= 2*a holds")
        return 0
    print("condition eta*psi(2*eta/a) >= 2*a FAILS")
    print(
        "hint: keep a slightly above 1 and raise eta until eta*psi(2*eta/a) "
        "reaches 2*a; the default pair (a=1.1, eta=2.2) satisfies it"
    )
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="htbandits",
        description="Heavy-tailed bandit simulations, policies and regret bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment batch")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--out", default=None, help="output directory (overrides config)")
    p_run.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"worker processes (default: ${THREADS_ENV_VAR} or 1)",
    )

    p_bounds = sub.add_parser("bounds", help="print regret bounds for a config")
    p_bounds.add_argument("config", help="path to a JSON experiment config")

    p_val = sub.add_parser("validate", help="check the (a, eta) validity condition")
    p_val.add_argument("--a", type=float, required=True, help="grid base a > 1")
    p_val.add_argument("--eta", type=float, required=True, help="inflation eta > 0")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out, args.threads)
        if args.command == "bounds":
            return cmd_bounds(args.config)
        return cmd_validate(args.a, args.eta)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    raise SystemExit(main())
