import numpy as np
import pytest

from htbandits import ArmModel, GpdNoise, ProblemParams

# Benchmark setting used throughout: 3 arms, symmetric generalized-Pareto
# noise with shape 0.33 / scale 0.32, moment bound u = 1 at eps = 1, and the
# (a, eta) = (1.1, 2.2) schedule.
BENCH_MEANS = (-0.3, 0.0, 0.3)
BENCH_NOISE = GpdNoise(shape=0.33, scale=0.32)
DEFAULT_MASTER_SEED = 0


def bench_params(horizon: int) -> ProblemParams:
    return ProblemParams(
        horizon=horizon,
        num_arms=len(BENCH_MEANS),
        moment_scale=1.0,
        eps=1.0,
        grid_base=1.1,
        inflation=2.2,
    )


def bench_arms() -> tuple[ArmModel, ...]:
    return tuple(ArmModel(mean=m, noise=BENCH_NOISE) for m in BENCH_MEANS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
