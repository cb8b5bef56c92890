"""Arm-selection policies behind one interface: select_arm / update / index.

All four policies pull each arm once during rounds 1..K (ascending order) and
afterwards pull the arm with the largest index, breaking ties by lowest arm
number. Arms are numbered 0..K-1; time t is 1-based.
"""

from __future__ import annotations

import math

from .errors import ConfigError, HorizonExceededError, InvalidParamsError
from .estimators import (
    CatoniTracker,
    RunningMean,
    SaturatedMeanEstimator,
    TruncatedMeanTracker,
)
from .math_core import ProblemParams, conf_radius, validate_params

__all__ = [
    "POLICY_KINDS",
    "robust_moss_index",
    "moss_index",
    "robust_ucb_index",
    "RobustMossPolicy",
    "MossPolicy",
    "RobustUcbTruncatedPolicy",
    "RobustUcbCatoniPolicy",
    "make_policy",
]

POLICY_KINDS = ("robust_moss", "moss", "robust_ucb_truncated", "robust_ucb_catoni")


def robust_moss_index(est: SaturatedMeanEstimator, params: ProblemParams) -> float:
    """Saturated mean plus inflated radius: mu_hat + (1 + eta) * c_n."""
    n = est.count
    if n < 1:
        raise ValueError("index undefined for an unpulled arm")
    return est.value() + (1.0 + params.inflation) * conf_radius(n, params)


def moss_index(est: RunningMean, params: ProblemParams) -> float:
    """Empirical mean plus sqrt(max(ln(T / (K n)), 0) / n).

    The radius floors the log at 0, unlike the saturated-mean policy which
    floors it at 1; both are kept verbatim.
    """
    n = est.count
    if n < 1:
        raise ValueError("index undefined for an unpulled arm")
    log_term = math.log(params.horizon / (params.num_arms * n))
    return est.value() + math.sqrt(max(log_term, 0.0) / n)


def _truncated_radius(n: int, t: int, params: ProblemParams) -> float:
    return 4.0 * params.moment_scale * (2.0 * math.log(t) / n) ** (
        params.eps / (1.0 + params.eps)
    )


def _catoni_radius(n: int, t: int, params: ProblemParams) -> float:
    level = 2.0 * math.log(t)
    return math.sqrt(2.0 * params.moment_scale**2 * level / (n - 2.0 * level))


def robust_ucb_index(
    est: TruncatedMeanTracker | CatoniTracker, t: int, params: ProblemParams
) -> float:
    """Robust estimate plus deviation radius at confidence delta = t^-2."""
    if t < 2:
        raise ValueError(f"robust UCB index needs t >= 2, got {t}")
    if est.count < 1:
        raise ValueError("index undefined for an unpulled arm")
    if isinstance(est, TruncatedMeanTracker):
        return est.estimate(t) + _truncated_radius(est.count, t, params)
    if params.eps != 1.0:
        raise ConfigError(
            f"the Catoni variant requires eps = 1 (finite variance), got eps={params.eps}"
        )
    return est.estimate(t) + _catoni_radius(est.count, t, params)


class _Policy:
    """Shared bookkeeping: initialization sweep, argmax selection, counts."""

    kind: str = ""

    def __init__(self, params: ProblemParams) -> None:
        self.params = params
        self.t = 1
        self.pull_counts = [0] * params.num_arms

    def _index(self, arm: int) -> float:
        raise NotImplementedError

    def _absorb(self, arm: int, reward: float) -> None:
        raise NotImplementedError

    def index(self, arm: int) -> float:
        return self._index(arm)

    def select_arm(self) -> int:
        if self.t > self.params.horizon:
            raise HorizonExceededError(
                f"horizon {self.params.horizon} exhausted at t={self.t}"
            )
        if self.t <= self.params.num_arms:
            return self.t - 1
        best_arm = 0
        best = -math.inf
        for arm in range(self.params.num_arms):
            value = self._index(arm)
            if value > best:
                best = value
                best_arm = arm
        return best_arm

    def update(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.params.num_arms:
            raise ValueError(f"arm {arm} out of range [0, {self.params.num_arms})")
        self._absorb(arm, reward)
        self.pull_counts[arm] += 1
        self.t += 1


class RobustMossPolicy(_Policy):
    """Horizon-aware UCB over the saturated empirical mean.

    Construction is rejected unless eta * psi(2 * eta / a) >= 2 * a holds.
    """

    kind = "robust_moss"

    def __init__(self, params: ProblemParams) -> None:
        check = validate_params(params)
        if not check:
            raise InvalidParamsError(
                "parameter condition eta*psi(2*eta/a) >= 2*a violated: "
                f"{check.lhs:.6g} < {check.rhs:.6g}"
            )
        super().__init__(params)
        self.arms = [SaturatedMeanEstimator(params) for _ in range(params.num_arms)]

    def _index(self, arm: int) -> float:
        return robust_moss_index(self.arms[arm], self.params)

    def _absorb(self, arm: int, reward: float) -> None:
        self.arms[arm].update(reward)


class MossPolicy(_Policy):
    """Horizon-aware UCB over the plain empirical mean (no saturation)."""

    kind = "moss"

    def __init__(self, params: ProblemParams) -> None:
        super().__init__(params)
        self.arms = [RunningMean() for _ in range(params.num_arms)]

    def _index(self, arm: int) -> float:
        return moss_index(self.arms[arm], self.params)

    def _absorb(self, arm: int, reward: float) -> None:
        self.arms[arm].update(reward)


class RobustUcbTruncatedPolicy(_Policy):
    """Robust UCB with the index-wise truncated mean, delta = t^-2."""

    kind = "robust_ucb_truncated"

    def __init__(self, params: ProblemParams) -> None:
        super().__init__(params)
        self.arms = [TruncatedMeanTracker(params) for _ in range(params.num_arms)]

    def _index(self, arm: int) -> float:
        return robust_ucb_index(self.arms[arm], self.t, self.params)

    def _absorb(self, arm: int, reward: float) -> None:
        self.arms[arm].update(reward)


class RobustUcbCatoniPolicy(_Policy):
    """Robust UCB with Catoni's M-estimator, delta = t^-2, v = u^2.

    The estimator is undefined until n > 2 ln(1/delta); an arm in that state
    gets an infinite index, which forces the policy to keep sampling it.
    """

    kind = "robust_ucb_catoni"

    def __init__(self, params: ProblemParams) -> None:
        if params.eps != 1.0:
            raise ConfigError(
                f"the Catoni variant requires eps = 1 (finite variance), got eps={params.eps}"
            )
        super().__init__(params)
        self.arms = [CatoniTracker(params) for _ in range(params.num_arms)]

    def _index(self, arm: int) -> float:
        tracker = self.arms[arm]
        if not tracker.is_defined(self.t):
            return math.inf
        return robust_ucb_index(tracker, self.t, self.params)

    def _absorb(self, arm: int, reward: float) -> None:
        self.arms[arm].update(reward)


_POLICY_CLASSES = {
    cls.kind: cls
    for cls in (
        RobustMossPolicy,
        MossPolicy,
        RobustUcbTruncatedPolicy,
        RobustUcbCatoniPolicy,
    )
}


def make_policy(kind: str, params: ProblemParams) -> _Policy:
    try:
        cls = _POLICY_CLASSES[kind]
    except KeyError:
        raise ConfigError(
            f"unknown policy kind {kind!r}; expected one of {POLICY_KINDS}"
        ) from None
    return cls(params)
