"""Mean estimators: saturated empirical mean, truncated mean, Catoni's M-estimator.

The saturated empirical mean clamps every sample to +-B_m, where the
saturation level B_m grows with the pull count m through geometric blocks.
Because B_m changes when m crosses a block boundary, past samples have to be
re-clamped at the new level; the incremental estimator below keeps every raw
sample so it can rebuild its running sum at boundaries and stay O(1) between
them (boundaries are logarithmic in m, so total rebuild work is linear).
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Sequence

import numpy as np

from .errors import NotEnoughSamplesError
from .math_core import ProblemParams, saturation_point

__all__ = [
    "sat",
    "SaturatedMeanEstimator",
    "RunningMean",
    "truncated_mean",
    "catoni_mean",
    "TruncatedMeanTracker",
    "CatoniTracker",
]


def sat(x: float, b: float) -> float:
    """Sign-preserving clamp sign(x) * min(|x|, b)."""
    if b <= 0:
        raise ValueError(f"saturation level must be > 0, got {b}")
    return math.copysign(min(abs(x), b), x)


def _clamp(samples: np.ndarray, b: float) -> np.ndarray:
    return np.sign(samples) * np.minimum(np.abs(samples), b)


class SaturatedMeanEstimator:
    """Incremental saturated empirical mean for one arm.

    The running sum always equals the left-to-right fold of
    sat(x_i, B_m) over the samples seen so far, at the current level B_m,
    so prefix values agree exactly with a batch recomputation that sums in
    sample order.

    `saturation_fn` maps a pull count to a saturation level and defaults to
    the geometric-block schedule of `params`; tests inject alternatives
    (e.g. a constant +inf to recover the plain empirical mean).
    """

    __slots__ = (
        "params",
        "count",
        "saturation",
        "saturated_sum",
        "_saturation_fn",
        "_buf",
        "_block",
        "_next_power",
    )

    def __init__(
        self,
        params: ProblemParams,
        saturation_fn: Callable[[int], float] | None = None,
    ) -> None:
        self.params = params
        self._saturation_fn = saturation_fn or (
            lambda m: saturation_point(m, params)
        )
        self.count = 0
        self.saturation = self._saturation_fn(1)
        self.saturated_sum = 0.0
        self._buf = np.empty(64, dtype=np.float64)
        self._block = 0
        # a^(block+1), accumulated by the same repeated multiplication as
        # math_core.block_exponent so boundary decisions match it bit for bit.
        self._next_power = params.grid_base

    @property
    def samples(self) -> np.ndarray:
        """Read-only view of the raw samples observed so far."""
        view = self._buf[: self.count]
        view.flags.writeable = False
        return view

    @property
    def block(self) -> int:
        """Geometric block exponent of the current pull count."""
        return self._block

    def update(self, x: float) -> None:
        m = self.count + 1
        if m > self._buf.shape[0]:
            grown = np.empty(self._buf.shape[0] * 2, dtype=np.float64)
            grown[: self.count] = self._buf[: self.count]
            self._buf = grown
        self._buf[m - 1] = x
        self.count = m

        crossed = False
        bound = m * (1.0 + 1e-12)
        while self._next_power <= bound:
            self._next_power *= self.params.grid_base
            self._block += 1
            crossed = True

        if crossed:
            self.saturation = self._saturation_fn(m)
            clamped = _clamp(self._buf[:m], self.saturation)
            # cumsum keeps the strict left-fold summation order.
            self.saturated_sum = float(np.cumsum(clamped)[-1])
        else:
            self.saturated_sum += sat(x, self.saturation)

    def value(self) -> float:
        if self.count == 0:
            raise NotEnoughSamplesError("saturated mean undefined before the first sample")
        return self.saturated_sum / self.count


class RunningMean:
    """Plain empirical mean with O(1) updates."""

    __slots__ = ("count", "total")

    def __init__(self) -> None:
        self.count = 0
        self.total = 0.0

    def update(self, x: float) -> None:
        self.count += 1
        self.total += x

    def value(self) -> float:
        if self.count == 0:
            raise NotEnoughSamplesError("mean undefined before the first sample")
        return self.total / self.count


def truncated_mean(
    samples: Sequence[float], u: float, eps: float, delta: float
) -> float:
    """Index-wise truncated mean at confidence delta.

    Sample i (1-based) contributes x_i when
    |x_i| <= (u^(1+eps) * i / ln(1/delta))^(1/(1+eps)) and 0 otherwise;
    the divisor stays the full sample count.
    """
    xs = np.asarray(samples, dtype=np.float64)
    if xs.size == 0:
        raise NotEnoughSamplesError("truncated mean needs at least one sample")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if u <= 0:
        raise ValueError(f"u must be > 0, got {u}")
    level = math.log(1.0 / delta)
    idx = np.arange(1, xs.size + 1, dtype=np.float64)
    thresholds = (u ** (1.0 + eps) * idx / level) ** (1.0 / (1.0 + eps))
    kept = np.where(np.abs(xs) <= thresholds, xs, 0.0)
    return float(np.sum(kept) / xs.size)


def _catoni_influence(z: np.ndarray) -> np.ndarray:
    # sign(z) * ln(1 + |z| + z^2 / 2)
    return np.sign(z) * np.log1p(np.abs(z) + 0.5 * z * z)


def _catoni_influence_sum(xs: np.ndarray, alpha: float, theta: float) -> float:
    return float(np.sum(_catoni_influence(alpha * (xs - theta))))


def catoni_alpha(n: int, variance_bound: float, delta: float) -> float:
    """Catoni scale alpha for n samples, variance bound v and confidence delta."""
    level = math.log(1.0 / delta)
    if n <= 2.0 * level:
        raise NotEnoughSamplesError(
            f"Catoni estimator needs n > 2*ln(1/delta): n={n}, 2*ln(1/delta)={2.0 * level:.6g}"
        )
    if variance_bound <= 0:
        raise ValueError(f"variance bound must be > 0, got {variance_bound}")
    return math.sqrt(
        2.0 * level / (n * variance_bound * (1.0 + 2.0 * level / (n - 2.0 * level)))
    )


def catoni_mean(
    samples: Sequence[float],
    variance_bound: float,
    delta: float,
    tol: float = 1e-10,
) -> float:
    """Catoni M-estimate: the unique root theta of sum_i psi_C(alpha (x_i - theta)) = 0.

    Solved by bisection; the influence sum is strictly decreasing in theta, so
    the root is unique. The initial bracket [min - v, max + v] is widened
    geometrically if it ever fails to straddle the root.
    """
    xs = np.asarray(samples, dtype=np.float64)
    if xs.size == 0:
        raise NotEnoughSamplesError("Catoni estimator needs at least one sample")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    alpha = catoni_alpha(xs.size, variance_bound, delta)

    lo = float(np.min(xs)) - variance_bound
    hi = float(np.max(xs)) + variance_bound
    width = hi - lo if hi > lo else max(1.0, variance_bound)
    while _catoni_influence_sum(xs, alpha, lo) < 0.0:
        lo -= width
        width *= 2.0
    while _catoni_influence_sum(xs, alpha, hi) > 0.0:
        hi += width
        width *= 2.0

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _catoni_influence_sum(xs, alpha, mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TruncatedMeanTracker:
    """Truncated mean maintained across a non-decreasing confidence schedule.

    With delta = t^-2 the keep condition |x_i| <= (u^(1+eps) i / ln(1/delta))^(1/(1+eps))
    is equivalent to |x_i|^(1+eps) / i <= u^(1+eps) / (2 ln t); the right side
    only shrinks as t grows, so a sample leaves the kept set at most once.
    A max-heap on |x_i|^(1+eps) / i makes each update amortized O(log n).
    """

    __slots__ = ("_u_pow", "_eps", "count", "_kept_sum", "_heap", "_last_level")

    def __init__(self, params: ProblemParams) -> None:
        self._u_pow = params.moment_scale ** (1.0 + params.eps)
        self._eps = params.eps
        self.count = 0
        self._kept_sum = 0.0
        self._heap: list[tuple[float, float]] = []
        self._last_level = 0.0

    def update(self, x: float) -> None:
        self.count += 1
        key = abs(x) ** (1.0 + self._eps) / self.count
        heapq.heappush(self._heap, (-key, x))
        self._kept_sum += x

    def estimate(self, t: int) -> float:
        if self.count == 0:
            raise NotEnoughSamplesError("truncated mean needs at least one sample")
        if t < 2:
            raise ValueError(f"confidence schedule delta = t^-2 needs t >= 2, got {t}")
        level = 2.0 * math.log(t)
        if level < self._last_level:
            raise ValueError("evaluation times must be non-decreasing")
        self._last_level = level
        cutoff = self._u_pow / level
        while self._heap and -self._heap[0][0] > cutoff:
            _, x = heapq.heappop(self._heap)
            self._kept_sum -= x
        return self._kept_sum / self.count


class CatoniTracker:
    """Catoni estimate recomputed under the delta = t^-2 schedule.

    Solves the influence equation with a bracket-safeguarded Newton iteration
    warm-started from the previous root; the root moves only slightly between
    consecutive calls, so one or two iterations usually suffice.
    """

    __slots__ = ("_v", "count", "_buf", "_theta")

    def __init__(self, params: ProblemParams) -> None:
        self._v = params.moment_scale**2
        self.count = 0
        self._buf = np.empty(64, dtype=np.float64)
        self._theta = 0.0

    def update(self, x: float) -> None:
        if self.count == self._buf.shape[0]:
            grown = np.empty(self._buf.shape[0] * 2, dtype=np.float64)
            grown[: self.count] = self._buf[: self.count]
            self._buf = grown
        self._buf[self.count] = x
        self.count += 1

    def is_defined(self, t: int) -> bool:
        return self.count > 0 and t >= 2 and self.count > 4.0 * math.log(t)

    def estimate(self, t: int) -> float:
        if t < 2:
            raise ValueError(f"confidence schedule delta = t^-2 needs t >= 2, got {t}")
        alpha = catoni_alpha(self.count, self._v, t ** (-2.0))
        xs = self._buf[: self.count]

        lo = float(np.min(xs)) - self._v
        hi = float(np.max(xs)) + self._v
        theta = min(max(self._theta, lo), hi)
        for _ in range(200):
            z = alpha * (xs - theta)
            f = float(np.sum(_catoni_influence(z)))
            if f >= 0.0:
                lo = theta
            else:
                hi = theta
            az = np.abs(z)
            slope = alpha * float(np.sum((1.0 + az) / (1.0 + az + 0.5 * z * z)))
            step = f / slope
            nxt = theta + step
            if not lo < nxt < hi:
                nxt = 0.5 * (lo + hi)
            if abs(nxt - theta) <= 1e-12 * max(1.0, abs(theta)):
                theta = nxt
                break
            theta = nxt
        self._theta = theta
        return theta
