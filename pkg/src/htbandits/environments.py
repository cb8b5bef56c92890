"""Reward-generating arm models and the deterministic random stream.

The heavy-tailed model adds symmetric noise to a fixed mean: the noise
magnitude is generalized Pareto (shape xi >= 0, scale sigma, location 0) and
its sign is an independent fair coin. Magnitudes are drawn by inverse-CDF
sampling, so every reward consumes exactly two uniforms (sign first, then
magnitude) -- a frozen order that makes traces bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from .errors import MomentDivergenceError

__all__ = [
    "GpdNoise",
    "NoNoise",
    "BoundedUniformNoise",
    "ArmModel",
    "RngStream",
    "gpd_quantile",
    "gpd_cdf",
    "sample_reward",
    "sample_rewards",
    "ensure_moment_exists",
    "moment_bound_check",
]


@dataclass(frozen=True)
class GpdNoise:
    """Symmetric noise with generalized-Pareto magnitude."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if self.shape < 0:
            raise ValueError(f"shape must be >= 0, got {self.shape}")
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class NoNoise:
    """Degenerate noise: rewards equal the arm mean."""


@dataclass(frozen=True)
class BoundedUniformNoise:
    """Symmetric uniform noise on (-half_width, half_width)."""

    half_width: float

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise ValueError(f"half_width must be > 0, got {self.half_width}")


NoiseSpec = Union[GpdNoise, NoNoise, BoundedUniformNoise]


@dataclass(frozen=True)
class ArmModel:
    """One arm: a mean plus a noise specification.

    Moment existence depends on the problem's eps, which the model does not
    carry; construction paths that know eps must call `ensure_moment_exists`.
    """

    mean: float
    noise: NoiseSpec = NoNoise()


class RngStream:
    """Deterministic uniform stream for one simulation run.

    Backed by numpy's PCG64 bit generator keyed by
    SeedSequence([master_seed, run_index]); the same seed pair yields the
    same float64 sequence on every platform. `position` counts the uniforms
    handed out so far.
    """

    __slots__ = ("_gen", "_buf", "_next", "_chunk", "position")

    def __init__(self, master_seed: int, run_index: int, chunk: int = 4096) -> None:
        seq = np.random.SeedSequence([int(master_seed), int(run_index)])
        self._gen = np.random.Generator(np.random.PCG64(seq))
        self._chunk = chunk
        self._buf = self._gen.random(chunk)
        self._next = 0
        self.position = 0

    def uniform(self) -> float:
        if self._next == self._buf.shape[0]:
            self._buf = self._gen.random(self._chunk)
            self._next = 0
        value = self._buf[self._next]
        self._next += 1
        self.position += 1
        return float(value)

    def uniforms(self, n: int) -> np.ndarray:
        """The next n uniforms, identical to n successive `uniform()` calls."""
        out = np.empty(n, dtype=np.float64)
        filled = 0
        while filled < n:
            if self._next == self._buf.shape[0]:
                self._buf = self._gen.random(self._chunk)
                self._next = 0
            take = min(n - filled, self._buf.shape[0] - self._next)
            out[filled : filled + take] = self._buf[self._next : self._next + take]
            self._next += take
            filled += take
        self.position += n
        return out


def gpd_quantile(p, shape: float, scale: float):
    """Generalized-Pareto quantile (sigma/xi)((1-p)^-xi - 1); -sigma ln(1-p) at xi = 0.

    Accepts a scalar or a numpy array of probabilities in [0, 1).
    """
    if shape < 0:
        raise ValueError(f"shape must be >= 0, got {shape}")
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    if isinstance(p, (float, int)):
        if not 0.0 <= p < 1.0:
            raise ValueError(f"p must be in [0, 1), got {p}")
        if shape == 0.0:
            return -scale * math.log1p(-p)
        return (scale / shape) * ((1.0 - p) ** (-shape) - 1.0)
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("p must be in [0, 1)")
    if shape == 0.0:
        return -scale * np.log1p(-arr)
    return (scale / shape) * ((1.0 - arr) ** (-shape) - 1.0)


def gpd_cdf(x, shape: float, scale: float):
    """Generalized-Pareto CDF on x >= 0 (location 0)."""
    arr = np.asarray(x, dtype=np.float64)
    if shape == 0.0:
        out = 1.0 - np.exp(-arr / scale)
    else:
        out = 1.0 - (1.0 + shape * arr / scale) ** (-1.0 / shape)
    return out if out.ndim else float(out)


def _magnitude(noise: NoiseSpec, p: float) -> float:
    if isinstance(noise, GpdNoise):
        return gpd_quantile(p, noise.shape, noise.scale)
    if isinstance(noise, BoundedUniformNoise):
        return noise.half_width * p
    return 0.0


def sample_reward(model: ArmModel, rng: RngStream) -> float:
    """Draw one reward: mean + sign * magnitude, consuming exactly two uniforms."""
    u_sign = rng.uniform()
    u_mag = rng.uniform()
    sign = 1.0 if u_sign < 0.5 else -1.0
    return model.mean + sign * _magnitude(model.noise, u_mag)


def sample_rewards(model: ArmModel, rng: RngStream, n: int) -> np.ndarray:
    """Vectorized `sample_reward`; consumes the same 2n uniforms in the same order.

    Values can differ from n scalar calls by one ulp (numpy's pow vs libm's);
    the bit-reproducibility contract is carried by the scalar path, which is
    the one the simulator uses.
    """
    us = rng.uniforms(2 * n)
    signs = np.where(us[0::2] < 0.5, 1.0, -1.0)
    p = us[1::2]
    if isinstance(model.noise, GpdNoise):
        mags = gpd_quantile(p, model.noise.shape, model.noise.scale)
    elif isinstance(model.noise, BoundedUniformNoise):
        mags = model.noise.half_width * p
    else:
        mags = np.zeros(n)
    return model.mean + signs * mags


def ensure_moment_exists(model: ArmModel, eps: float) -> None:
    """Raise MomentDivergenceError unless E|X|^(1+eps) is finite."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    noise = model.noise
    if isinstance(noise, GpdNoise) and noise.shape * (1.0 + eps) >= 1.0:
        raise MomentDivergenceError(
            f"moment of order 1+eps={1.0 + eps:g} diverges: requires "
            f"shape < 1/(1+eps) = {1.0 / (1.0 + eps):g}, got shape={noise.shape:g}"
        )


def moment_bound_check(model: ArmModel, eps: float) -> float:
    """Smallest u with E|X|^(1+eps) <= u^(1+eps) for this arm.

    Closed form where available (eps = 1); otherwise numerical quadrature of
    the raw moment against the noise law, accurate well past 1e-6 relative.
    """
    ensure_moment_exists(model, eps)
    mu = model.mean
    noise = model.noise

    if isinstance(noise, NoNoise):
        return abs(mu)

    if eps == 1.0:
        if isinstance(noise, GpdNoise):
            xi, sigma = noise.shape, noise.scale
            second = mu * mu + 2.0 * sigma * sigma / ((1.0 - xi) * (1.0 - 2.0 * xi))
            return math.sqrt(second)
        second = mu * mu + noise.half_width**2 / 3.0
        return math.sqrt(second)

    power = 1.0 + eps

    def absmoment(m: float) -> float:
        return 0.5 * (abs(mu + m) ** power + abs(mu - m) ** power)

    if isinstance(noise, GpdNoise):
        xi, sigma = noise.shape, noise.scale
        # Substituting 1 - p = e^-y turns the tail into an exponentially
        # decaying integrand (rate 1 - xi * (1 + eps) > 0).
        if xi == 0.0:
            integrand = lambda y: absmoment(sigma * y) * math.exp(-y)
        else:

            def integrand(y: float) -> float:
                if xi * y < 300.0:
                    return absmoment((sigma / xi) * math.expm1(xi * y)) * math.exp(-y)
                # magnitude dwarfs the mean; evaluate in log space to avoid overflow
                log_m = math.log(sigma / xi) + xi * y + math.log1p(-math.exp(-xi * y))
                return math.exp(power * log_m - y)

        raw, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-12, epsrel=1e-9, limit=200)
    else:
        w = noise.half_width
        raw, _ = integrate.quad(
            lambda m: absmoment(m) / w, 0.0, w, epsabs=1e-12, epsrel=1e-9
        )
    return raw ** (1.0 / power)
