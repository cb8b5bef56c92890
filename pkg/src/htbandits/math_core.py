"""Scalar building blocks shared by the policies, estimators and bound evaluators.

Everything here is a pure function of its arguments (64-bit floats throughout),
safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ProblemParams",
    "ConditionCheck",
    "psi",
    "log_plus",
    "phi",
    "conf_radius",
    "block_exponent",
    "h_of",
    "saturation_point",
    "check_condition",
    "validate_params",
    "gamma_fn",
]

# Relative guard used when locating geometric-block boundaries, so that pull
# counts sitting exactly on a power of the grid base land in a deterministic
# block instead of depending on floating-point log rounding.
BLOCK_TOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    """Constants of one bandit problem instance.

    horizon       -- number of plays T
    num_arms      -- number of arms K (2 <= K <= T)
    moment_scale  -- u > 0 with E|X|^(1+eps) <= u^(1+eps) for every arm
    eps           -- moment order parameter in (0, 1]
    grid_base     -- geometric block base a > 1 for the saturation schedule
    inflation     -- confidence-radius inflation eta > 0
    """

    horizon: int
    num_arms: int
    moment_scale: float = 1.0
    eps: float = 1.0
    grid_base: float = 1.1
    inflation: float = 2.2

    def __post_init__(self) -> None:
        if self.num_arms < 2:
            raise ValueError(f"num_arms must be >= 2, got {self.num_arms}")
        if self.horizon < self.num_arms:
            raise ValueError(
                f"horizon must be >= num_arms, got horizon={self.horizon} "
                f"num_arms={self.num_arms}"
            )
        if self.moment_scale <= 0:
            raise ValueError(f"moment_scale must be > 0, got {self.moment_scale}")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must be in (0, 1], got {self.eps}")
        if self.grid_base <= 1.0:
            raise ValueError(f"grid_base must be > 1, got {self.grid_base}")
        if self.inflation <= 0:
            raise ValueError(f"inflation must be > 0, got {self.inflation}")


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of the eta*psi(2*eta/a) >= 2*a validity check."""

    ok: bool
    lhs: float
    rhs: float

    def __bool__(self) -> bool:
        return self.ok


def psi(x: float) -> float:
    """Bennett rate function (1 + 1/x) * ln(1 + x) - 1, strictly increasing on x > 0."""
    if x <= 0:
        raise ValueError(f"psi requires x > 0, got {x}")
    return (1.0 + 1.0 / x) * math.log1p(x) - 1.0


def log_plus(x: float) -> float:
    """max(ln x, 1). Note the floor is 1, not 0."""
    if x <= 0:
        raise ValueError(f"log_plus requires x > 0, got {x}")
    return max(math.log(x), 1.0)


def phi(n: float, params: ProblemParams) -> float:
    """Exploration rate log_plus(T / (K n)) / n, strictly decreasing in n.

    n is real-valued on purpose: the saturation schedule evaluates phi at
    non-integer powers of the grid base.
    """
    if n <= 0:
        raise ValueError(f"phi requires n > 0, got {n}")
    return log_plus(params.horizon / (params.num_arms * n)) / n


def conf_radius(n: float, params: ProblemParams) -> float:
    """Confidence radius c_n = u * phi(n)^(eps / (1 + eps))."""
    return params.moment_scale * phi(n, params) ** (params.eps / (1.0 + params.eps))


def block_exponent(m: int, a: float) -> int:
    """Largest s >= 0 with a^s <= m, i.e. floor(log_a m) with a boundary guard.

    Computed by repeated multiplication so that counts m equal to an exact
    power of a (reachable for integer a) always land in block s, rather than
    flipping on floating-point log rounding.
    """
    if m < 1:
        raise ValueError(f"block_exponent requires m >= 1, got {m}")
    if a <= 1.0:
        raise ValueError(f"grid base must be > 1, got {a}")
    s = 0
    power = 1.0
    bound = m * (1.0 + BLOCK_TOL)
    while power * a <= bound:
        power *= a
        s += 1
    return s


def h_of(m: int, a: float) -> float:
    """Upper edge a^(floor(log_a m) + 1) of the geometric block containing m.

    Satisfies m <= h_of(m) <= a * m and is constant while m stays inside one
    block [a^s, a^(s+1)).
    """
    return a ** (block_exponent(m, a) + 1)


def saturation_point(m: int, params: ProblemParams) -> float:
    """Saturation level B_m = u * phi(h(m))^(-1 / (1 + eps)).

    Non-decreasing in m and constant within each geometric block.
    """
    h = h_of(m, params.grid_base)
    return params.moment_scale * phi(h, params) ** (-1.0 / (1.0 + params.eps))


def check_condition(a: float, eta: float) -> ConditionCheck:
    """Check eta * psi(2 * eta / a) >= 2 * a and report both sides."""
    if a <= 1.0:
        raise ValueError(f"grid base must be > 1, got {a}")
    if eta <= 0:
        raise ValueError(f"inflation must be > 0, got {eta}")
    lhs = eta * psi(2.0 * eta / a)
    rhs = 2.0 * a
    return ConditionCheck(ok=lhs >= rhs, lhs=lhs, rhs=rhs)


def validate_params(params: ProblemParams) -> ConditionCheck:
    """Validity check required before any Robust MOSS run."""
    return check_condition(params.grid_base, params.inflation)


def gamma_fn(x: float) -> float:
    """Euler gamma function restricted to x > 0."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)
