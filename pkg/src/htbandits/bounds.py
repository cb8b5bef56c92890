"""Closed-form evaluators for the worst-case and gap-dependent regret bounds.

The theorem constants are transcribed symbol for symbol, with no algebraic
simplification, so a transcription mistake shows up against an independent
oracle instead of hiding inside rearranged terms. Constants of the two bounds
are unrelated despite sharing names; they are namespaced as
minimax.{C, terms} and distdep.{C1, C2} here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidParamsError
from .math_core import ProblemParams, gamma_fn, psi, validate_params

__all__ = [
    "GapProfile",
    "ArmTerm",
    "DistDependentBound",
    "minimax_lower_bound",
    "minimax_constant_terms",
    "minimax_constant",
    "minimax_upper_bound",
    "distdep_constants",
    "dist_dependent_bound",
]


@dataclass(frozen=True)
class GapProfile:
    """Suboptimality gaps; the best arm has gap 0."""

    gaps: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.gaps:
            raise ValueError("gap profile must not be empty")
        if any(g < 0 for g in self.gaps):
            raise ValueError(f"gaps must be non-negative, got {self.gaps}")
        if min(self.gaps) != 0.0:
            raise ValueError("at least one gap must be 0 (the best arm)")

    @classmethod
    def from_means(cls, means: Sequence[float]) -> "GapProfile":
        best = max(means)
        return cls(tuple(best - m for m in means))


@dataclass(frozen=True)
class ArmTerm:
    """One suboptimal arm's contribution to the gap-dependent bound."""

    gap: float
    log_argument: float
    value: float


@dataclass(frozen=True)
class DistDependentBound:
    total: float
    per_arm: tuple[ArmTerm, ...]
    c1: float
    c2: float
    # True when some log argument is <= 1; the log term is then zero or
    # negative and is reported verbatim rather than clamped.
    small_log_warning: bool


def minimax_lower_bound(params: ProblemParams) -> float:
    """0.01 * u * K^(eps/(1+eps)) * T^(1/(1+eps))."""
    e = params.eps
    return (
        0.01
        * params.moment_scale
        * params.num_arms ** (e / (1.0 + e))
        * params.horizon ** (1.0 / (1.0 + e))
    )


def _require_valid(params: ProblemParams) -> None:
    check = validate_params(params)
    if not check:
        raise InvalidParamsError(
            "parameter condition eta*psi(2*eta/a) >= 2*a violated: "
            f"{check.lhs:.6g} < {check.rhs:.6g}"
        )


def minimax_constant_terms(params: ProblemParams) -> tuple[float, float, float]:
    """The three summands of the worst-case bound's leading constant."""
    _require_valid(params)
    a = params.grid_base
    eta = params.inflation
    e = params.eps
    g = gamma_fn(1.0 / e + 2.0)
    term1 = g * (a / (6.0 + 3.0 * eta)) ** (1.0 / e) * (
        3.0 / psi(6.0 + 3.0 * eta)
    ) ** ((1.0 + e) / e)
    term2 = (
        e
        * g
        * (6.0 + 3.0 * eta) ** (-1.0 / e)
        * (6.0 * a / psi(2.0 * eta / a)) ** ((1.0 + e) / e)
        * a
        / math.log(a)
    )
    term3 = (6.0 + 3.0 * eta) * (
        math.e + (1.0 + e) * math.exp(-e / (1.0 + e))
    )
    return term1, term2, term3


def minimax_constant(params: ProblemParams) -> float:
    return sum(minimax_constant_terms(params))


def minimax_upper_bound(params: ProblemParams) -> float:
    """C * u * K^(eps/(1+eps)) * (T/e)^(1/(1+eps)) + 2 u K."""
    c = minimax_constant(params)
    e = params.eps
    return (
        c
        * params.moment_scale
        * params.num_arms ** (e / (1.0 + e))
        * (params.horizon / math.e) ** (1.0 / (1.0 + e))
        + 2.0 * params.moment_scale * params.num_arms
    )


def distdep_constants(params: ProblemParams) -> tuple[float, float]:
    """C1 = (4 + 4 eta)^((1+eps)/eps); C2 = max(e C1, 2 Gamma(1/eps + 2) (8a / psi(2 eta / a))^((1+eps)/eps) a / ln a)."""
    _require_valid(params)
    a = params.grid_base
    eta = params.inflation
    e = params.eps
    c1 = (4.0 + 4.0 * eta) ** ((1.0 + e) / e)
    c2 = max(
        math.e * c1,
        2.0
        * gamma_fn(1.0 / e + 2.0)
        * (8.0 * a / psi(2.0 * eta / a)) ** ((1.0 + e) / e)
        * a
        / math.log(a),
    )
    return c1, c2


def dist_dependent_bound(gaps: GapProfile, params: ProblemParams) -> DistDependentBound:
    """Gap-dependent bound: sum over suboptimal arms of
    (u^(1+eps)/gap)^(1/eps) * [C1 ln((T/(K C1)) (gap/u)^((1+eps)/eps)) + C2 K] + gap.

    The log factor is evaluated as printed; for tiny gaps its argument drops
    below 1 and the term goes negative, which is flagged but not clamped.
    """
    if len(gaps.gaps) != params.num_arms:
        raise ValueError(
            f"gap profile has {len(gaps.gaps)} entries for {params.num_arms} arms"
        )
    u = params.moment_scale
    if any(g > 2.0 * u * (1.0 + 1e-12) for g in gaps.gaps):
        raise ValueError(f"gaps cannot exceed 2u = {2.0 * u:g}")
    c1, c2 = distdep_constants(params)
    e = params.eps
    t_over = params.horizon / (params.num_arms * c1)

    per_arm: list[ArmTerm] = []
    total = 0.0
    warn = False
    for gap in gaps.gaps:
        if gap == 0.0:
            continue
        log_arg = t_over * (gap / u) ** ((1.0 + e) / e)
        if log_arg <= 1.0:
            warn = True
        value = (u ** (1.0 + e) / gap) ** (1.0 / e) * (
            c1 * math.log(log_arg) + c2 * params.num_arms
        ) + gap
        per_arm.append(ArmTerm(gap=gap, log_argument=log_arg, value=value))
        total += value
    return DistDependentBound(
        total=total,
        per_arm=tuple(per_arm),
        c1=c1,
        c2=c2,
        small_log_warning=warn,
    )
