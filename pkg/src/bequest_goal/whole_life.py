"""Irreversible whole life insurance paid by a continuous premium.

Once bought, coverage ``D`` costs ``h D`` per year for life, so wealth obeys
``dW = (r W - h D) dt`` and the state is the pair ``(w, D)``. The admissible
region splits into four pieces:

* ``R0``: ``D >= b``; never buy more, hope to die before premiums ruin you.
* ``Ra``: ``rb/(r+h) < D < b`` and ``b - D <= w <= hD/r``; hold until wealth
  falls to ``b - D``, then keep ``w + D = b``.
* ``RbWait``: below the jump boundary ``D_j(w)``; hold until wealth reaches
  ``hb/(r+h)``.
* ``RbJump``: everything else; jump to full insurance ``b - w`` now and keep
  ``w + D = b``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .model import (
    DomainError,
    ModelParams,
    WealthState,
    continuous_premium_rate,
    rates_equal,
    require_positive_interest,
)
from .numerics import power
from .term_life import Regime, solve_term

_EDGE = 1e-12
# relative window around hb/(r+h) where D_j switches to its continuity value
_DJ_WINDOW = 1e-10


class RegionLabel(str, enum.Enum):
    R0 = "R0"
    RA = "Ra"
    RB_WAIT = "RbWait"
    RB_JUMP = "RbJump"
    SAFE = "Safe"


@dataclass(frozen=True)
class NoMoreInsurance:
    pass


@dataclass(frozen=True)
class WaitThenTrack:
    """Hold until wealth falls to ``b - D``, then keep ``w + D = b``."""


@dataclass(frozen=True)
class Wait:
    """Hold until wealth reaches ``hb/(r+h)``, then buy ``rb/(r+h) - D``."""


@dataclass(frozen=True)
class JumpToFullThenTrack:
    amount: float


@dataclass(frozen=True)
class SecureGoal:
    """At or beyond the safe level: top coverage up to ``b - w`` (possibly zero)."""

    amount: float


WlAction = Union[NoMoreInsurance, WaitThenTrack, Wait, JumpToFullThenTrack, SecureGoal]


def _h(params: ModelParams) -> float:
    return continuous_premium_rate(params)


def wait_level(params: ModelParams) -> float:
    """``hb/(r+h)``, the safe level while ``D <= rb/(r+h)``."""
    h = _h(params)
    return h * params.b / (params.r + h)


def coverage_kink(params: ModelParams) -> float:
    """``rb/(r+h)``: coverage that wealth ``hb/(r+h)`` can carry forever."""
    h = _h(params)
    return params.r * params.b / (params.r + h)


def safe_level_whole(params: ModelParams, D: float) -> float:
    """``max(hb/(r+h), hD/r)``."""
    require_positive_interest(params)
    if D < 0:
        raise DomainError("D must be non-negative")
    h = _h(params)
    if D <= coverage_kink(params):
        return wait_level(params)
    return h * D / params.r


def _full_insurance_base(params: ModelParams, w: float) -> float:
    h = _h(params)
    hb = h * params.b
    return max((hb - (params.r + h) * w) / hb, 0.0)


def jump_boundary(params: ModelParams, w: float) -> float:
    """Coverage ``D_j(w)`` separating waiting (below) from jumping (above).

    Negative values occur below ``w*`` when ``lam > r`` and mean every
    ``D >= 0`` is in the jump region.
    """
    require_positive_interest(params)
    top = wait_level(params)
    if w < 0 or w > top * (1.0 + _EDGE):
        raise DomainError(f"w = {w} outside [0, {top}]")
    if w >= top * (1.0 - _DJ_WINDOW):
        return coverage_kink(params)
    if w == 0.0:
        return 0.0
    h, r, lam = _h(params), params.r, params.lam
    z = power(_full_insurance_base(params, w), lam / (r + h))
    # f_j = (1 - z)^(r/lam); 1 - f_j kept accurate as z -> 0
    log_fj = (r / lam) * math.log1p(-z)
    f_j = math.exp(log_fj)
    one_minus = -math.expm1(log_fj)
    return (r / h) * (w - top * f_j) / one_minus


def buy_trigger_D0(params: ModelParams, w: float) -> float:
    """``D_0(w)``: jumping to full insurance satisfies the optimality inequality iff ``D >= D_0(w)``."""
    require_positive_interest(params)
    h, r, lam, b = _h(params), params.r, params.lam, params.b
    if w < 0:
        raise DomainError("w must be non-negative")
    return (b - w) - b * power(_full_insurance_base(params, w), 1.0 - lam / (r + h))


def _in_wait(params: ModelParams, w: float, D: float) -> bool:
    sol = solve_term(params)
    if sol.regime is Regime.LAMBDA_GT_R and w < sol.w_star:
        return False
    return D <= jump_boundary(params, w)


def classify_region(params: ModelParams, state: WealthState) -> RegionLabel:
    """Region of ``state`` in the partition of ``{0 <= w <= wbar(D), D >= 0}``."""
    require_positive_interest(params)
    w, D, b = state.w, state.D, params.b
    safe = safe_level_whole(params, D)
    if w > safe * (1.0 + _EDGE):
        raise DomainError(f"w = {w} is beyond the safe level {safe} for D = {D}")
    if w >= safe * (1.0 - _EDGE):
        return RegionLabel.SAFE
    if D >= b:
        return RegionLabel.R0
    if w + D >= b:
        # with D <= rb/(r+h) this only happens at the safe corner
        return RegionLabel.RA if D > coverage_kink(params) else RegionLabel.SAFE
    return RegionLabel.RB_WAIT if _in_wait(params, w, D) else RegionLabel.RB_JUMP


def phi_r0(params: ModelParams, w: float, D: float) -> float:
    h, r = _h(params), params.r
    return 1.0 - power(max(h * D - r * w, 0.0) / (h * D), params.lam / r)


def phi_ra(params: ModelParams, w: float, D: float) -> float:
    h, r, lam, b = _h(params), params.r, params.lam, params.b
    span = (r + h) * D - r * b
    ratio = min(max(h * D - r * w, 0.0) / span, 1.0)
    return 1.0 - power(span / (h * b), lam / (r + h)) * power(ratio, lam / r)


def phi_rb_wait(params: ModelParams, w: float, D: float) -> float:
    h, r = _h(params), params.r
    denom = h * (coverage_kink(params) - D)
    if denom <= 0.0:
        return 1.0
    ratio = min(max(r * w - h * D, 0.0) / denom, 1.0)
    return power(ratio, params.lam / r)


def phi_rb_jump(params: ModelParams, w: float, D: float = 0.0) -> float:
    h, r = _h(params), params.r
    return 1.0 - power(_full_insurance_base(params, w), params.lam / (r + h))


_PHI = {
    RegionLabel.R0: phi_r0,
    RegionLabel.RA: phi_ra,
    RegionLabel.RB_WAIT: phi_rb_wait,
    RegionLabel.RB_JUMP: phi_rb_jump,
}


def phi_whole(params: ModelParams, state: WealthState) -> float:
    """Maximum probability of reaching the goal before ruin.

    States beyond the safe level are accepted and have value 1.
    """
    require_positive_interest(params)
    if state.w >= safe_level_whole(params, state.D) * (1.0 - _EDGE):
        return 1.0
    region = classify_region(params, state)
    return _PHI[region](params, state.w, state.D)


def optimal_action_whole(params: ModelParams, state: WealthState) -> WlAction:
    require_positive_interest(params)
    w, D, b = state.w, state.D, params.b
    if w >= safe_level_whole(params, D) * (1.0 - _EDGE):
        return SecureGoal(max(b - w - D, 0.0))
    region = classify_region(params, state)
    if region is RegionLabel.R0:
        return NoMoreInsurance()
    if region is RegionLabel.RA:
        return WaitThenTrack()
    if region is RegionLabel.RB_WAIT:
        return Wait()
    return JumpToFullThenTrack(b - (w + D))


def bequest_r0(params: ModelParams, w: float, D: float) -> float:
    h, r, lam = _h(params), params.r, params.lam
    gap = max(h * D - r * w, 0.0)
    if rates_equal(lam, r):
        log_term = 0.0 if gap == 0.0 else gap / r * math.log(gap / (h * D))
        return log_term + (r + h) * w / h
    return D * (1.0 - h / (lam - r)) * (1.0 - power(gap / (h * D), lam / r)) + lam * w / (lam - r)


def bequest_ra(params: ModelParams, w: float, D: float) -> float:
    h, r, lam, b = _h(params), params.r, params.lam, params.b
    gap = max(h * D - r * w, 0.0)
    span = (r + h) * D - r * b
    if rates_equal(lam, r):
        log_term = 0.0 if gap == 0.0 else gap / r * math.log(span / gap)
        return w + D - log_term - gap / h * power(h * b / span, h / (r + h))
    q = power(min(gap / span, 1.0), lam / r)
    inner = r / (lam - r) + power(span / (h * b), lam / (r + h))
    return q * ((r + h) * D / (lam - r) - b * inner) + D * (1.0 - h / (lam - r)) + lam * w / (lam - r)


def bequest_rb_wait(params: ModelParams, w: float, D: float) -> float:
    h, r, lam, b = _h(params), params.r, params.lam, params.b
    kink = coverage_kink(params)
    gap = r * w - h * D
    denom = h * (kink - D)
    if denom <= 0.0 or gap >= denom:
        return b
    if rates_equal(lam, r):
        carry = (r + h) * D / r
        if gap <= 0.0:
            return carry
        return gap / r * math.log(denom / gap) + gap * (b - carry) / denom + carry
    p = power(max(gap, 0.0) / denom, lam / r)
    coef = (b - D) * (1.0 + h / (r + h) * lam / (r - lam)) - h * D / (r - lam) * (1.0 - lam / (r + h))
    return coef * p + D * (r + h - lam) / (r - lam) - lam * w / (r - lam)


def bequest_rb_jump(params: ModelParams, w: float, D: float = 0.0) -> float:
    return params.b * phi_rb_jump(params, w)


_BEQUEST = {
    RegionLabel.R0: bequest_r0,
    RegionLabel.RA: bequest_ra,
    RegionLabel.RB_WAIT: bequest_rb_wait,
    RegionLabel.RB_JUMP: bequest_rb_jump,
}


def expected_bequest_whole(params: ModelParams, state: WealthState) -> float:
    """Expected wealth plus benefit at death (zero after ruin) under the optimal rule.

    For ``lam > r`` the wait/jump formulas are those of the ``lam < r`` case
    applied on the ``lam > r`` regions; they are the same integrals.
    """
    region = classify_region(params, state)
    if region is RegionLabel.SAFE:
        return max(params.b, state.w + state.D)
    return _BEQUEST[region](params, state.w, state.D)
