"""Whole life insurance bought by single premium, with and without cash value.

Wealth earns the riskless rate ``r``; insurance of ``x`` costs ``H x`` up
front. Without cash value the individual waits until wealth reaches the safe
level ``H (b - D)`` and then buys the shortfall ``b - D``. With cash value
``(1 - rho) H`` per unit of benefit, it is optimal to surrender everything
when wealth is below ``(1 - rho) H (b - D)`` and then follow the same
wait-then-buy rule from the enlarged wealth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .model import (
    DomainError,
    ModelParams,
    WealthState,
    rates_equal,
    require_positive_interest,
    single_premium_rate,
)
from .numerics import power

# relative slack when testing w against the safe level
_EDGE = 1e-12


@dataclass(frozen=True)
class Wait:
    """Hold current coverage and let wealth grow."""


@dataclass(frozen=True)
class BuyAdditional:
    amount: float


@dataclass(frozen=True)
class SurrenderAll:
    cash_received: float


@dataclass(frozen=True)
class AlreadyFunded:
    """Existing benefit already covers the goal."""


SpAction = Union[Wait, BuyAdditional, SurrenderAll, AlreadyFunded]


def safe_level_sp(params: ModelParams, D: float) -> float:
    """Wealth ``H (b - D)`` that buys the remaining shortfall outright."""
    require_positive_interest(params)
    if D < 0:
        raise DomainError("D must be non-negative")
    if D >= params.b:
        raise DomainError(f"D = {D} >= b = {params.b}: goal already met, no safe level")
    return single_premium_rate(params) * (params.b - D)


def surrender_threshold(params: ModelParams, D: float) -> float:
    """Wealth ``(1 - rho) H (b - D)`` below which surrendering everything is optimal."""
    return (1.0 - params.rho) * safe_level_sp(params, D)


def _safe_or_none(params: ModelParams, state: WealthState) -> float | None:
    require_positive_interest(params)
    if state.D >= params.b:
        return None
    return single_premium_rate(params) * (params.b - state.D)


def _at_or_above(w: float, level: float) -> bool:
    return w >= level * (1.0 - _EDGE)


def phi_no_cash(params: ModelParams, state: WealthState) -> float:
    """Maximum probability of reaching the goal when insurance cannot be surrendered.

    ``(w / (H (b - D))) ** (lam / r)`` below the safe level, 1 at or above it
    and 1 whenever ``D >= b``.
    """
    safe = _safe_or_none(params, state)
    if safe is None or state.w >= safe:
        return 1.0
    return power(state.w / safe, params.lam / params.r)


def optimal_action_no_cash(params: ModelParams, state: WealthState) -> SpAction:
    safe = _safe_or_none(params, state)
    if safe is None:
        return AlreadyFunded()
    if _at_or_above(state.w, safe):
        return BuyAdditional(params.b - state.D)
    return Wait()


def hitting_time_safe_sp(params: ModelParams, state: WealthState) -> float:
    """Years until wealth ``w e^{rt}`` reaches the safe level (``inf`` when ``w = 0``)."""
    safe = _safe_or_none(params, state)
    if safe is None or state.w >= safe:
        return 0.0
    if state.w == 0.0:
        return math.inf
    return math.log(safe / state.w) / params.r


def _check_region(params: ModelParams, state: WealthState) -> float:
    safe = _safe_or_none(params, state)
    if safe is None:
        raise DomainError(f"expected bequest is defined for D < b only (D = {state.D})")
    if state.w > safe * (1.0 + _EDGE):
        raise DomainError(f"w = {state.w} exceeds the safe level {safe}")
    return safe


def _bequest_wait_then_buy(params: ModelParams, w: float, D: float) -> float:
    # E[W(tau_d)] when holding D and waiting for wealth w to reach H(b - D)
    H = single_premium_rate(params)
    lam, r, b = params.lam, params.r, params.b
    safe = H * (b - D)
    if w >= safe:
        return b
    if rates_equal(lam, r):
        if w == 0.0:
            return D
        return w * (1.0 / H + math.log(safe / w)) + D
    p = power(w / safe, lam / r)
    return (b - D) * (1.0 - lam * H / (lam - r)) * p + lam * w / (lam - r) + D


def expected_bequest_no_cash(params: ModelParams, state: WealthState) -> float:
    """Expected wealth plus benefit at death under the optimal no-surrender rule."""
    _check_region(params, state)
    return _bequest_wait_then_buy(params, state.w, state.D)


def phi_cash(params: ModelParams, state: WealthState) -> float:
    """Maximum probability of reaching the goal when insurance has a cash value."""
    safe = _safe_or_none(params, state)
    if safe is None or state.w >= safe:
        return 1.0
    H = single_premium_rate(params)
    lam_r = params.lam / params.r
    if state.w < (1.0 - params.rho) * safe:
        pooled = state.w + (1.0 - params.rho) * H * state.D
        return power(pooled / (H * params.b), lam_r)
    return power(state.w / safe, lam_r)


def optimal_action_cash(params: ModelParams, state: WealthState) -> SpAction:
    safe = _safe_or_none(params, state)
    if safe is None:
        return AlreadyFunded()
    if _at_or_above(state.w, safe):
        return BuyAdditional(params.b - state.D)
    if state.D > 0 and state.w < (1.0 - params.rho) * safe:
        return SurrenderAll((1.0 - params.rho) * single_premium_rate(params) * state.D)
    return Wait()


def expected_bequest_cash(params: ModelParams, state: WealthState) -> float:
    """Expected wealth at death under the optimal surrender-and-buy rule.

    Discontinuous in ``w`` at the surrender threshold; the left limit is the
    smaller of the two.
    """
    safe = _check_region(params, state)
    if state.D > 0 and state.w < (1.0 - params.rho) * safe:
        pooled = state.w + (1.0 - params.rho) * single_premium_rate(params) * state.D
        return _bequest_wait_then_buy(params, pooled, 0.0)
    return _bequest_wait_then_buy(params, state.w, state.D)
