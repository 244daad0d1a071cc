"""Insurance strategies compiled to deterministic wealth plans.

Wealth never jumps at random in this model; only the death time does. A
strategy started from a given state therefore produces one deterministic
plan: a list of phases, each a closed-form flow with a fixed success flag.
A simulated path only has to locate its death time among the phases.

Phase kinds:

``grow``  wealth ``w0 e^{rs}``, benefit ``D`` (single-premium products).
``hold``  wealth ``hD/r + (w0 - hD/r) e^{rs}`` under premium ``h D``.
``line``  full insurance kept at ``b - W``; the bequest at death is exactly ``b``.
``ruin``  wealth has hit zero; the bequest is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ..model import BequestError, ModelParams, WealthState, require_positive_interest
from ..products import Product
from .. import single_premium as sp
from .. import term_life as tl
from .. import whole_life as wl


class InadmissibleStrategyError(BequestError, ValueError):
    """The strategy cannot be followed under the given product."""


@dataclass(frozen=True)
class OptimalSP:
    pass


@dataclass(frozen=True)
class OptimalSPCash:
    pass


@dataclass(frozen=True)
class OptimalTerm:
    pass


@dataclass(frozen=True)
class OptimalWhole:
    pass


@dataclass(frozen=True)
class NeverBuy:
    pass


@dataclass(frozen=True)
class BuyNowFull:
    """Buy full insurance now (as much as wealth allows for single premium)."""


@dataclass(frozen=True)
class ThresholdBuy:
    """Wait while wealth is at or above ``w_threshold``; buy full insurance below it."""

    w_threshold: float


@dataclass(frozen=True)
class SurrenderBelow:
    """Surrender all coverage when wealth is below ``w_threshold``, then wait and buy."""

    w_threshold: float


StrategySpec = Union[
    OptimalSP, OptimalSPCash, OptimalTerm, OptimalWhole, NeverBuy, BuyNowFull, ThresholdBuy, SurrenderBelow
]

_OPTIMAL = {
    Product.SP: OptimalSP,
    Product.SP_CASH: OptimalSPCash,
    Product.TERM: OptimalTerm,
    Product.WHOLE: OptimalWhole,
}


def optimal_strategy(product: Product | str) -> StrategySpec:
    return _OPTIMAL[Product.parse(product)]()


def strategy_name(strategy: StrategySpec) -> str:
    if isinstance(strategy, (ThresholdBuy, SurrenderBelow)):
        return f"{type(strategy).__name__}({strategy.w_threshold:.6g})"
    return type(strategy).__name__


def parse_strategy(text: str) -> StrategySpec:
    """Inverse of :func:`strategy_name`, e.g. ``"ThresholdBuy(0.5)"``."""
    text = text.strip()
    simple = {cls.__name__.lower(): cls for cls in (
        OptimalSP, OptimalSPCash, OptimalTerm, OptimalWhole, NeverBuy, BuyNowFull)}
    if text.lower() in simple:
        return simple[text.lower()]()
    for cls in (ThresholdBuy, SurrenderBelow):
        prefix = cls.__name__.lower() + "("
        if text.lower().startswith(prefix) and text.endswith(")"):
            return cls(float(text[len(prefix):-1]))
    raise InadmissibleStrategyError(f"cannot parse strategy {text!r}")


@dataclass(frozen=True)
class Phase:
    kind: str
    w0: float
    D: float
    duration: float
    success: bool


Plan = list[Phase]

_INF = math.inf


# ---- flow helpers ---------------------------------------------------------


def _log_ratio_time(num: float, den: float, rate: float) -> float:
    """``ln(num/den)/rate`` clipped at zero; ``inf`` when the target is never reached."""
    if num == den:
        return 0.0
    if den == 0.0 or num / den < 1.0:
        return _INF
    return math.log(num / den) / rate


def _hold_time(params: ModelParams, w0: float, D: float, target: float) -> float:
    """Time for ``hD/r + (w0 - hD/r) e^{rt}`` to reach ``target``."""
    c = params.h * D / params.r
    if w0 == target:
        return 0.0
    if w0 == c:
        return _INF
    return _log_ratio_time(target - c, w0 - c, params.r)


def _grow_time(params: ModelParams, w0: float, target: float) -> float:
    if w0 >= target:
        return 0.0
    if w0 == 0.0:
        return _INF
    return math.log(target / w0) / params.r


def _seq(*parts: Plan) -> Plan:
    out: Plan = []
    for part in parts:
        for phase in part:
            if phase.duration == 0.0 and phase.kind not in ("ruin",):
                continue
            out.append(phase)
            if phase.duration == _INF:
                return out
    return out


_RUIN: Plan = [Phase("ruin", 0.0, 0.0, _INF, False)]


# ---- single premium ------------------------------------------------------


def _sp_secure(params: ModelParams, w: float, D: float) -> Plan:
    if D >= params.b:
        return [Phase("grow", w, D, _INF, True)]
    cost = params.H * (params.b - D)
    return [Phase("grow", max(w - cost, 0.0), params.b, _INF, True)]


def _sp_wait_then_buy(params: ModelParams, w: float, D: float) -> Plan:
    if D >= params.b:
        return _sp_secure(params, w, D)
    safe = params.H * (params.b - D)
    if w >= safe:
        return _sp_secure(params, w, D)
    t = _grow_time(params, w, safe)
    return _seq([Phase("grow", w, D, t, False)], _sp_secure(params, safe, D))


def _sp_never_buy(params: ModelParams, w: float, D: float) -> Plan:
    gap = params.b - D
    if gap <= 0.0 or w >= gap:
        return [Phase("grow", w, D, _INF, True)]
    t = _grow_time(params, w, gap)
    return _seq([Phase("grow", w, D, t, False)], [Phase("grow", gap, D, _INF, True)])


def _sp_buy_now(params: ModelParams, w: float, D: float) -> Plan:
    if D >= params.b or w >= params.H * (params.b - D):
        return _sp_secure(params, w, D)
    return [Phase("grow", 0.0, D + w / params.H, _INF, False)]


def _sp_threshold_plan(params: ModelParams, w: float, D: float, x: float) -> Plan:
    # wealth at or above x: keep waiting; it only grows, so x is never crossed
    # from above. Wealth below x: buy with everything now.
    if w < x:
        return _sp_buy_now(params, w, D)
    return _sp_wait_then_buy(params, w, D)


def _sp_surrender(params: ModelParams, w: float, D: float, x: float) -> Plan:
    if D > 0.0 and w < x and D < params.b:
        pooled = w + (1.0 - params.rho) * params.H * D
        return _sp_wait_then_buy(params, pooled, 0.0)
    return _sp_wait_then_buy(params, w, D)


# ---- term life -----------------------------------------------------------


def _line(params: ModelParams, w: float) -> Plan:
    """Full insurance ``b - W`` kept until ruin (or forever at the safe level)."""
    h, r, b = params.h, params.r, params.b
    m = h * b / (r + h)
    if w >= m:
        return [Phase("line", w, b - w, _INF, True)]
    if w == 0.0:
        return list(_RUIN)
    t0 = math.log(m / (m - w)) / (r + h)
    return [Phase("line", w, b - w, t0, True)] + _RUIN


def _term_wait(params: ModelParams, w: float) -> Plan:
    m = tl.term_safe_level(params)
    if w >= m:
        return _line(params, w)
    if w == 0.0:
        return list(_RUIN)
    t = _hold_time(params, w, 0.0, m)
    return _seq([Phase("hold", w, 0.0, t, False)], _line(params, m))


def _term_never(params: ModelParams, w: float) -> Plan:
    if w == 0.0:
        return list(_RUIN)
    t = _hold_time(params, w, 0.0, params.b)
    return _seq([Phase("hold", w, 0.0, t, False)], [Phase("hold", max(w, params.b), 0.0, _INF, True)])


def _term_optimal(params: ModelParams, w: float) -> Plan:
    sol = tl.solve_term(params)
    if sol.regime is tl.Regime.LAMBDA_GT_R and w < sol.w_star:
        return _line(params, w)
    return _term_wait(params, w)


# ---- whole life ----------------------------------------------------------


def _whole_secure(params: ModelParams, w: float, D: float) -> Plan:
    return [Phase("hold", w, max(D, params.b - w), _INF, True)]


def _whole_hold_to_line(params: ModelParams, w: float, D: float) -> Plan:
    """Hold ``D`` while wealth falls to ``b - D``, then track the line."""
    target = params.b - D
    if w <= target:
        return _line(params, w)
    t = _hold_time(params, w, D, target)
    return _seq([Phase("hold", w, D, t, True)], _line(params, target))


def _whole_hold_to_ruin(params: ModelParams, w: float, D: float) -> Plan:
    """Never buy more. Success while wealth plus benefit is at least ``b``."""
    if w == 0.0:
        return list(_RUIN)
    b, r, h = params.b, params.r, params.h
    c = h * D / r
    gap = b - D
    if w > c or w == c:
        # wealth rises or stays put: no ruin
        if w >= gap:
            return [Phase("hold", w, D, _INF, True)]
        if w == c:
            return [Phase("hold", w, D, _INF, False)]
        t = _hold_time(params, w, D, gap)
        return _seq([Phase("hold", w, D, t, False)], [Phase("hold", gap, D, _INF, True)])
    t0 = _hold_time(params, w, D, 0.0)
    if gap <= 0.0:
        return [Phase("hold", w, D, t0, True)] + _RUIN
    if w <= gap:
        return [Phase("hold", w, D, t0, False)] + _RUIN
    t1 = _hold_time(params, w, D, gap)
    t2 = _hold_time(params, gap, D, 0.0)
    return [Phase("hold", w, D, t1, True), Phase("hold", gap, D, t2, False)] + _RUIN


def _whole_wait_to_safe(params: ModelParams, w: float, D: float) -> Plan:
    m = wl.wait_level(params)
    if w == 0.0:
        return list(_RUIN)
    if w >= m:
        return _whole_secure(params, w, D)
    t = _hold_time(params, w, D, m)
    return _seq([Phase("hold", w, D, t, False)], _line(params, m))


def _whole_buy_now(params: ModelParams, w: float, D: float) -> Plan:
    if w == 0.0:
        return list(_RUIN)
    if w >= wl.safe_level_whole(params, D):
        return _whole_secure(params, w, D)
    if D >= params.b:
        return _whole_hold_to_ruin(params, w, D)
    if w + D < params.b:
        return _line(params, w)
    return _whole_hold_to_line(params, w, D)


def _whole_optimal(params: ModelParams, w: float, D: float) -> Plan:
    if w == 0.0:
        return list(_RUIN)
    if w >= wl.safe_level_whole(params, D):
        return _whole_secure(params, w, D)
    region = wl.classify_region(params, WealthState(w, D))
    if region is wl.RegionLabel.SAFE:
        return _whole_secure(params, w, D)
    if region is wl.RegionLabel.R0:
        return _whole_hold_to_ruin(params, w, D)
    if region is wl.RegionLabel.RA:
        return _whole_hold_to_line(params, w, D)
    if region is wl.RegionLabel.RB_WAIT:
        return _whole_wait_to_safe(params, w, D)
    return _line(params, w)


def _whole_threshold(params: ModelParams, w: float, D: float, x: float) -> Plan:
    if w == 0.0:
        return list(_RUIN)
    if w < x:
        return _whole_buy_now(params, w, D)
    if w >= wl.safe_level_whole(params, D):
        return _whole_secure(params, w, D)
    c = params.h * D / params.r
    if w > c:
        return _whole_wait_to_safe(params, w, D)
    if w == c:
        return [Phase("hold", w, D, _INF, w + D >= params.b)]
    target = max(x, params.b - D, 0.0)
    if w <= target:
        return _whole_buy_now(params, w, D)
    t = _hold_time(params, w, D, target)
    head = [Phase("hold", w, D, t, w + D >= params.b)]
    if target == 0.0:
        return head + _RUIN
    return _seq(head, _whole_buy_now(params, target, D))


# ---- dispatch ------------------------------------------------------------


def _admissible_threshold(params: ModelParams, product: Product, state: WealthState, x: float) -> None:
    if x < 0 or math.isnan(x):
        raise InadmissibleStrategyError(f"threshold must be non-negative, got {x!r}")
    if product in (Product.SP, Product.SP_CASH):
        top = params.H * params.b
    elif product is Product.TERM:
        top = tl.term_safe_level(params)
    else:
        top = wl.safe_level_whole(params, state.D)
    if x > top * (1.0 + 1e-12):
        raise InadmissibleStrategyError(f"threshold {x} exceeds the safe level {top}")


def build_plan(params: ModelParams, product: Product | str, strategy: StrategySpec, state: WealthState) -> Plan:
    """Compile ``strategy`` started at ``state`` into its deterministic plan."""
    product = Product.parse(product)
    require_positive_interest(params)
    w, D = state.w, state.D
    if isinstance(strategy, (ThresholdBuy, SurrenderBelow)):
        _admissible_threshold(params, product, state, strategy.w_threshold)
    if isinstance(strategy, SurrenderBelow) and product is not Product.SP_CASH:
        raise InadmissibleStrategyError(f"surrender is not available for product {product.value!r}")
    if isinstance(strategy, (OptimalSP, OptimalSPCash, OptimalTerm, OptimalWhole)):
        if not isinstance(strategy, _OPTIMAL[product]):
            raise InadmissibleStrategyError(
                f"{strategy_name(strategy)} is not the optimal strategy for product {product.value!r}"
            )

    if product in (Product.SP, Product.SP_CASH):
        if isinstance(strategy, OptimalSP):
            return _sp_wait_then_buy(params, w, D)
        if isinstance(strategy, OptimalSPCash):
            x = sp.surrender_threshold(params, D) if D < params.b else 0.0
            return _sp_surrender(params, w, D, x)
        if isinstance(strategy, NeverBuy):
            return _sp_never_buy(params, w, D)
        if isinstance(strategy, BuyNowFull):
            return _sp_buy_now(params, w, D)
        if isinstance(strategy, ThresholdBuy):
            return _sp_threshold_plan(params, w, D, strategy.w_threshold)
        return _sp_surrender(params, w, D, strategy.w_threshold)

    if product is Product.TERM:
        if D != 0.0:
            raise InadmissibleStrategyError("term life states carry no in-force benefit; use D = 0")
        if isinstance(strategy, OptimalTerm):
            return _term_optimal(params, w)
        if isinstance(strategy, NeverBuy):
            return _term_never(params, w)
        if isinstance(strategy, BuyNowFull):
            return _line(params, w)
        if w < strategy.w_threshold:
            return _line(params, w)
        return _term_wait(params, w)

    if isinstance(strategy, OptimalWhole):
        return _whole_optimal(params, w, D)
    if isinstance(strategy, NeverBuy):
        return _whole_hold_to_ruin(params, w, D)
    if isinstance(strategy, BuyNowFull):
        return _whole_buy_now(params, w, D)
    return _whole_threshold(params, w, D, strategy.w_threshold)


def alternative_strategies(params: ModelParams, product: Product | str, state: WealthState) -> list[StrategySpec]:
    """The built-in family of alternatives admissible at ``state``."""
    product = Product.parse(product)
    out: list[StrategySpec] = [NeverBuy(), BuyNowFull()]
    if product in (Product.SP, Product.SP_CASH):
        top = params.H * params.b
    elif product is Product.TERM:
        top = tl.term_safe_level(params)
    else:
        top = wl.safe_level_whole(params, state.D)
    for frac in (0.25, 0.5, 0.75):
        out.append(ThresholdBuy(frac * top))
    if product is Product.SP_CASH:
        for frac in (0.25, 0.5, 0.75):
            out.append(SurrenderBelow(frac * top))
    return out
