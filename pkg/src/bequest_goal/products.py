"""Uniform dispatch over the four insurance products.

Every product is evaluated at a :class:`WealthState`; term life ignores
``D`` (coverage is chosen afresh at every instant).
"""

from __future__ import annotations

import enum

from . import single_premium as sp
from . import term_life as tl
from . import whole_life as wl
from .model import DomainError, ModelParams, WealthState, require_positive_interest


class Product(str, enum.Enum):
    SP = "sp"
    SP_CASH = "sp-cash"
    TERM = "term"
    WHOLE = "whole"

    @classmethod
    def parse(cls, value: "Product | str") -> "Product":
        if isinstance(value, Product):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise DomainError(f"unknown product {value!r}; expected one of {names}") from None


def safe_level(params: ModelParams, product: Product | str, D: float = 0.0) -> float:
    """Wealth from which the goal is certain. Returns 0 for single premium with ``D >= b``."""
    product = Product.parse(product)
    if product in (Product.SP, Product.SP_CASH):
        require_positive_interest(params)
        return 0.0 if D >= params.b else sp.safe_level_sp(params, D)
    if product is Product.TERM:
        return tl.term_safe_level(params)
    return wl.safe_level_whole(params, D)


def success_probability(params: ModelParams, product: Product | str, state: WealthState) -> float:
    product = Product.parse(product)
    if product is Product.SP:
        return sp.phi_no_cash(params, state)
    if product is Product.SP_CASH:
        return sp.phi_cash(params, state)
    if product is Product.TERM:
        return tl.phi_term(params, state.w)
    return wl.phi_whole(params, state)


def expected_bequest(params: ModelParams, product: Product | str, state: WealthState) -> float:
    product = Product.parse(product)
    if product is Product.SP:
        return sp.expected_bequest_no_cash(params, state)
    if product is Product.SP_CASH:
        return sp.expected_bequest_cash(params, state)
    if product is Product.TERM:
        return tl.expected_bequest_term(params, state.w)
    return wl.expected_bequest_whole(params, state)


def optimal_action(params: ModelParams, product: Product | str, state: WealthState):
    """Action object for single premium and whole life, coverage amount for term life."""
    product = Product.parse(product)
    if product is Product.SP:
        return sp.optimal_action_no_cash(params, state)
    if product is Product.SP_CASH:
        return sp.optimal_action_cash(params, state)
    if product is Product.TERM:
        return tl.optimal_coverage_term(params, state.w)
    return wl.optimal_action_whole(params, state)


def describe_action(action) -> str:
    """Short text label, e.g. ``BuyAdditional(0.7)``."""
    if isinstance(action, float):
        return f"Coverage({action:.6g})"
    fields = getattr(action, "__dataclass_fields__", {})
    if not fields:
        return type(action).__name__
    args = ", ".join(f"{getattr(action, name):.6g}" for name in fields)
    return f"{type(action).__name__}({args})"


def region(params: ModelParams, product: Product | str, state: WealthState) -> str:
    """Name of the action region containing ``state``."""
    product = Product.parse(product)
    if product is Product.WHOLE:
        return wl.classify_region(params, state).value
    if state.w >= safe_level(params, product, state.D) * (1.0 - 1e-12):
        return "Safe"
    if product is Product.TERM:
        sol = tl.solve_term(params)
        if sol.regime is tl.Regime.LAMBDA_GT_R and state.w < sol.w_star:
            return "Insure"
        return "Wait"
    if product is Product.SP_CASH and state.D > 0 and state.w < sp.surrender_threshold(params, state.D):
        return "Surrender"
    return "Wait"
