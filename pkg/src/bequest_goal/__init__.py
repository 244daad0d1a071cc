"""Optimal life insurance purchasing for reaching a bequest goal.

Four products are covered: whole life bought by single premium (with or
without a cash value), instantaneous term life and irreversible whole life
paid by a continuous premium. For each one the package gives the maximum
probability of reaching the goal, the optimal action, the free boundaries
and the expected bequest, plus an independent oracle (Monte Carlo and
finite-difference residuals) to check them.
"""

from .estimators import SinglePremiumPolicy, TermLifePolicy, WholeLifePolicy
from .model import (
    BequestError,
    DomainError,
    InvalidParameterError,
    ModelParams,
    WealthState,
    continuous_premium_rate,
    single_premium_rate,
    validate,
)
from .products import Product, expected_bequest, optimal_action, safe_level, success_probability

__all__ = [
    "BequestError",
    "DomainError",
    "InvalidParameterError",
    "ModelParams",
    "Product",
    "SinglePremiumPolicy",
    "TermLifePolicy",
    "WealthState",
    "WholeLifePolicy",
    "continuous_premium_rate",
    "expected_bequest",
    "optimal_action",
    "safe_level",
    "single_premium_rate",
    "success_probability",
    "validate",
]
