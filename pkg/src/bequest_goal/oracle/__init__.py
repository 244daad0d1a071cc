"""Independent checks of the closed forms: simulation, residuals, dominance."""

from .residuals import GridSpec, ResidualReport, check_bvp_expected_bequest, check_variational_inequality
from .simulate import Comparison, DominanceReport, SimReport, compare_optimal, dominance_test, simulate
from .strategies import (
    BuyNowFull,
    InadmissibleStrategyError,
    NeverBuy,
    OptimalSP,
    OptimalSPCash,
    OptimalTerm,
    OptimalWhole,
    StrategySpec,
    SurrenderBelow,
    ThresholdBuy,
    alternative_strategies,
    build_plan,
    optimal_strategy,
    parse_strategy,
)
from .suite import SuiteReport, run_suite

__all__ = [
    "BuyNowFull",
    "Comparison",
    "DominanceReport",
    "GridSpec",
    "InadmissibleStrategyError",
    "NeverBuy",
    "OptimalSP",
    "OptimalSPCash",
    "OptimalTerm",
    "OptimalWhole",
    "ResidualReport",
    "SimReport",
    "StrategySpec",
    "SuiteReport",
    "SurrenderBelow",
    "ThresholdBuy",
    "alternative_strategies",
    "build_plan",
    "check_bvp_expected_bequest",
    "check_variational_inequality",
    "compare_optimal",
    "dominance_test",
    "optimal_strategy",
    "parse_strategy",
    "run_suite",
    "simulate",
]
