"""Instantaneous term life insurance paid by a continuous premium.

Coverage ``D`` costs ``h D`` per year and may be changed at any time. The
game ends unsuccessfully if wealth reaches zero before death. Waiting is
optimal everywhere when ``lam <= r``; when ``lam > r`` full insurance
``b - w`` is optimal below a critical wealth ``w*``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from .model import (
    DomainError,
    ModelParams,
    continuous_premium_rate,
    rates_equal,
    validate,
)
from .numerics import power, x_star


class Regime(str, enum.Enum):
    LAMBDA_LE_R = "lambda<=r"
    LAMBDA_GT_R = "lambda>r"


@dataclass(frozen=True)
class TermSolution:
    safe_level: float
    w_star: Optional[float]
    regime: Regime

    def __post_init__(self) -> None:
        if self.w_star is not None and not 0.0 < self.w_star <= self.safe_level:
            raise AssertionError(f"w* = {self.w_star} outside (0, {self.safe_level}]")


def term_safe_level(params: ModelParams) -> float:
    """``h b / (r + h)``: investment income ``r w`` funds coverage ``b - w``."""
    h = continuous_premium_rate(params)
    return h * params.b / (params.r + h)


@functools.lru_cache(maxsize=512)
def solve_term(params: ModelParams) -> TermSolution:
    """Safe level, regime and (when ``lam > r``) the critical wealth ``w*``.

    ``w*`` is the interior zero of
    ``x**(lam/r) + (1 - x)**(lam/(r+h)) - 1`` mapped back through
    ``x = (r + h) w / (h b)``. At ``r = 0`` the waiting region is empty and
    ``w*`` equals the safe level ``b``.
    """
    validate(params)
    h = continuous_premium_rate(params)
    safe = term_safe_level(params)
    if params.r == 0.0:
        return TermSolution(safe, safe, Regime.LAMBDA_GT_R)
    if params.lam <= params.r:
        return TermSolution(safe, None, Regime.LAMBDA_LE_R)
    a = params.lam / params.r
    c = params.lam / (params.r + h)
    if not c < 1.0:
        # h >= lam gives c < 1 for every r > 0
        raise AssertionError(f"exponent lam/(r+h) = {c} is not below 1")
    xs = x_star(a, c)
    return TermSolution(safe, safe * xs, Regime.LAMBDA_GT_R)


def _check_w(w: float) -> None:
    if w < 0 or math.isnan(w):
        raise DomainError(f"wealth must be non-negative, got {w!r}")


def phi_insure(params: ModelParams, w: float) -> float:
    """Success probability under full insurance ``b - w`` until ruin."""
    h = continuous_premium_rate(params)
    hb = h * params.b
    base = (hb - (params.r + h) * w) / hb
    if base <= 0.0:
        return 1.0
    return 1.0 - power(base, params.lam / (params.r + h))


def phi_wait(params: ModelParams, w: float) -> float:
    """Success probability when waiting for wealth ``w e^{rt}`` to reach the safe level."""
    safe = term_safe_level(params)
    if w >= safe:
        return 1.0
    return power(w / safe, params.lam / params.r)


def phi_term(params: ModelParams, w: float) -> float:
    """Maximum probability of reaching the goal before ruin."""
    _check_w(w)
    sol = solve_term(params)
    if w >= sol.safe_level:
        return 1.0
    if sol.regime is Regime.LAMBDA_GT_R and w < sol.w_star:
        return phi_insure(params, w)
    return phi_wait(params, w)


def optimal_coverage_term(params: ModelParams, w: float) -> float:
    """Optimal coverage at wealth ``w``.

    ``b - w`` below ``w*`` and at or above the safe level (where it is what
    locks in the goal), 0 elsewhere; at ``w = w*`` the waiting rule is used.
    """
    _check_w(w)
    sol = solve_term(params)
    if w >= sol.safe_level:
        return max(params.b - w, 0.0)
    if sol.regime is Regime.LAMBDA_GT_R and w < sol.w_star:
        return params.b - w
    return 0.0


def _bequest_wait(params: ModelParams, w: float) -> float:
    lam, r, b = params.lam, params.r, params.b
    h = continuous_premium_rate(params)
    safe = term_safe_level(params)
    if w >= safe:
        return b
    if rates_equal(lam, r):
        if w == 0.0:
            return 0.0
        return w * ((r + h) / h + math.log(safe / w))
    p = power(w / safe, lam / r)
    return b * (1.0 + h / (r + h) * lam / (r - lam)) * p - lam * w / (r - lam)


def expected_bequest_term(params: ModelParams, w: float) -> float:
    """Expected wealth at death (zero after ruin) under the optimal coverage rule."""
    _check_w(w)
    sol = solve_term(params)
    if w > sol.safe_level * (1.0 + 1e-12):
        raise DomainError(f"w = {w} exceeds the safe level {sol.safe_level}")
    if sol.regime is Regime.LAMBDA_GT_R and w < sol.w_star:
        return params.b * phi_insure(params, w)
    if params.r == 0.0:
        return params.b
    return _bequest_wait(params, w)


class HittingTimes(NamedTuple):
    tau_zero: float
    tau_safe: float


def hitting_times_term(params: ModelParams, w: float) -> HittingTimes:
    """Ruin time under full insurance and safe-level time under waiting.

    Both are returned regardless of which rule is optimal at ``w``.
    """
    _check_w(w)
    h = continuous_premium_rate(params)
    hb = h * params.b
    safe = term_safe_level(params)
    if w == 0.0:
        tau_zero = 0.0
    elif w >= safe:
        tau_zero = math.inf
    else:
        tau_zero = math.log(hb / (hb - (params.r + h) * w)) / (params.r + h)
    if w >= safe:
        tau_safe = 0.0
    elif w == 0.0 or params.r == 0.0:
        tau_safe = math.inf
    else:
        tau_safe = math.log(safe / w) / params.r
    return HittingTimes(tau_zero, tau_safe)


SWEEP_AXES = ("lambda", "r", "h", "b")


def bumped(params: ModelParams, axis: str, value: float) -> ModelParams:
    """Copy of ``params`` with one axis moved.

    ``lambda`` keeps the loading fixed (so ``h`` scales with ``lam``); ``h``
    keeps ``lam`` fixed and adjusts the loading.
    """
    if axis == "lambda":
        return params.replace(lam=value)
    if axis == "r":
        return params.replace(r=value)
    if axis == "b":
        return params.replace(b=value)
    if axis == "h":
        return params.replace(theta_bar=value / params.lam - 1.0)
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


@dataclass(frozen=True)
class SensitivityRow:
    axis: str
    value: float
    w_star: Optional[float]
    safe_level: float
    regime: Regime


@dataclass
class SensitivityTable:
    rows: list[SensitivityRow] = field(default_factory=list)

    def for_axis(self, axis: str) -> list[SensitivityRow]:
        return sorted((row for row in self.rows if row.axis == axis), key=lambda row: row.value)

    def monotonicity_violations(self, rel_tol: float = 1e-9) -> list[str]:
        """Breaks of the comparative statics in ``lambda`` (up), ``r`` (down) and ``b`` (proportional).

        Rows outside the ``lam > r`` regime are skipped.
        """
        problems: list[str] = []
        for axis, sign in (("lambda", 1), ("r", -1)):
            rows = [row for row in self.for_axis(axis) if row.w_star is not None]
            for prev, cur in zip(rows, rows[1:]):
                if sign * (cur.w_star - prev.w_star) <= 0:
                    problems.append(
                        f"w* not {'increasing' if sign > 0 else 'decreasing'} in {axis}: "
                        f"{prev.value}->{cur.value} gives {prev.w_star}->{cur.w_star}"
                    )
        rows = [row for row in self.for_axis("b") if row.w_star is not None]
        ratios = [row.w_star / row.value for row in rows]
        for row, ratio in zip(rows, ratios):
            if abs(ratio - ratios[0]) > rel_tol * abs(ratios[0]):
                problems.append(f"w*/b not constant: {ratio} at b={row.value} vs {ratios[0]}")
        return problems


def w_star_sensitivities(
    params: ModelParams, bumps: Mapping[str, Iterable[float]]
) -> SensitivityTable:
    """Evaluate ``w*`` over one-at-a-time parameter bumps.

    A bump that leaves the ``lam > r`` regime yields a row with ``w_star=None``
    rather than an error.
    """
    table = SensitivityTable()
    for axis, values in bumps.items():
        for value in values:
            sol = solve_term(bumped(params, axis, float(value)))
            table.rows.append(SensitivityRow(axis, float(value), sol.w_star, sol.safe_level, sol.regime))
    return table
