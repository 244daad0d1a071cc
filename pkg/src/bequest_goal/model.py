"""Model parameters, wealth states and premium scales.

All rates are continuous per-year rates; currency and time units are
abstract. A :class:`ModelParams` instance is validated on construction and
is immutable afterwards.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping


class BequestError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(BequestError, ValueError):
    """One or more model parameters violate their invariants.

    ``violations`` holds ``(field, message)`` pairs, one per broken rule.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        text = "; ".join(f"{name}: {msg}" for name, msg in self.violations)
        super().__init__(f"invalid parameters ({text})")

    @property
    def fields(self) -> list[str]:
        return [name for name, _ in self.violations]


class DomainError(BequestError, ValueError):
    """A state or argument lies outside the domain of an operation."""


def _check(params: "ModelParams") -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    for name in ("b", "r", "lam", "theta", "theta_bar", "rho"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or math.isnan(value) or math.isinf(value):
            out.append((name, f"must be a finite number, got {value!r}"))
    if out:
        return out
    if params.b <= 0:
        out.append(("b", "bequest goal must be positive"))
    if params.r < 0:
        out.append(("r", "force of interest must be non-negative"))
    if params.lam <= 0:
        out.append(("lam", "force of mortality must be positive"))
    if params.theta < 0:
        out.append(("theta", "single-premium loading must be non-negative"))
    if params.theta_bar < 0:
        out.append(("theta_bar", "continuous-premium loading must be non-negative"))
    if not 0.0 <= params.rho <= 1.0:
        out.append(("rho", "invalid surrender charge: must lie in [0, 1]"))
    if not out and params.r > 0:
        H = (1.0 + params.theta) * params.lam / (params.r + params.lam)
        if H >= 1.0:
            out.append(
                ("theta", f"single premium per unit benefit H = {H:.6g} >= 1; "
                          "no buyer pays a dollar or more for a dollar of benefit")
            )
    return out


@dataclass(frozen=True)
class ModelParams:
    """Market, mortality and pricing parameters.

    Parameters
    ----------
    b : bequest goal, > 0
    r : force of interest, >= 0
    lam : force of mortality, > 0
    theta : proportional loading on the single premium, >= 0
    theta_bar : proportional loading on the continuous premium, >= 0.
        Defaults to ``theta``.
    rho : proportional surrender charge in [0, 1]. ``rho = 1`` means no
        cash value.
    """

    b: float
    r: float
    lam: float
    theta: float = 0.0
    theta_bar: float = field(default=None)  # type: ignore[assignment]
    rho: float = 1.0

    def __post_init__(self) -> None:
        if self.theta_bar is None:
            object.__setattr__(self, "theta_bar", self.theta)
        for name in ("b", "r", "lam", "theta", "theta_bar", "rho"):
            value = getattr(self, name)
            if isinstance(value, int) and not isinstance(value, bool):
                object.__setattr__(self, name, float(value))
        problems = _check(self)
        if problems:
            raise InvalidParameterError(problems)

    # premium scales are cheap; keep them as properties for formula readability
    @property
    def H(self) -> float:
        return single_premium_rate(self)

    @property
    def h(self) -> float:
        return continuous_premium_rate(self)

    def replace(self, **changes: Any) -> "ModelParams":
        data = asdict(self)
        data.update(changes)
        return ModelParams(**data)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelParams":
        """Build from a flat mapping with keys ``b, r, lambda, theta, theta_bar, rho``.

        Missing ``theta`` defaults to 0, missing ``theta_bar`` to ``theta`` and
        missing ``rho`` to 1 (no cash value). ``lam`` is accepted as an alias
        of ``lambda``.
        """
        known = {"b", "r", "lambda", "lam", "theta", "theta_bar", "rho"}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError([(k, "unknown parameter") for k in sorted(unknown)])
        missing = [k for k in ("b", "r") if k not in data]
        if "lambda" not in data and "lam" not in data:
            missing.append("lambda")
        if missing:
            raise InvalidParameterError([(k, "missing") for k in missing])
        lam = data["lambda"] if "lambda" in data else data["lam"]
        theta = data.get("theta", 0.0)
        return cls(
            b=data["b"],
            r=data["r"],
            lam=lam,
            theta=theta,
            theta_bar=data.get("theta_bar", theta),
            rho=data.get("rho", 1.0),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict[str, float]:
        return {
            "b": self.b,
            "r": self.r,
            "lambda": self.lam,
            "theta": self.theta,
            "theta_bar": self.theta_bar,
            "rho": self.rho,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class WealthState:
    """Investable wealth ``w`` and in-force death benefit ``D``."""

    w: float
    D: float = 0.0

    def __post_init__(self) -> None:
        for name in ("w", "D"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise DomainError(f"{name} must be a number, got {value!r}")
            if value < 0:
                raise DomainError(f"{name} must be non-negative, got {value!r}")
            object.__setattr__(self, name, float(value))


def validate(params: ModelParams) -> ModelParams:
    """Re-check every invariant and return ``params`` unchanged."""
    problems = _check(params)
    if problems:
        raise InvalidParameterError(problems)
    return params


def require_positive_interest(params: ModelParams) -> ModelParams:
    """Reject ``r = 0`` for formulas carrying the exponent ``lam / r``."""
    validate(params)
    if params.r <= 0:
        raise InvalidParameterError(
            [("r", "this operation requires r > 0 (exponents lam / r are undefined at r = 0)")]
        )
    return params


def single_premium_rate(params: ModelParams) -> float:
    """Single premium per unit of whole-life benefit, ``(1 + theta) lam / (r + lam)``."""
    return (1.0 + params.theta) * params.lam / (params.r + params.lam)


def continuous_premium_rate(params: ModelParams) -> float:
    """Continuous premium rate per unit of coverage, ``(1 + theta_bar) lam``."""
    return (1.0 + params.theta_bar) * params.lam


def rates_equal(lam: float, r: float, rel: float = 1e-8) -> bool:
    """True when ``lam`` and ``r`` are close enough to use the ``lam == r`` limit."""
    return abs(lam - r) <= rel * max(abs(lam), abs(r))
