"""Root finding, the critical-wealth test functions and finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class RootFindingError(ArithmeticError):
    pass


class NoSignChangeError(RootFindingError):
    pass


class MaxIterationsError(RootFindingError):
    pass


@dataclass(frozen=True)
class RootSpec:
    lo: float
    hi: float
    tol_abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"bracket must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.tol_abs <= 0:
            raise ValueError("tol_abs must be positive")


def bisect_bracket(f: Callable[[float], float], spec: RootSpec) -> tuple[float, float]:
    """Shrink ``[spec.lo, spec.hi]`` around a sign change of ``f``.

    Returns the final bracket, of width at most ``spec.tol_abs`` (or a
    degenerate bracket at an exact zero).
    """
    lo, hi = spec.lo, spec.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, lo
    if fhi == 0.0:
        return hi, hi
    if (flo < 0) == (fhi < 0):
        raise NoSignChangeError(
            f"f has the same sign at both ends of [{lo!r}, {hi!r}] ({flo!r}, {fhi!r})"
        )
    for _ in range(spec.max_iter):
        if hi - lo <= spec.tol_abs:
            return lo, hi
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            # bracket is down to adjacent doubles
            return lo, hi
        fmid = f(mid)
        if fmid == 0.0:
            return mid, mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    if hi - lo <= spec.tol_abs:
        return lo, hi
    raise MaxIterationsError(
        f"bisection did not reach width {spec.tol_abs} in {spec.max_iter} iterations"
    )


def find_root(f: Callable[[float], float], spec: RootSpec) -> float:
    """Bisection root of ``f`` inside ``spec``'s bracket (midpoint of the final bracket)."""
    lo, hi = bisect_bracket(f, spec)
    return lo + 0.5 * (hi - lo)


def power(x: float, a: float) -> float:
    """``x ** a`` for ``x >= 0`` via ``exp(a ln x)`` with exact endpoint cases."""
    if x == 0.0:
        if a > 0:
            return 0.0
        if a == 0:
            return 1.0
        return math.inf
    if x == 1.0:
        return 1.0
    if x < 0:
        raise ValueError(f"power() needs x >= 0, got {x!r}")
    return math.exp(a * math.log(x))


def _check_ac(a: float, c: float) -> None:
    if not (0.0 < c < 1.0 < a):
        raise ValueError(f"need 0 < c < 1 < a, got a={a!r}, c={c!r}")


def f1(x, a: float, c: float):
    """``x**a + (1 - x)**c - 1`` on [0, 1]; zero at both endpoints.

    Accepts scalars or arrays. Evaluated in a cancellation-free form on each
    half of the interval.
    """
    _check_ac(a, c)
    xa = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.power(xa, a) + np.expm1(c * np.log1p(-xa))
        high = np.expm1(a * np.log(xa)) + np.power(1.0 - xa, c)
    out = np.where(xa < 0.5, low, high)
    out = np.where((xa == 0.0) | (xa == 1.0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def f2(x, a: float, c: float):
    """``1 - (c/a)(1 - x)**(c - 1) - (1 - c/a)(1 - x)**c`` on [0, 1)."""
    _check_ac(a, c)
    xa = np.asarray(x, dtype=float)
    if np.any(xa >= 1.0):
        raise ValueError("f2 is defined on [0, 1) only")
    y = 1.0 - xa
    out = 1.0 - (c / a) * np.power(y, c - 1.0) - (1.0 - c / a) * np.power(y, c)
    out = np.where(xa == 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def f3(x, a: float, c: float):
    """``1 - (a/c) x**(a - 1) + (a/c - 1) x**a`` on [0, 1]."""
    _check_ac(a, c)
    xa = np.asarray(x, dtype=float)
    k = a / c
    out = 1.0 - k * np.power(xa, a - 1.0) + (k - 1.0) * np.power(xa, a)
    out = np.where(xa == 1.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def x_star(a: float, c: float, tol_abs: float = 1e-15) -> float:
    """Unique interior zero of :func:`f1` for ``0 < c < 1 < a``.

    ``f1`` is negative on ``(0, x*)`` and positive on ``(x*, 1)``, so a bracket
    is found by walking geometrically toward whichever endpoint the root is
    near; the root can sit within 1e-3 of either end for realistic inputs.
    When it is closer to an endpoint than the double spacing there, the
    nearest representable interior point is returned.
    """
    _check_ac(a, c)
    g = lambda x: f1(x, a, c)  # noqa: E731
    mid = g(0.5)
    if mid == 0.0:
        return 0.5
    if mid < 0:
        lo = 0.5
        hi = None
        for k in range(2, 1075):
            cand = 1.0 - 2.0 ** (-k)
            if cand == 1.0:
                break
            if g(cand) > 0:
                hi = cand
                break
            lo = cand
    else:
        hi = 0.5
        lo = None
        for k in range(2, 1075):
            cand = 2.0 ** (-k)
            if g(cand) < 0:
                lo = cand
                break
            hi = cand
    # root closer to an endpoint than double spacing: f1 keeps one sign on
    # every representable interior point, so the nearest one is returned
    if hi is None:
        return lo
    if lo is None:
        return hi
    return find_root(g, RootSpec(lo, hi, tol_abs=tol_abs, max_iter=400))


def finite_diff(f: Callable[[float], float], x: float, step: float, side: str = "central") -> float:
    """Two-point difference quotient of ``f`` at ``x``."""
    if step <= 0:
        raise ValueError("step must be positive")
    if side == "central":
        return (f(x + step) - f(x - step)) / (2.0 * step)
    if side == "right":
        return (f(x + step) - f(x)) / step
    if side == "left":
        return (f(x) - f(x - step)) / step
    raise ValueError(f"side must be 'central', 'left' or 'right', got {side!r}")
