"""Finite-difference checks of the optimality inequalities and bequest ODEs.

Each product is described by a :class:`Surface`: the value and expected
bequest as functions of ``(w, D)``, a branch label per point (``None``
outside the domain), the inequality terms whose maximum must vanish, and the
linear ODE the expected bequest solves on each branch.

Derivatives use a relative step. A central stencil is used when both
neighbours lie on the same branch as the point, a second-order one-sided
stencil when only one side does, and the point is skipped (counted as a
seam point) otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..model import ModelParams, WealthState, require_positive_interest
from ..products import Product
from .. import single_premium as sp
from .. import term_life as tl
from .. import whole_life as wl

Fn = Callable[[float, float], float]

# relative step for the one-sided reflecting-condition derivative in D
REFLECT_STEP = 1e-4


@dataclass(frozen=True)
class GridSpec:
    n_w: int = 200
    n_d: int = 200
    d_max: Optional[float] = None
    rel_step: float = 1e-6
    tol: float = 1e-5

    def __post_init__(self) -> None:
        if self.n_w < 2 or self.n_d < 1:
            raise ValueError("grid needs n_w >= 2 and n_d >= 1")
        if not 0 < self.rel_step < 1e-2:
            raise ValueError("rel_step must lie in (0, 1e-2)")


@dataclass
class Surface:
    product: Product
    value: Fn
    bequest: Fn
    branch: Callable[[float, float], Optional[str]]
    vi_terms: Callable[[float, float, float, float, float], dict[str, float]]
    ode: Callable[[str, float, float, float, float], float]
    points: list[tuple[float, float]]
    one_dimensional: bool = False
    boundary: Callable[[], list[tuple[str, float, float]]] = lambda: []


@dataclass
class ResidualReport:
    product: str
    kind: str
    tol: float
    n_points: int = 0
    n_excluded: int = 0
    max_binding: float = 0.0
    max_violation: dict[str, float] = field(default_factory=dict)
    boundary: dict[str, float] = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.n_points == 0:
            return False
        if self.max_binding > self.tol:
            return False
        if any(v > self.tol for v in self.max_violation.values()):
            return False
        return all(v <= self.tol for v in self.boundary.values())

    def summary(self) -> dict:
        return {
            "product": self.product,
            "kind": self.kind,
            "tol": self.tol,
            "n_points": self.n_points,
            "n_excluded": self.n_excluded,
            "max_binding": self.max_binding,
            "max_violation": dict(self.max_violation),
            "boundary": dict(self.boundary),
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def _step(x: float, rel: float, scale: float) -> float:
    return rel * (abs(x) if x != 0.0 else scale)


def _partial(f: Fn, branch, lab: str, w: float, D: float, axis: int, h: float) -> Optional[float]:
    def at(k: int) -> tuple[Optional[str], float, float]:
        ww, dd = (w + k * h, D) if axis == 0 else (w, D + k * h)
        if ww < 0.0 or dd < 0.0:
            return None, ww, dd
        return branch(ww, dd), ww, dd

    (lp, wp, dp), (lm, wm, dm) = at(1), at(-1)
    if lp == lab and lm == lab:
        return (f(wp, dp) - f(wm, dm)) / (2.0 * h)
    f0 = f(w, D)
    if lp == lab:
        l2, w2, d2 = at(2)
        if l2 == lab:
            return (-3.0 * f0 + 4.0 * f(wp, dp) - f(w2, d2)) / (2.0 * h)
    if lm == lab:
        l2, w2, d2 = at(-2)
        if l2 == lab:
            return (3.0 * f0 - 4.0 * f(wm, dm) + f(w2, d2)) / (2.0 * h)
    return None


def _gradient(s: Surface, f: Fn, lab: str, w: float, D: float, spec: GridSpec, scale: float):
    gw = _partial(f, s.branch, lab, w, D, 0, _step(w, spec.rel_step, scale))
    if s.one_dimensional:
        return gw, 0.0
    gd = _partial(f, s.branch, lab, w, D, 1, _step(D, spec.rel_step, scale))
    return gw, gd


def check_variational_inequality(
    params: ModelParams, product: Product | str, grid_spec: GridSpec | None = None, keep_rows: bool = False
) -> ResidualReport:
    """Residuals of the optimality inequality at every grid point.

    ``max_binding`` is the largest ``|max(terms)|`` and ``max_violation[t]``
    the largest positive part of term ``t``, each divided by ``|phi| + 1``.
    """
    spec = grid_spec or GridSpec()
    s = build_surface(params, product, spec)
    rep = ResidualReport(s.product.value, "vi", spec.tol)
    for w, D in s.points:
        lab = s.branch(w, D)
        if lab is None:
            continue
        gw, gd = _gradient(s, s.value, lab, w, D, spec, params.b)
        if gw is None or gd is None:
            rep.n_excluded += 1
            continue
        v = s.value(w, D)
        terms = s.vi_terms(w, D, v, gw, gd)
        scale = abs(v) + 1.0
        binding = abs(max(terms.values())) / scale
        rep.n_points += 1
        rep.max_binding = max(rep.max_binding, binding)
        for name, t in terms.items():
            rep.max_violation[name] = max(rep.max_violation.get(name, 0.0), max(t, 0.0) / scale)
        if keep_rows:
            rep.rows.append({"w": w, "D": D, "branch": lab, "phi": v, "phi_w": gw, "phi_D": gd,
                             **{k: t for k, t in terms.items()}, "binding": binding})
    return rep


def check_bvp_expected_bequest(
    params: ModelParams, product: Product | str, grid_spec: GridSpec | None = None, keep_rows: bool = False
) -> ResidualReport:
    """ODE residuals of the expected bequest on every branch, plus boundary conditions."""
    spec = grid_spec or GridSpec()
    s = build_surface(params, product, spec)
    rep = ResidualReport(s.product.value, "bvp", spec.tol)
    for w, D in s.points:
        lab = s.branch(w, D)
        if lab is None:
            continue
        gw, _ = _gradient(s, s.bequest, lab, w, D, spec, params.b)
        if gw is None:
            rep.n_excluded += 1
            continue
        E = s.bequest(w, D)
        res = abs(s.ode(lab, w, D, E, gw)) / (abs(E) + 1.0)
        rep.n_points += 1
        rep.max_binding = max(rep.max_binding, res)
        if keep_rows:
            rep.rows.append({"w": w, "D": D, "branch": lab, "E": E, "E_w": gw, "residual": res})
    for name, got, want in s.boundary():
        err = abs(got - want) / (abs(want) + 1.0)
        rep.boundary[name] = max(rep.boundary.get(name, 0.0), err)
    return rep


# ---- surfaces ------------------------------------------------------------


def _unit_grid(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _sp_surface(params: ModelParams, spec: GridSpec, cash: bool) -> Surface:
    H, lam, r, b, rho = params.H, params.lam, params.r, params.b, params.rho
    product = Product.SP_CASH if cash else Product.SP

    def branch(w: float, D: float) -> Optional[str]:
        if D >= b or w >= H * (b - D):
            return None
        if cash and D > 0.0 and w < (1.0 - rho) * H * (b - D):
            return "surrender"
        return "wait"

    def value(w: float, D: float) -> float:
        st = WealthState(w, D)
        return sp.phi_cash(params, st) if cash else sp.phi_no_cash(params, st)

    def bequest(w: float, D: float) -> float:
        st = WealthState(w, D)
        return sp.expected_bequest_cash(params, st) if cash else sp.expected_bequest_no_cash(params, st)

    def vi_terms(w, D, v, vw, vd):
        out = {"growth": r * w * vw - lam * v, "buy": vd - H * vw}
        if cash:
            out["surrender"] = (1.0 - rho) * H * vw - vd
        return out

    def ode(lab, w, D, E, Ew):
        if lab == "surrender":
            y = w + (1.0 - rho) * H * D
            return lam * (E - y) - r * y * Ew
        return lam * (E - (w + D)) - r * w * Ew

    Ds = np.arange(spec.n_d) * b / spec.n_d
    pts = [(float(u * H * (b - D)), float(D)) for D in Ds for u in _unit_grid(spec.n_w)]

    def boundary():
        out = []
        for D in Ds:
            out.append(("E(safe)=b", bequest(H * (b - D), float(D)), b))
        return out

    return Surface(product, value, bequest, branch, vi_terms, ode, pts, boundary=boundary)


def _term_surface(params: ModelParams, spec: GridSpec) -> Surface:
    sol = tl.solve_term(params)
    lam, r, h, b = params.lam, params.r, params.h, params.b
    m = sol.safe_level

    def branch(w: float, D: float) -> Optional[str]:
        if w >= m:
            return None
        if sol.regime is tl.Regime.LAMBDA_GT_R and w < sol.w_star:
            return "insure"
        return "wait"

    def value(w: float, D: float) -> float:
        return tl.phi_term(params, w)

    def bequest(w: float, D: float) -> float:
        return tl.expected_bequest_term(params, w)

    def vi_terms(w, D, v, vw, vd):
        base = r * w * vw - lam * v
        return {"no_cover": base, "full_cover": base + lam - h * (b - w) * vw}

    def ode(lab, w, D, E, Ew):
        if lab == "insure":
            return lam * (E - b) - ((r + h) * w - h * b) * Ew
        return lam * (E - w) - r * w * Ew

    pts = [(float(u * m), 0.0) for u in _unit_grid(spec.n_w)]

    def boundary():
        out = [("E(safe)=b", tl._bequest_wait(params, m * (1.0 - 1e-13)), b)]
        if sol.regime is tl.Regime.LAMBDA_GT_R:
            out.append(("E(0)=0", bequest(0.0, 0.0), 0.0))
        return out

    return Surface(Product.TERM, value, bequest, branch, vi_terms, ode, pts, True, boundary)


def _whole_surface(params: ModelParams, spec: GridSpec) -> Surface:
    lam, r, h, b = params.lam, params.r, params.h, params.b
    m = wl.wait_level(params)
    kink = wl.coverage_kink(params)
    d_max = spec.d_max if spec.d_max is not None else 1.5 * b
    phi_of = {
        "R0": wl.phi_r0, "Ra": wl.phi_ra, "RbWait": wl.phi_rb_wait, "RbJump": wl.phi_rb_jump,
    }
    beq_of = {
        "R0": wl.bequest_r0, "Ra": wl.bequest_ra, "RbWait": wl.bequest_rb_wait, "RbJump": wl.bequest_rb_jump,
    }

    def branch(w: float, D: float) -> Optional[str]:
        if w < 0.0 or D < 0.0 or w >= wl.safe_level_whole(params, D) * (1.0 - 1e-12):
            return None
        return wl.classify_region(params, WealthState(w, D)).value

    def value(w: float, D: float) -> float:
        return wl.phi_whole(params, WealthState(w, D))

    def bequest(w: float, D: float) -> float:
        return wl.expected_bequest_whole(params, WealthState(w, D))

    def vi_terms(w, D, v, vw, vd):
        goal = 1.0 if w + D >= b else 0.0
        return {"hold": (r * w - h * D) * vw - lam * (v - goal), "buy": vd}

    def ode(lab, w, D, E, Ew):
        if lab == "RbJump":
            return lam * (E - b) - ((r + h) * w - h * b) * Ew
        return lam * (E - (w + D)) - (r * w - h * D) * Ew

    Ds = np.linspace(0.0, d_max, spec.n_d)
    pts = [
        (float(u * wl.safe_level_whole(params, float(D))), float(D))
        for D in Ds
        for u in _unit_grid(spec.n_w)
    ]

    def boundary():
        out = []
        for D in Ds:
            D = float(D)
            if D >= b:
                out.append(("E(0,D)=0", bequest(0.0, D), 0.0))
            elif D > kink:
                w0 = b - D
                # Ra pinches off at D = rb/(r+h) and E_D blows up there, so the step is
                # taken relative to the distance from that corner; the tiny grid step
                # would be swamped by rounding in the nearly cancelling stencil
                dd = REFLECT_STEP * min(D, D - kink)
                # right-sided second-order derivative along D at the lower edge of Ra
                f = lambda x: wl.bequest_ra(params, w0, x)  # noqa: E731
                slope = (-3.0 * f(D) + 4.0 * f(D + dd) - f(D + 2 * dd)) / (2.0 * dd)
                out.append(("E_D(b-D,D)=0", slope, 0.0))
            else:
                out.append(("E(wbar,D)=b", wl.bequest_rb_wait(params, m * (1.0 - 1e-13), D), b))
        for u in _unit_grid(spec.n_w):
            w = float(u * h * b / r)
            out.append(("E(w,b-)=E(w,b)", wl.bequest_ra(params, w, b * (1.0 - 1e-13)), wl.bequest_r0(params, w, b)))
        if tl.solve_term(params).regime is tl.Regime.LAMBDA_GT_R:
            out.append(("E(0,0)=0", wl.bequest_rb_jump(params, 0.0), 0.0))
        return out

    def value_branch(w: float, D: float) -> float:
        lab = branch(w, D)
        return phi_of[lab](params, w, D) if lab else value(w, D)

    def bequest_branch(w: float, D: float) -> float:
        lab = branch(w, D)
        return beq_of[lab](params, w, D) if lab else bequest(w, D)

    return Surface(Product.WHOLE, value_branch, bequest_branch, branch, vi_terms, ode, pts, boundary=boundary)


def build_surface(params: ModelParams, product: Product | str, spec: GridSpec) -> Surface:
    product = Product.parse(product)
    require_positive_interest(params)
    if product is Product.SP:
        return _sp_surface(params, spec, cash=False)
    if product is Product.SP_CASH:
        return _sp_surface(params, spec, cash=True)
    if product is Product.TERM:
        return _term_surface(params, spec.__class__(n_w=spec.n_w, n_d=1, rel_step=spec.rel_step, tol=spec.tol))
    return _whole_surface(params, spec)
