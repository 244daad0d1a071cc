"""The verification suite behind ``bequest-goal verify``.

Each check returns a :class:`CheckResult`; the suite passes when all do.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..model import InvalidParameterError, ModelParams, WealthState
from ..numerics import f1, f2, f3, x_star
from ..products import Product
from .. import term_life as tl
from .. import whole_life as wl
from .residuals import GridSpec, check_bvp_expected_bequest, check_variational_inequality

SEAM_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def __post_init__(self) -> None:
        # comparisons against numpy scalars give numpy bools, which json rejects
        self.passed = bool(self.passed)


@dataclass
class SuiteReport:
    params: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"params": self.params, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def lemma_sign_structure(n_draws: int = 1000, n_grid: int = 10_000, seed: int = 0) -> CheckResult:
    """``f1 < 0`` before ``x*`` and ``> 0`` after, ``f2 >= 0`` on ``[0, x*)``, ``f3 <= 0`` on ``[x*, 1]``."""
    rng = np.random.default_rng(seed)
    xs = (np.arange(1, n_grid) / n_grid)
    worst = {"f1_left": 0.0, "f1_right": 0.0, "f2": 0.0, "f3": 0.0}
    bad = 0
    for _ in range(n_draws):
        a = 1.0 + 9.0 * (1.0 - rng.random())  # (1, 10]
        c = rng.uniform(1e-3, 1.0 - 1e-3)
        xsr = x_star(a, c)
        # points within 1e-9 of x* carry no sign information in double precision
        left = xs[xs < xsr - 1e-9]
        right = xs[xs > xsr + 1e-9]
        g_left, g_right = f1(left, a, c), f1(right, a, c)
        v2 = f2(xs[xs < xsr], a, c)
        v3 = f3(xs[xs >= xsr], a, c)
        viol = (
            float(np.max(g_left, initial=-np.inf)),
            float(-np.min(g_right, initial=np.inf)),
            float(-np.min(v2, initial=np.inf)),
            float(np.max(v3, initial=-np.inf)),
        )
        for key, v in zip(worst, viol):
            worst[key] = max(worst[key], v)
        if viol[0] >= 0 or viol[1] >= 0 or viol[2] > 1e-12 or viol[3] > 1e-12:
            bad += 1
    return CheckResult("lemma/f1-f2-f3-signs", bad == 0, {"draws": n_draws, "failures": bad, "worst": worst})


def jump_boundary_properties(params: ModelParams, n_grid: int = 2000) -> CheckResult:
    """``D_j(w) <= rw/h`` (equality only at the ends) and monotone increase where it is non-negative."""
    h, r = params.h, params.r
    m = wl.wait_level(params)
    ws = np.linspace(0.0, m, n_grid + 1)
    dj = np.array([wl.jump_boundary(params, float(w)) for w in ws])
    bound = r * ws / h
    interior = slice(1, -1)
    gap = bound[interior] - dj[interior]
    sol = tl.solve_term(params)
    start = 0.0 if sol.regime is tl.Regime.LAMBDA_LE_R else sol.w_star
    mask = ws >= start
    rising = bool(np.all(np.diff(dj[mask]) > 0))
    below = True
    if sol.regime is tl.Regime.LAMBDA_GT_R:
        below = bool(np.all(dj[ws <= sol.w_star] <= 1e-12))
    ends = abs(dj[0] - 0.0) <= 1e-12 and abs(dj[-1] - wl.coverage_kink(params)) <= 1e-12
    passed = bool(np.all(gap > 0)) and rising and below and ends
    return CheckResult(
        f"whole/jump-boundary[{sol.regime.value}]",
        passed,
        {"min_gap": float(gap.min()), "increasing": rising, "nonpositive_below_w_star": below, "endpoints": bool(ends)},
    )


def seam_continuity(params: ModelParams, n_grid: int = 400) -> CheckResult:
    """The value is continuous across ``D = b``, ``w + D = b`` and ``D = D_j(w)``."""
    b, h, r = params.b, params.h, params.r
    kink = wl.coverage_kink(params)
    worst = {"D=b": 0.0, "w+D=b": 0.0, "D=D_j": 0.0}
    u = (np.arange(n_grid) + 0.5) / n_grid
    for w in u * h * b / r:
        worst["D=b"] = max(worst["D=b"], abs(wl.phi_ra(params, w, b) - wl.phi_r0(params, w, b)))
    for D in kink + u * (b - kink):
        w = b - D
        worst["w+D=b"] = max(worst["w+D=b"], abs(wl.phi_ra(params, w, D) - wl.phi_rb_jump(params, w)))
    m = wl.wait_level(params)
    sol = tl.solve_term(params)
    lo = sol.w_star if sol.regime is tl.Regime.LAMBDA_GT_R else 0.0
    for w in lo + u * (m - lo):
        dj = wl.jump_boundary(params, float(w))
        if dj < 0:
            continue
        worst["D=D_j"] = max(worst["D=D_j"], abs(wl.phi_rb_wait(params, w, dj) - wl.phi_rb_jump(params, w)))
    return CheckResult("whole/seam-continuity", max(worst.values()) <= SEAM_TOL, {"max_gap": worst, "tol": SEAM_TOL})


def whole_matches_term(params: ModelParams, n_grid: int = 400) -> CheckResult:
    """Whole life started without coverage has the term-life value."""
    m = wl.wait_level(params)
    err = 0.0
    for w in np.linspace(0.0, m, n_grid):
        err = max(err, abs(wl.phi_whole(params, WealthState(float(w), 0.0)) - tl.phi_term(params, float(w))))
    return CheckResult("whole/D=0-equals-term", err <= 1e-12, {"max_abs_diff": err})


def w_star_statics(params: ModelParams, n_sweeps: int = 50, seed: int = 0) -> CheckResult:
    """``w*`` rises with ``lambda``, falls with ``r`` and scales with ``b`` on random sweeps."""
    rng = np.random.default_rng(seed)
    problems: list[str] = []
    done = 0
    for _ in range(n_sweeps):
        base_r = rng.uniform(0.01, 0.06)
        lam = base_r * rng.uniform(1.2, 3.0)
        theta_bar = rng.uniform(0.0, 0.5)
        try:
            base = ModelParams(b=rng.uniform(0.5, 5.0), r=base_r, lam=lam, theta=0.0, theta_bar=theta_bar)
        except InvalidParameterError:
            continue
        bumps = {
            "lambda": np.sort(lam * rng.uniform(1.0, 1.5, 5)),
            "r": np.sort(base_r * rng.uniform(0.5, 1.0, 5)),
            "b": np.sort(rng.uniform(0.1, 10.0, 5)),
        }
        table = tl.w_star_sensitivities(base, bumps)
        problems.extend(table.monotonicity_violations())
        done += 1
    return CheckResult("term/w-star-statics", not problems and done > 0, {"sweeps": done, "problems": problems[:5]})


def run_suite(
    params: ModelParams, grid: GridSpec | None = None, n_draws: int = 1000, products=tuple(Product)
) -> SuiteReport:
    """Residual checks for every product plus the structural properties."""
    grid = grid or GridSpec()
    report = SuiteReport(params.to_dict())

    def timed(fn, *args):
        t0 = time.perf_counter()
        res = fn(*args)
        res.seconds = time.perf_counter() - t0
        report.checks.append(res)

    for product in map(Product.parse, products):
        g = GridSpec(n_w=2 * grid.n_w, n_d=1, rel_step=grid.rel_step, tol=grid.tol) if product is Product.TERM else grid
        for kind, fn in (("vi", check_variational_inequality), ("bvp", check_bvp_expected_bequest)):
            timed(lambda p=product, k=kind, f=fn: (lambda rep: CheckResult(f"{k}/{p.value}", rep.passed, rep.summary()))(
                f(params, p, g)))
    timed(lemma_sign_structure, n_draws)
    timed(jump_boundary_properties, params)
    other = params.replace(r=1.5 * params.lam) if params.lam > params.r else params.replace(lam=0.5 * (params.r + params.lam) * 1.5)
    try:
        timed(jump_boundary_properties, other)
    except InvalidParameterError as exc:
        report.checks.append(CheckResult("whole/jump-boundary[other-regime]", False, {"error": str(exc)}))
    timed(seam_continuity, params)
    timed(whole_matches_term, params)
    timed(w_star_statics, params)
    return report
