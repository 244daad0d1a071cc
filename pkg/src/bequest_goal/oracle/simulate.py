"""Monte Carlo evaluation of strategies and dominance tests.

Paths are drawn in blocks of ``BLOCK`` death times. Block ``k`` uses its own
generator seeded by ``SeedSequence(seed, spawn_key=(k,))``, so the draws of a
path depend only on ``(seed, path index)``. Per-block counts, sums and
second moments are merged in block order (pairwise moment update), which
makes serial and threaded runs bit-identical.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..model import DomainError, ModelParams, WealthState
from ..products import Product, expected_bequest, success_probability
from .strategies import (
    Plan,
    StrategySpec,
    alternative_strategies,
    build_plan,
    optimal_strategy,
    strategy_name,
)

BLOCK = 1 << 16
# absolute floor on the acceptance band so that zero-variance runs are comparable
SE_FLOOR = 1e-12


@dataclass(frozen=True)
class SimReport:
    n_paths: int
    success_prob: float
    success_se: float
    mean_bequest: float
    bequest_se: float
    seed: int
    product: str
    ruin_frac: float
    strategy: str = ""
    w: float = 0.0
    D: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def success_band(self, k: float = 3.0) -> float:
        return k * self.success_se + SE_FLOOR

    def bequest_band(self, k: float = 3.0) -> float:
        return k * self.bequest_se + SE_FLOOR


@dataclass
class _Moments:
    n: int = 0
    hits: int = 0
    ruins: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def merge(self, other: "_Moments") -> None:
        if other.n == 0:
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n
        self.hits += other.hits
        self.ruins += other.ruins


def bequest_at(params: ModelParams, plan: Plan, T: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bequest, success flag and ruin flag for death times ``T`` under ``plan``."""
    ends = np.cumsum([p.duration for p in plan])
    starts = np.concatenate(([0.0], ends[:-1]))
    idx = np.searchsorted(ends, T, side="right")
    idx = np.minimum(idx, len(plan) - 1)
    bequest = np.empty_like(T)
    success = np.empty(T.shape, dtype=bool)
    ruined = np.zeros(T.shape, dtype=bool)
    r, h, b = params.r, params.h, params.b
    for k, phase in enumerate(plan):
        mask = idx == k
        if not mask.any():
            continue
        s = T[mask] - starts[k]
        success[mask] = phase.success
        if phase.kind == "grow":
            bequest[mask] = phase.w0 * np.exp(r * s) + phase.D
        elif phase.kind == "hold":
            c = h * phase.D / r
            wealth = c + (phase.w0 - c) * np.exp(r * s)
            bequest[mask] = np.maximum(wealth, 0.0) + phase.D
        elif phase.kind == "line":
            bequest[mask] = b
        elif phase.kind == "ruin":
            bequest[mask] = 0.0
            ruined[mask] = True
        else:
            raise ValueError(f"unknown phase kind {phase.kind!r}")
    return bequest, success, ruined


def _block(params: ModelParams, plan: Plan, seed: int, k: int, n: int) -> _Moments:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))
    T = rng.standard_exponential(n) / params.lam
    bequest, success, ruined = bequest_at(params, plan, T)
    mean = float(bequest.mean())
    return _Moments(
        n=n,
        hits=int(success.sum()),
        ruins=int(ruined.sum()),
        mean=mean,
        m2=float(((bequest - mean) ** 2).sum()),
    )


def simulate(
    params: ModelParams,
    product: Product | str,
    strategy: StrategySpec | None,
    state: WealthState,
    n_paths: int,
    seed: int = 0,
    workers: int = 1,
) -> SimReport:
    """Simulate ``n_paths`` lifetimes under ``strategy`` (the optimal one when ``None``)."""
    product = Product.parse(product)
    if not isinstance(n_paths, (int, np.integer)) or n_paths < 1:
        raise DomainError(f"n_paths must be a positive integer, got {n_paths!r}")
    if strategy is None:
        strategy = optimal_strategy(product)
    plan = build_plan(params, product, strategy, state)
    sizes = [BLOCK] * (n_paths // BLOCK)
    if n_paths % BLOCK:
        sizes.append(n_paths % BLOCK)
    jobs = list(enumerate(sizes))
    run = lambda job: _block(params, plan, seed, job[0], job[1])  # noqa: E731
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    total = _Moments()
    for part in parts:
        total.merge(part)
    n = total.n
    p = total.hits / n
    var = total.m2 / (n - 1) if n > 1 else 0.0
    return SimReport(
        n_paths=n,
        success_prob=p,
        success_se=math.sqrt(p * (1.0 - p) / n),
        mean_bequest=total.mean,
        bequest_se=math.sqrt(var / n),
        seed=int(seed),
        product=product.value,
        ruin_frac=total.ruins / n,
        strategy=strategy_name(strategy),
        w=state.w,
        D=state.D,
    )


@dataclass(frozen=True)
class Comparison:
    """Closed form against simulation for one state."""

    report: SimReport
    phi: float
    bequest: float | None

    @property
    def phi_error(self) -> float:
        return abs(self.phi - self.report.success_prob)

    @property
    def bequest_error(self) -> float | None:
        if self.bequest is None:
            return None
        return abs(self.bequest - self.report.mean_bequest)

    @property
    def passed(self) -> bool:
        ok = self.phi_error <= self.report.success_band()
        if self.bequest is not None:
            ok = ok and self.bequest_error <= self.report.bequest_band()
        return ok

    def to_dict(self) -> dict:
        return {
            **self.report.to_dict(),
            "phi_closed_form": self.phi,
            "bequest_closed_form": self.bequest,
            "passed": self.passed,
        }


def compare_optimal(
    params: ModelParams, product: Product | str, state: WealthState, n_paths: int, seed: int = 0, workers: int = 1
) -> Comparison:
    """Simulate the optimal strategy and set it against the closed forms.

    The expected bequest is compared only where a closed form exists (below
    the safe level, and ``D < b`` for single premium).
    """
    product = Product.parse(product)
    report = simulate(params, product, None, state, n_paths, seed, workers)
    phi = success_probability(params, product, state)
    try:
        beq: float | None = expected_bequest(params, product, state)
    except DomainError:
        beq = None
    return Comparison(report, phi, beq)


@dataclass(frozen=True)
class DominanceRow:
    strategy: str
    simulated: float
    se: float
    closed_form: float
    margin: float
    passed: bool


@dataclass
class DominanceReport:
    product: str
    w: float
    D: float
    rows: list[DominanceRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> list[DominanceRow]:
        return [row for row in self.rows if not row.passed]

    def to_dict(self) -> dict:
        return {
            "product": self.product,
            "w": self.w,
            "D": self.D,
            "passed": self.passed,
            "rows": [asdict(row) for row in self.rows],
        }


def dominance_test(
    params: ModelParams,
    product: Product | str,
    state: WealthState,
    alternatives: list[StrategySpec] | None = None,
    n_paths: int = 10**6,
    seed: int = 0,
    workers: int = 1,
) -> DominanceReport:
    """Check the closed-form value against each alternative's simulated success rate.

    ``margin`` is ``phi - p_hat``; an alternative passes when
    ``margin >= -3 SE``. ``None`` uses the built-in family plus the optimal
    strategy itself.
    """
    product = Product.parse(product)
    if alternatives is None:
        alternatives = [optimal_strategy(product)] + alternative_strategies(params, product, state)
    phi = success_probability(params, product, state)
    out = DominanceReport(product.value, state.w, state.D)
    for alt in alternatives:
        rep = simulate(params, product, alt, state, n_paths, seed, workers)
        margin = phi - rep.success_prob
        out.rows.append(
            DominanceRow(strategy_name(alt), rep.success_prob, rep.success_se, phi, margin, margin >= -rep.success_band())
        )
    return out
