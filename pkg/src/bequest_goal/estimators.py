"""scikit-learn wrappers so policies can score batches of states.

Nothing is learned from data: ``fit`` validates the parameters and solves
for the free boundaries. Rows of ``X`` are states ``(w, D)``; a single
column is read as wealth with ``D = 0``.

``predict`` returns the immediate change in coverage under the optimal rule
(negative for a surrender) and, for term life, the coverage level itself.
``transform`` returns ``[phi, E]`` per row, with ``E = nan`` where no
expected-bequest formula applies.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import single_premium as sp
from . import term_life as tl
from . import whole_life as wl
from .model import DomainError, ModelParams, WealthState
from .products import Product, expected_bequest, success_probability


class _PolicyBase(TransformerMixin, BaseEstimator):
    _product: Product

    def __init__(self, b=1.0, r=0.03, lam=0.08, theta=0.0, theta_bar=None, rho=1.0):
        self.b = b
        self.r = r
        self.lam = lam
        self.theta = theta
        self.theta_bar = theta_bar
        self.rho = rho

    def _make_params(self) -> ModelParams:
        return ModelParams(b=self.b, r=self.r, lam=self.lam, theta=self.theta,
                           theta_bar=self.theta_bar, rho=self.rho)

    def fit(self, X=None, y=None):
        self.params_ = self._make_params()
        self._solve()
        self.n_features_in_ = 2
        return self

    def _solve(self) -> None:
        raise NotImplementedError

    def _states(self, X) -> list[WealthState]:
        check_is_fitted(self, "params_")
        arr = check_array(X, ensure_2d=True, dtype=float)
        if arr.shape[1] == 1:
            arr = np.hstack([arr, np.zeros_like(arr)])
        if arr.shape[1] != 2:
            raise ValueError(f"expected columns (w, D), got {arr.shape[1]} columns")
        return [WealthState(float(w), float(D)) for w, D in arr]

    def _action_amount(self, state: WealthState) -> float:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return np.array([self._action_amount(s) for s in self._states(X)])

    def transform(self, X) -> np.ndarray:
        rows = []
        for s in self._states(X):
            phi = success_probability(self.params_, self._product, s)
            try:
                E = expected_bequest(self.params_, self._product, s)
            except DomainError:
                E = float("nan")
            rows.append((phi, E))
        return np.array(rows, dtype=float).reshape(-1, 2)

    def score(self, X, y=None) -> float:
        """Mean success probability over the rows of ``X``."""
        return float(self.transform(X)[:, 0].mean())


class SinglePremiumPolicy(_PolicyBase):
    """Whole life bought by single premium; ``surrender=True`` adds the cash value."""

    def __init__(self, b=1.0, r=0.03, lam=0.08, theta=0.0, theta_bar=None, rho=1.0, surrender=False):
        super().__init__(b=b, r=r, lam=lam, theta=theta, theta_bar=theta_bar, rho=rho)
        self.surrender = surrender

    @property
    def _product(self) -> Product:  # type: ignore[override]
        return Product.SP_CASH if self.surrender else Product.SP

    def _solve(self) -> None:
        self.safe_level_ = sp.safe_level_sp(self.params_, 0.0)
        self.premium_rate_ = self.params_.H

    def _action_amount(self, state: WealthState) -> float:
        fn = sp.optimal_action_cash if self.surrender else sp.optimal_action_no_cash
        act = fn(self.params_, state)
        if isinstance(act, sp.BuyAdditional):
            return act.amount
        if isinstance(act, sp.SurrenderAll):
            return -state.D
        return 0.0


class TermLifePolicy(_PolicyBase):
    """Instantaneous term life paid by a continuous premium."""

    _product = Product.TERM

    def _solve(self) -> None:
        sol = tl.solve_term(self.params_)
        self.safe_level_ = sol.safe_level
        self.w_star_ = sol.w_star
        self.regime_ = sol.regime

    def _action_amount(self, state: WealthState) -> float:
        return tl.optimal_coverage_term(self.params_, state.w)


class WholeLifePolicy(_PolicyBase):
    """Irreversible whole life paid by a continuous premium."""

    _product = Product.WHOLE

    def _solve(self) -> None:
        sol = tl.solve_term(self.params_)
        self.wait_level_ = wl.wait_level(self.params_)
        self.coverage_kink_ = wl.coverage_kink(self.params_)
        self.w_star_ = sol.w_star
        self.regime_ = sol.regime

    def _action_amount(self, state: WealthState) -> float:
        act = wl.optimal_action_whole(self.params_, state)
        if isinstance(act, (wl.JumpToFullThenTrack, wl.SecureGoal)):
            return act.amount
        return 0.0

    def regions(self, X) -> np.ndarray:
        """Region label per row (``Safe`` beyond the safe level)."""
        out = []
        for s in self._states(X):
            if s.w >= wl.safe_level_whole(self.params_, s.D):
                out.append(wl.RegionLabel.SAFE.value)
            else:
                out.append(wl.classify_region(self.params_, s).value)
        return np.array(out)
