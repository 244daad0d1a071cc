import math

import mpmath
import pytest

from bequest_goal import single_premium as sp
from bequest_goal.model import DomainError, InvalidParameterError, ModelParams, WealthState

from path_quadrature import expect


def _wait_then_buy(p: ModelParams, w: float, D: float) -> tuple[float, float]:
    """(success probability, expected bequest) by quadrature along w e^{rt}."""
    safe = p.H * (p.b - D)
    tau = math.log(safe / w) / p.r
    phi = expect(p.lam, [(0.0, tau, lambda t: 0.0)], tail=1.0)
    E = expect(p.lam, [(0.0, tau, lambda t: w * math.exp(p.r * t) + D)], tail=p.b)
    return phi, E


class TestNoCash:
    @pytest.mark.parametrize("w, D", [(0.05, 0.0), (0.4, 0.0), (0.4, 0.3), (0.8, 0.1), (0.1, 0.85)])
    def test_against_quadrature(self, base, w, D):
        st = WealthState(w, D)
        phi, E = _wait_then_buy(base, w, D)
        assert sp.phi_no_cash(base, st) == pytest.approx(phi, abs=1e-10)
        assert sp.expected_bequest_no_cash(base, st) == pytest.approx(E, abs=1e-9)

    def test_equal_rates_limit(self):
        p = ModelParams(b=1.0, r=0.05, lam=0.05, theta=0.2)
        for w, D in [(0.2, 0.0), (0.3, 0.4)]:
            _, E = _wait_then_buy(p, w, D)
            assert sp.expected_bequest_no_cash(p, WealthState(w, D)) == pytest.approx(E, abs=1e-9)

    def test_against_mpmath(self, base):
        mpmath.mp.dps = 30
        H = mpmath.mpf(1.25) * mpmath.mpf(0.08) / (mpmath.mpf(0.03) + mpmath.mpf(0.08))
        want = (mpmath.mpf(0.4) / (H * mpmath.mpf(0.7))) ** (mpmath.mpf(0.08) / mpmath.mpf(0.03))
        assert sp.phi_no_cash(base, WealthState(0.4, 0.3)) == pytest.approx(float(want), rel=1e-13)

    def test_safe_level_and_above(self, base):
        assert sp.safe_level_sp(base, 0.3) == pytest.approx(base.H * 0.7)
        assert sp.phi_no_cash(base, WealthState(0.7, 0.3)) == 1.0
        assert sp.phi_no_cash(base, WealthState(0.0, 1.2)) == 1.0
        assert sp.phi_no_cash(base, WealthState(0.0, 0.5)) == 0.0

    def test_monotone_in_w_and_D(self, base):
        ws = [0.01 * k for k in range(1, 90)]
        vals = [sp.phi_no_cash(base, WealthState(w, 0.1)) for w in ws]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        Ds = [0.05 * k for k in range(19)]
        vals = [sp.phi_no_cash(base, WealthState(0.3, D)) for D in Ds]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_actions(self, base):
        assert sp.optimal_action_no_cash(base, WealthState(0.2, 0.0)) == sp.Wait()
        assert sp.optimal_action_no_cash(base, WealthState(base.H, 0.0)) == sp.BuyAdditional(1.0)
        assert sp.optimal_action_no_cash(base, WealthState(0.2, 1.0)) == sp.AlreadyFunded()

    def test_hitting_time(self, base):
        st = WealthState(0.4, 0.3)
        t = sp.hitting_time_safe_sp(base, st)
        assert 0.4 * math.exp(base.r * t) == pytest.approx(base.H * 0.7, rel=1e-13)
        assert sp.hitting_time_safe_sp(base, WealthState(0.0, 0.3)) == math.inf

    def test_domain_errors(self, base):
        with pytest.raises(DomainError):
            sp.expected_bequest_no_cash(base, WealthState(0.9, 0.3))
        with pytest.raises(DomainError):
            sp.safe_level_sp(base, 1.0)
        with pytest.raises(InvalidParameterError):
            sp.phi_no_cash(ModelParams(b=1.0, r=0.0, lam=0.08), WealthState(0.3))


class TestCash:
    def test_surrender_region_uses_pooled_wealth(self, base_cash):
        p, st = base_cash, WealthState(0.1, 0.5)
        assert st.w < sp.surrender_threshold(p, st.D)
        pooled = 0.1 + 0.7 * p.H * 0.5
        phi, E = _wait_then_buy(p, pooled, 0.0)
        assert sp.phi_cash(p, st) == pytest.approx(phi, abs=1e-10)
        assert sp.expected_bequest_cash(p, st) == pytest.approx(E, abs=1e-9)
        assert sp.optimal_action_cash(p, st) == sp.SurrenderAll(0.7 * p.H * 0.5)

    def test_wait_region_matches_no_cash(self, base):
        p, st = base.replace(rho=0.5), WealthState(0.4, 0.3)
        assert st.w >= sp.surrender_threshold(p, st.D)
        assert sp.phi_cash(p, st) == sp.phi_no_cash(p, st)
        assert sp.optimal_action_cash(p, st) == sp.Wait()

    def test_cash_value_never_hurts(self, base_cash):
        for w in (0.01, 0.1, 0.3, 0.5):
            for D in (0.1, 0.4, 0.8):
                st = WealthState(w, D)
                if w < sp.safe_level_sp(base_cash, D):
                    assert sp.phi_cash(base_cash, st) >= sp.phi_no_cash(base_cash, st) - 1e-15

    def test_rho_one_is_no_cash(self, base):
        for w, D in [(0.05, 0.5), (0.3, 0.2)]:
            st = WealthState(w, D)
            assert sp.phi_cash(base, st) == sp.phi_no_cash(base, st)

    def test_continuous_at_threshold(self, base_cash):
        D = 0.5
        s = sp.surrender_threshold(base_cash, D)
        lo = sp.phi_cash(base_cash, WealthState(s * (1 - 1e-12), D))
        hi = sp.phi_cash(base_cash, WealthState(s, D))
        assert lo == pytest.approx(hi, abs=1e-10)

    def test_bequest_jumps_down_at_threshold(self, base_cash):
        D = 0.5
        s = sp.surrender_threshold(base_cash, D)
        left = sp.expected_bequest_cash(base_cash, WealthState(s * (1 - 1e-12), D))
        right = sp.expected_bequest_cash(base_cash, WealthState(s, D))
        assert left < right - 1e-3
