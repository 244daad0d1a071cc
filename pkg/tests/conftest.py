from __future__ import annotations

import pytest

from bequest_goal.model import ModelParams

# (criterion id, passed, detail) in the order the acceptance tests ran
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture
def base():
    """b=1, r=0.03, lam=0.08, loadings 0.25: H = 0.909091, h = 0.10."""
    return ModelParams(b=1.0, r=0.03, lam=0.08, theta=0.25, theta_bar=0.25)


@pytest.fixture
def base_cash(base):
    return base.replace(rho=0.3)


@pytest.fixture
def slow_mortality():
    """lam < r: waiting is optimal everywhere for term life."""
    return ModelParams(b=1.0, r=0.06, lam=0.05, theta=0.25, theta_bar=0.25, rho=0.3)


@pytest.fixture
def record():
    """Log one acceptance line, then assert it."""

    def _record(cid: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append((cid, bool(passed), detail))
        assert passed, f"criterion {cid} failed: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {cid}  {detail}")
