from __future__ import annotations

import functools

import numpy as np
import pytest

from pecompact import make_ads_schwarzschild, make_hyperbolic, solve

# lines collected by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def metric(model: str = "hyperbolic", n: int = 3, m: float = 0.0):
    if model == "hyperbolic":
        return make_hyperbolic(n)
    return make_ads_schwarzschild(n, m)


@functools.lru_cache(maxsize=None)
def comp(model: str, s: float, n: int = 3, m: float = 0.0):
    return solve(metric(model, n, m), s)


@pytest.fixture(scope="session")
def hyp():
    return metric("hyperbolic")


@pytest.fixture(scope="session")
def ads():
    return metric("ads_schw", 3, 0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
