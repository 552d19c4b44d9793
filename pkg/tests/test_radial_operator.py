from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pecompact.series as S
from pecompact import make_ads_schwarzschild, make_hyperbolic
from pecompact.radial_operator import (
    OperatorSpec,
    RadialProfile,
    apply_gjms_plus,
    apply_laplacian_plus,
    apply_P0,
    apply_P_lambda,
    conformal_laplacian_check,
    gjms_constants,
)

R = np.linspace(0.3, 8.0, 40)


def exp_profile(mu, order=6, r=R):
    return RadialProfile.from_function(r, lambda t: S.exp(-t * mu), order, "e^{-mu r}")


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 4.0))
def test_laplacian_of_exponential_closed_form(mu):
    # hyperbolic: Delta_+ e^{-mu r} = (mu^2 - n mu coth r) e^{-mu r}
    g = make_hyperbolic(3)
    out = apply_laplacian_plus(g, exp_profile(mu))
    exact = (mu**2 - 3 * mu / np.tanh(R)) * np.exp(-mu * R)
    assert np.allclose(out.values, exact, rtol=1e-11, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.55, 2.95))
def test_indicial_root_annihilated_at_leading_order(s):
    # P0 rho^{n-s} is o(rho^{n-s}) at the boundary: the indicial polynomial vanishes
    g = make_hyperbolic(3)
    r = np.array([14.0, 16.0, 18.0])
    u = RadialProfile.from_function(r, lambda t: S.power(g.rho_fn(t), 3 - s), 4)
    rel = np.abs(apply_P0(g, s, u).values) / u.values[: 3]
    assert rel[-1] < rel[0] and rel[-1] < 1e-5


def test_gjms_constants_hand_values():
    assert gjms_constants(3, 1) == [2.0]
    assert gjms_constants(3, 2) == [0.0, 2.0]
    assert gjms_constants(5, 3) == pytest.approx([0.0, 6.0, 4.0])


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=2, max_size=3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_gjms_factors_commute(mus, amps):
    g = make_ads_schwarzschild(3, 0.2)
    u = RadialProfile.from_function(R, lambda t: sum(a * S.exp(-t * m) for a, m in zip(amps, mus)), 8)
    a = apply_gjms_plus(g, 2, u).values
    b = apply_gjms_plus(g, 2, u, order=[1, 0]).values
    assert np.allclose(a, b, rtol=1e-9, atol=1e-12 * (1 + np.max(np.abs(a))))


def test_p_lambda_reduces_to_p0_and_shifts_weight():
    g = make_hyperbolic(3)
    u = exp_profile(1.3)
    assert np.allclose(apply_P_lambda(g, 2.5, 0.0, u).values, apply_P0(g, 2.5, u).values)
    lam = 0.7
    w = RadialProfile(R, S.power(g.rho(R, 6), lam) * u.jet)
    direct = apply_P0(g, 2.5, w).values / g.rho(R).value ** lam
    assert np.allclose(apply_P_lambda(g, 2.5, lam, u).values, direct, rtol=1e-12)


def test_conformal_laplacian_transformation():
    g = make_ads_schwarzschild(3, 0.3)
    res = conformal_laplacian_check(g, exp_profile(0.8))
    assert res.sup() < 1e-10


def test_operator_spec_validation():
    g = make_hyperbolic(3)
    u = exp_profile(1.0)
    assert np.allclose(OperatorSpec("P0", 3, s=2.5).apply(g, u).values, apply_P0(g, 2.5, u).values)
    assert np.allclose(OperatorSpec("gjms_product", 3, N=1).apply(g, u).values, apply_gjms_plus(g, 1, u).values)
    with pytest.raises(ValueError):
        OperatorSpec("P0", 3, s=1.5)
    with pytest.raises(ValueError):
        OperatorSpec("gjms_product", 3, N=3, k=3)
    with pytest.raises(ValueError):
        OperatorSpec("wave", 3)


def test_derivative_budget_enforced():
    g = make_hyperbolic(3)
    u = exp_profile(1.0, order=3)
    with pytest.raises(ValueError):
        apply_gjms_plus(g, 2, u)


def test_profile_arithmetic_and_samples():
    u = exp_profile(1.0)
    v = (u * 2.0 - u) / u
    assert np.allclose(v.values, 1.0)
    smooth = RadialProfile.from_samples(R, np.sin(R), 2)
    assert np.allclose(smooth.derivative(1), np.cos(R), atol=1e-5)
    assert u.argsup() == R[0]
