from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pecompact.series as S
from pecompact import make_ads_schwarzschild, make_hyperbolic, make_warped
from pecompact.model_geometry import (
    einstein_residual,
    horizon_radius,
    rescale_defining_function,
    with_defining_function,
)
from pecompact.warped import einstein_defect


@pytest.mark.parametrize("n", [3, 4, 5])
def test_hyperbolic_is_einstein(n):
    g = make_hyperbolic(n)
    assert einstein_residual(g).sup() < 1e-9
    r = np.array([0.5, 2.0, 7.0])
    assert np.allclose(g.rho(r).value, 1.0 / (1.0 + np.cosh(r)), rtol=1e-15)
    assert g.boundary.Rhat == n * (n - 1)
    assert g.boundary.Jhat == pytest.approx(n / 2)


@pytest.mark.parametrize("m", [0.0, 0.1, 0.2, 0.5])
def test_ads_schwarzschild_is_einstein(m):
    g = make_ads_schwarzschild(3, m)
    assert einstein_residual(g).sup() < 1e-8
    assert g.boundary.positive_scalar


def test_thermal_ads_closed_form():
    # m = 0: warps cosh r (circle) and sinh r (sphere)
    g = make_ads_schwarzschild(3, 0.0)
    r = np.linspace(0.1, 6.0, 9)
    w = g.warps(r, 0)
    assert np.allclose(w[0].value, np.cosh(r), rtol=1e-11)
    assert np.allclose(w[1].value, np.sinh(r), rtol=1e-11)
    assert g.params["beta"] == pytest.approx(2 * np.pi)
    assert g.rho_scale == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("m", [0.1, 0.2, 0.5])
def test_horizon_and_cap_period(m):
    # oracle: real root of q^3 + q - 2m, beta = 4 pi / V'(q_h) with V'(q) = 2q + 2m/q^2
    roots = np.roots([1.0, 0.0, 1.0, -2.0 * m])
    qh = float(max(r.real for r in roots if abs(r.imag) < 1e-12))
    assert horizon_radius(3, m) == pytest.approx(qh, rel=1e-12)
    g = make_ads_schwarzschild(3, m)
    assert g.params["beta_cap"] == pytest.approx(4 * np.pi / (2 * qh + 2 * m / qh**2), rel=1e-12)
    assert g.params["cap_regular"]


def test_cap_period_collapses_for_small_mass():
    b = [make_ads_schwarzschild(3, m).params["beta_cap"] for m in (0.1, 0.01, 0.001)]
    assert b[0] > b[1] > b[2]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        make_hyperbolic(2)
    with pytest.raises(ValueError):
        make_ads_schwarzschild(3, -0.1)
    g = make_hyperbolic(3)
    with pytest.raises(ValueError):
        g.r_of_rho(0.6)
    with pytest.raises(ValueError):
        g.r_of_rho(0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-6, 0.45))
def test_r_of_rho_roundtrip(rho):
    g = make_hyperbolic(3)
    r = g.r_of_rho(rho)
    assert float(g.rho(r).value) == pytest.approx(rho, rel=1e-12)


def test_rescale_defining_function():
    g = make_ads_schwarzschild(3, 0.2)
    c = g.params["C"]
    h = rescale_defining_function(g, c)
    assert h.rho_scale == pytest.approx(1.0)
    assert h.boundary.Rhat == pytest.approx(g.boundary.Rhat / c**2)
    r = np.array([1.0, 3.0])
    assert np.allclose(h.rho(r).value, c * g.rho(r).value)
    with pytest.raises(ValueError):
        rescale_defining_function(g, -1.0)


def test_with_defining_function_keeps_boundary():
    g = make_hyperbolic(3)
    h = with_defining_function(g, lambda r: 1.0 / S.cosh(r))
    assert h.boundary == g.boundary
    with pytest.raises(ValueError):
        with_defining_function(g, lambda r: S.exp(-r))


def test_non_einstein_warp_detected():
    g = make_warped(3, lambda r: S.sinh(r) * 1.1)
    assert einstein_residual(g).sup() > 1e-2


def test_einstein_defect_of_frame():
    g = make_hyperbolic(4)
    fr = g.frame(np.linspace(0.5, 4, 5), 2)
    assert np.max(einstein_defect(fr, -4.0)) < 1e-10
    assert np.allclose(fr.scalar().value, -4 * 5)
