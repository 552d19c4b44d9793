from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pecompact import make_ads_schwarzschild, make_hyperbolic
from pecompact.boundary_asymptotics import (
    BoundarySeries,
    SeriesStopError,
    build_phi_series,
    build_w_series,
    extract_expansion,
    geodesic_gauge,
    indicial_roots,
    indicial_value,
    max_phi_order,
    richardson_boundary_value,
)
from conftest import comp


def test_indicial_roots_example():
    assert indicial_roots(3, 2.5) == (0.5, 2.5)
    with pytest.raises(ValueError):
        indicial_roots(3, 1.5)


@settings(max_examples=50)
@given(st.floats(-5, 5), st.integers(3, 7), st.floats(0.01, 3.0))
def test_indicial_value_factorization(mu, n, ds):
    s = n / 2 + ds
    assert indicial_value(mu, n, s) == pytest.approx(mu * (mu - n) + s * (n - s), abs=1e-9)
    for root in indicial_roots(n, s):
        assert indicial_value(root, n, s) == 0.0


@pytest.mark.parametrize("s, b2", [(2.75, -0.375), (3.5, 0.1875)])
def test_phi_series_against_solution_fit(s, b2):
    g = make_hyperbolic(3)
    ser = build_phi_series(g, s, max_phi_order(3, s), "x")
    assert ser.coefficient(0.0) == 1.0 and ser.coefficient(1.0) == 0.0
    assert ser.coefficient(2.0) == pytest.approx(b2, abs=1e-12)
    c = comp("hyperbolic", s)
    mu = 3 - s

    def f(x):
        return (c.rho_s_at(-np.log(x / g.x_scale)) / x) ** mu

    fit = extract_expansion(f, sorted({0.0, 1.0, 2.0, 3.0, 4.0, 2 * s - 3}), x0=0.05)
    assert fit.coefficient(2.0) == pytest.approx(b2, abs=1e-3)


def test_phi_series_stops_at_indicial_collision():
    g = make_hyperbolic(3)
    assert max_phi_order(3, 2.75) == 2
    with pytest.raises(SeriesStopError):
        build_phi_series(g, 2.75, 3)
    with pytest.raises(ValueError):
        build_phi_series(g, 3.0, 1)


def test_w_series_hyperbolic():
    g = make_hyperbolic(3)
    ser = build_w_series(g, 2, "x")
    assert ser.coefficient(0.0) == 0.0
    assert ser.coefficient(2.0) == pytest.approx(-0.75, abs=1e-12)


def test_geodesic_gauge_second_order_term():
    # x^2 g_+ = dx^2 + (1 + g2 x^2 + ...) ghat with g2 = -Ahat per factor
    for g in (make_hyperbolic(3), make_ads_schwarzschild(3, 0.2)):
        gauge = geodesic_gauge(g)
        assert np.allclose(gauge.g2_coefficient, -np.asarray(gauge.Ahat), atol=1e-7)
        assert gauge.dx_defect < 1e-12


def test_extract_expansion_exact_profile():
    fit = extract_expansion(lambda x: x, (1.0, 2.0, 3.0))
    assert np.allclose(fit.coeffs, (1.0, 0.0, 0.0), atol=1e-10)
    with pytest.raises(ValueError):
        extract_expansion(lambda x: x, (1.0, 1.0001))


def test_richardson_recovers_polynomial_limit():
    f = lambda h: 3.0 - 2.0 * h + 5.0 * h**2  # noqa: E731
    assert richardson_boundary_value(f) == pytest.approx(3.0, abs=1e-12)
    assert richardson_boundary_value(np.cos, (0.005, 0.01, 0.02, 0.04, 0.08)) == pytest.approx(1.0, abs=1e-9)


def test_boundary_series_validation_and_algebra():
    with pytest.raises(ValueError):
        BoundarySeries(0.0, (1.0, 0.0), (1.0, 2.0), 2.0)
    with pytest.raises(ValueError):
        BoundarySeries(0.0, (0.5, 1.5), (1.0, 2.0), 2.0)
    a = BoundarySeries(0.0, (0.0, 1.0), (1.0, 2.0), 2.0)
    b = BoundarySeries(1.0, (0.0, 1.0), (3.0, 4.0), 2.0)
    c = a.add(b)
    assert c.coefficient(1.0) == 5.0 and c.coefficient(2.0) == 4.0
    assert np.allclose(a.scale(2.0)(np.array([0.5])), 2 * (1 + 2 * 0.5))
    assert "@ rho^1" in a.table()
    assert a.rows()[1] == (1.0, 2.0, 0.0)
