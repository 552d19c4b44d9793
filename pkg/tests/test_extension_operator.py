from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pecompact.extension_operator import (
    M2,
    BoundaryFunction,
    StripFunction,
    bump,
    cutoff,
    extension_expansion,
    extension_norm_ratio,
    moment_coefficients,
    mollified,
    mollify_extend,
    plateau,
    quotient_by_rho,
    remainder_slope,
    weighted_derivative_ratio,
)
from pecompact.holder_norms import holder_seminorm
from pecompact.radial_operator import RadialProfile
from pecompact.series import Jet


def gauss(c, w):
    return lambda y: plateau(y) * np.exp(-((y - c) / w) ** 2)


def test_second_moment_constant():
    # independent quadrature of the normalized bump
    from scipy.integrate import quad

    mass = quad(lambda z: bump(np.array([z]))[0], -1, 1, epsabs=1e-14)[0]
    m2 = quad(lambda z: z * z * bump(np.array([z]))[0], -1, 1, epsabs=1e-14)[0] / mass
    assert m2 == pytest.approx(M2, abs=1e-11)


def test_cutoff_shape():
    assert np.all(cutoff(np.linspace(0, 0.5, 11)) == 1.0)
    assert np.all(cutoff(np.linspace(0.75, 1.0, 11)) == 0.0)
    assert np.all(np.diff(cutoff(np.linspace(0, 1, 101))) <= 0)


def test_trace_and_plateau_examples():
    f = BoundaryFunction.from_callable(plateau)
    F = mollify_extend(f)
    assert np.array_equal(F.trace(), f.values)
    mask = np.abs(F.y[None, :]) <= 0.5 - F.x[:, None]
    assert np.max(np.abs(F.values - cutoff(F.x)[:, None])[mask]) < 1e-13
    assert np.all(mollify_extend(f, l=2).trace() == 0.0)


def test_expansion_of_constant_with_l2():
    F = mollify_extend(BoundaryFunction.from_callable(plateau), 2, 2)
    coef = extension_expansion(F, 2)
    sel = np.abs(F.y) <= 0.2
    assert np.allclose(coef[0][sel], 1.0, atol=1e-10)
    assert np.allclose(coef[1][sel], 0.0, atol=1e-9) and np.allclose(coef[2][sel], 0.0, atol=1e-8)


def test_expansion_matches_moment_oracle():
    func = gauss(0.1, 0.3)
    f = BoundaryFunction.from_callable(func)
    coef = extension_expansion(mollify_extend(f, 2, 0, nx=193), 2, 0, x_fit=0.15, extra=4)
    y = f.y
    d1 = np.gradient(func(y), y)
    d2 = np.gradient(d1, y)
    oracle = moment_coefficients(f, 2, [func(y), d1, d2])
    sel = np.abs(y) < 0.4
    assert np.allclose(coef[0][sel], oracle[0][sel], atol=1e-9)
    assert np.allclose(coef[1][sel], 0.0, atol=2e-6)  # odd moment vanishes up to fit error
    assert np.allclose(coef[2][sel], oracle[2][sel], atol=2e-3 * np.max(np.abs(oracle[2])))


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-0.3, 0.3), st.floats(0.1, 0.3))
def test_linearity(a, b, c, w):
    f = BoundaryFunction.from_callable(gauss(c, w), ny=201)
    g = BoundaryFunction.from_callable(lambda y: y * plateau(y), ny=201)
    h = BoundaryFunction(f.y, a * f.values + b * g.values)
    lhs = mollify_extend(h, nx=25).values
    rhs = a * mollify_extend(BoundaryFunction(f.y, f.values), nx=25).values + b * mollify_extend(
        BoundaryFunction(g.y, g.values), nx=25).values
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-13)


@settings(max_examples=10, deadline=None)
@given(st.integers(-20, 20))
def test_translation_commutes(shift):
    ny = 401
    y = np.linspace(-1, 1, ny)
    h = y[1] - y[0]
    base = lambda t: np.exp(-((t / 0.12) ** 2)) * plateau(t / 0.6)  # noqa: E731
    f = BoundaryFunction(y, base(y))
    fs = BoundaryFunction(y, base(y - shift * h))
    F = mollify_extend(f, nx=25).values
    Fs = mollify_extend(fs, nx=25).values
    inner = slice(60, ny - 60)
    assert np.allclose(np.roll(F, shift, axis=1)[:, inner], Fs[:, inner], atol=1e-12)


def test_derivative_commutes_with_extension():
    func = gauss(0.0, 0.25)
    f = BoundaryFunction.from_callable(func)
    dfunc = lambda y: np.gradient(func(y), y)  # noqa: E731
    df = BoundaryFunction(f.y, dfunc(f.y))
    F = mollify_extend(f, nx=25)
    dF = np.gradient(F.values, F.y, axis=1)
    assert np.max(np.abs(dF - mollify_extend(df, nx=25).values)) < 5e-4


def test_remainder_slope_for_holder_kink():
    y0 = 0.1
    f = BoundaryFunction.from_callable(lambda y: np.abs(y - y0) ** 2.5 * plateau(y), k=2, alpha=0.5)
    slope, h, diffs = remainder_slope(f, 2, 0, y0)
    assert slope == pytest.approx(2.5, abs=0.1)
    interp = BoundaryFunction(f.y, f.values, 2, 0.5)
    assert remainder_slope(interp, 2, 0, y0)[0] == pytest.approx(2.5, abs=0.1)


def test_norm_ratio_homogeneous():
    f = BoundaryFunction.from_callable(gauss(0.2, 0.2), ny=401)
    assert extension_norm_ratio(f, 1, 1, 0.5) == pytest.approx(extension_norm_ratio(f.scaled(2.0), 1, 1, 0.5), rel=1e-12)


def test_weighted_derivative_ratio_stable():
    func = gauss(-0.1, 0.2)
    a = weighted_derivative_ratio(BoundaryFunction.from_callable(func, ny=401), 1, 1, 0.5, nx=97)
    b = weighted_derivative_ratio(BoundaryFunction.from_callable(func, ny=801), 1, 1, 0.5, nx=193)
    assert b == pytest.approx(a, rel=0.05)


def strip(fn, nx=97, ny=201):
    x = np.linspace(0, 0.96, nx)
    y = np.linspace(-1, 1, ny)
    return StripFunction(x, y, fn(x[:, None], y[None, :]))


def test_quotient_of_linear_and_sine():
    g = lambda y: np.cos(2 * y)  # noqa: E731
    q = quotient_by_rho(strip(lambda x, y: x * cutoff(x) * g(y)))
    assert np.allclose(q.values[q.x <= 0.5], g(q.y)[None, :], atol=1e-13)
    q = quotient_by_rho(strip(lambda x, y: np.sin(x) * g(y)))
    assert np.max(np.abs(q.values[0] - g(q.y))) < 1e-8


def test_quotient_rejects_nonvanishing_trace():
    with pytest.raises(ValueError):
        quotient_by_rho(strip(lambda x, y: 1.0 + x * y))


def test_quotient_of_fractional_power_has_holder_ceiling():
    vals = []
    for nx in (97, 193, 385):
        q = quotient_by_rho(strip(lambda x, y: x**1.5 * (1 + 0 * y), nx=nx, ny=5))
        p = RadialProfile(q.x, Jet(q.values[:, 2][None]))
        vals.append(holder_seminorm(p, 0, 0.7).seminorm)
    assert vals[0] < vals[1] < vals[2]


def test_boundary_function_validation():
    y = np.linspace(-1, 1, 101)
    with pytest.raises(ValueError):
        BoundaryFunction(y, np.ones_like(y))  # support reaches the edge
    with pytest.raises(ValueError):
        BoundaryFunction(np.linspace(-0.5, 1, 101), np.zeros(101))
    with pytest.raises(ValueError):
        mollify_extend(BoundaryFunction.from_callable(plateau), k=-1)
    assert mollified(BoundaryFunction.from_callable(plateau), 0.0)[400] == 1.0
