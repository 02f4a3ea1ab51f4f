import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gegenbauer_series, romanovski_rodrigues
from s3conformal.special_functions import (
    arccot,
    gegenbauer,
    gradient_annihilation_residual,
    quasi_radial,
    quasi_radial_derivative,
    romanovski,
    romanovski_polynomial,
    romanovski_weight,
)


def test_gegenbauer_low_degrees():
    assert gegenbauer(0, 2.0, 0.3) == 1.0
    assert gegenbauer(1, 1.0, 0.5) == pytest.approx(1.0, abs=0)


def test_gegenbauer_degree_three_against_series():
    expected = gegenbauer_series(3, 1.5, 0.2)
    assert gegenbauer(3, 1.5, 0.2) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("alpha", [1.0, 1.5, 3.0])
@pytest.mark.parametrize("n", range(11))
def test_gegenbauer_recurrence_matches_series(n, alpha):
    xs = np.linspace(-1.0, 1.0, 50)
    got = gegenbauer(n, alpha, xs)
    want = np.array([gegenbauer_series(n, alpha, x) for x in xs])
    scale = np.maximum(np.abs(want), 1.0)
    assert np.max(np.abs(got - want) / scale) < 1e-10


def test_gegenbauer_rejects_negative_degree():
    with pytest.raises(ValueError):
        gegenbauer(-1, 1.0, 0.2)


def test_quasi_radial_examples():
    assert quasi_radial(0, 0, np.pi / 2) == 1.0
    chi = np.linspace(0.1, 3.0, 7)
    np.testing.assert_allclose(quasi_radial(1, 1, chi), np.sin(chi), rtol=1e-15)
    assert quasi_radial(2, 0, np.pi / 3) == pytest.approx(gegenbauer_series(2, 1.0, 0.5), rel=1e-14)


@pytest.mark.parametrize("K,ell", [(2, 3), (-1, 0)])
def test_quasi_radial_rejects_bad_quantum_numbers(K, ell):
    with pytest.raises(ValueError):
        quasi_radial(K, ell, 1.0)


@pytest.mark.parametrize("chi", [0.0, np.pi, -0.2])
def test_quasi_radial_rejects_endpoints(chi):
    with pytest.raises(ValueError):
        quasi_radial(1, 0, chi)


@pytest.mark.parametrize("K,ell", [(0, 0), (3, 1), (4, 4), (6, 2)])
def test_quasi_radial_derivative_matches_central_difference(K, ell):
    chi = np.linspace(0.2, 2.9, 40)
    h = 1e-6
    numeric = (quasi_radial(K, ell, chi + h) - quasi_radial(K, ell, chi - h)) / (2 * h)
    np.testing.assert_allclose(quasi_radial_derivative(K, ell, chi), numeric, atol=1e-7)


@pytest.mark.parametrize("K,npts,tol", [(0, 100, 0.0), (3, 100, 1e-12), (7, 1000, 1e-11)])
def test_gradient_annihilation(K, npts, tol):
    grid = np.linspace(0.0, np.pi, npts + 2)[1:-1]
    assert gradient_annihilation_residual(K, grid) <= tol


@pytest.mark.parametrize("K,ell", [(1, 1), (3, 2), (5, 3)])
def test_quasi_radial_endpoint_power_law(K, ell):
    # |S| ~ chi^ell near 0: log-log slope on [1e-4, 1e-2]
    chi = np.array([1e-4, 1e-2])
    values = np.abs(quasi_radial(K, ell, chi))
    slope = np.diff(np.log(values))[0] / np.diff(np.log(chi))[0]
    assert slope == pytest.approx(ell, abs=1e-3)


def test_arccot_branch():
    z = np.array([-1e6, -1.0, 0.0, 1.0, 1e6])
    got = arccot(z)
    assert np.all((got > 0) & (got < np.pi))
    assert np.all(np.diff(got) < 0)
    np.testing.assert_allclose(np.tan(got[1:-1]) ** -1, z[1:-1], atol=1e-15)


def test_romanovski_degree_zero_is_one():
    assert romanovski(0, 0.7, -3.0, 1.7) == 1.0


@pytest.mark.parametrize("K", [1, 2, 5])
def test_romanovski_first_degree_is_gradient_coefficient(K):
    alpha_k = 2.0 / (K + 1)
    z = np.linspace(-3, 3, 11)
    # The tRM reduction carries the polynomial with superscript -alpha_K.
    np.testing.assert_allclose(romanovski(1, -alpha_k, -K, z), -alpha_k - 2 * K * z, rtol=1e-14)


def test_romanovski_degree_two_against_numerical_rodrigues():
    want = romanovski_rodrigues(2, 1.0, -2.0, 0.5)
    assert romanovski(2, 1.0, -2.0, 0.5) == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("n", range(6))
def test_romanovski_rodrigues_higher_degrees(n):
    for z in (-1.3, 0.2, 2.5):
        want = romanovski_rodrigues(n, 0.8, -3.0, z)
        assert romanovski(n, 0.8, -3.0, z) == pytest.approx(want, rel=1e-8, abs=1e-10)


def _romanovski_ode_residual(K, ell, alpha_s_nc, z, scaled=True):
    alpha_k = alpha_s_nc / (K + 1)
    n = K - ell
    p = romanovski_polynomial(n, -alpha_k, -K)
    u, du, d2u = p(z), p.deriv(1)(z), p.deriv(2)(z)
    residual = (1 + z * z) * d2u + (-alpha_k - 2 * K * z) * du + (K * (K + 1) - ell * (ell + 1)) * u
    if not scaled:
        return np.max(np.abs(residual))
    scale = np.maximum(np.abs((1 + z * z) * d2u) + np.abs((alpha_k + 2 * K * np.abs(z)) * du), 1.0)
    return np.max(np.abs(residual) / scale)


@pytest.mark.parametrize("K", range(6))
def test_romanovski_solves_trm_reduced_equation(K):
    z = np.linspace(-4.0, 4.0, 50)
    for ell in range(K + 1):
        if K - ell > 5:
            continue
        assert _romanovski_ode_residual(K, ell, 2.0, z, scaled=False) < 1e-8


@settings(max_examples=50, deadline=None)
@given(
    K=st.integers(0, 5),
    data=st.data(),
    alpha_s_nc=st.floats(-6.0, 6.0, allow_nan=False),
)
def test_romanovski_ode_property(K, data, alpha_s_nc):
    ell = data.draw(st.integers(0, K))
    z = np.linspace(-3.0, 3.0, 50)
    assert _romanovski_ode_residual(K, ell, alpha_s_nc, z) < 1e-8


def test_romanovski_weight_positive():
    z = np.linspace(-50, 50, 201)
    assert np.all(romanovski_weight(1.3, -2.0, z) > 0)
