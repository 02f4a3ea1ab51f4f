"""Orthogonal polynomials and quasi-radial functions on the three-sphere.

All functions accept scalars or numpy arrays for the continuous argument and
are pure.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import Polynomial


def _check_degree(n: int) -> None:
    if int(n) != n or n < 0:
        raise ValueError(f"polynomial degree must be a non-negative integer, got {n!r}")


def gegenbauer(n: int, alpha: float, x):
    """Gegenbauer polynomial G_n^alpha(x) by the three-term recurrence.

    G_0 = 1, G_1 = 2 alpha x and
    n G_n = 2 x (n + alpha - 1) G_{n-1} - (n + 2 alpha - 2) G_{n-2}.
    """
    _check_degree(n)
    if alpha <= -0.5:
        raise ValueError(f"Gegenbauer parameter must exceed -1/2, got {alpha!r}")
    x = np.asarray(x, dtype=float)
    g_prev = np.ones_like(x)
    if n == 0:
        return g_prev if g_prev.ndim else float(g_prev)
    g = 2.0 * alpha * x
    for m in range(2, n + 1):
        g_prev, g = g, (2.0 * x * (m + alpha - 1.0) * g - (m + 2.0 * alpha - 2.0) * g_prev) / m
    return g if g.ndim else float(g)


def gegenbauer_derivative(n: int, alpha: float, x):
    """d/dx G_n^alpha(x) = 2 alpha G_{n-1}^{alpha+1}(x)."""
    _check_degree(n)
    if n == 0:
        zero = np.zeros_like(np.asarray(x, dtype=float))
        return zero if zero.ndim else 0.0
    return 2.0 * alpha * gegenbauer(n - 1, alpha + 1.0, x)


def _check_state(K: int, ell: int) -> None:
    if int(K) != K or K < 0:
        raise ValueError(f"K must be a non-negative integer, got {K!r}")
    if int(ell) != ell or ell < 0 or ell > K:
        raise ValueError(f"ell must satisfy 0 <= ell <= K, got ell={ell!r}, K={K!r}")


def _check_open_interval(chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0.0) or np.any(chi >= np.pi):
        raise ValueError("chi must lie strictly inside (0, pi)")
    return chi


def quasi_radial(K: int, ell: int, chi):
    """S_{K ell}(chi) = sin^ell(chi) G_{K-ell}^{ell+1}(cos chi)."""
    _check_state(K, ell)
    chi = _check_open_interval(chi)
    value = np.sin(chi) ** ell * gegenbauer(K - ell, ell + 1.0, np.cos(chi))
    return value if np.ndim(value) else float(value)


def quasi_radial_derivative(K: int, ell: int, chi):
    """Analytic chi-derivative of :func:`quasi_radial`."""
    _check_state(K, ell)
    chi = _check_open_interval(chi)
    s, c = np.sin(chi), np.cos(chi)
    n = K - ell
    g = gegenbauer(n, ell + 1.0, c)
    dg = gegenbauer_derivative(n, ell + 1.0, c)
    if ell == 0:
        value = -s * dg
    else:
        value = ell * s ** (ell - 1) * c * g - s ** (ell + 1) * dg
    return value if np.ndim(value) else float(value)


def gradient_annihilation_residual(K: int, chi_grid) -> float:
    """max |(d/dchi - K cot chi) S_KK(chi)| over the grid.

    The highest-ell state S_KK = sin^K chi is annihilated exactly, so the
    result measures rounding only.
    """
    chi = _check_open_interval(chi_grid)
    if chi.size == 0:
        return 0.0
    residual = quasi_radial_derivative(K, K, chi) - K / np.tan(chi) * quasi_radial(K, K, chi)
    return float(np.max(np.abs(residual)))


def arccot(z):
    """Inverse cotangent on the branch (0, pi), continuous in z."""
    value = 0.5 * np.pi - np.arctan(np.asarray(z, dtype=float))
    return value if np.ndim(value) else float(value)


def romanovski_weight(alpha: float, beta: float, z):
    """Weight (1 + z^2)^(beta - 1) exp(-alpha arccot z)."""
    z = np.asarray(z, dtype=float)
    value = (1.0 + z * z) ** (beta - 1.0) * np.exp(-alpha * arccot(z))
    return value if np.ndim(value) else float(value)


def romanovski_polynomial(n: int, alpha: float, beta: float) -> Polynomial:
    """Romanovski polynomial R_n^{alpha,beta} as explicit coefficients.

    Expands the Rodrigues formula R_n = w^-1 d^n/dz^n [(1 + z^2)^n w] with unit
    prefactor. Writing the k-th derivative as
    p_k(z) (1 + z^2)^(n + beta - 1 - k) exp(-alpha arccot z), the weight
    factors cancel and p_{k+1} = (1 + z^2) p_k' + (2 s_k z + alpha) p_k with
    s_k = n + beta - 1 - k. R_n = p_n.
    """
    _check_degree(n)
    sigma = Polynomial([1.0, 0.0, 1.0])
    p = Polynomial([1.0])
    for k in range(n):
        s_k = n + beta - 1.0 - k
        p = sigma * p.deriv() + Polynomial([alpha, 2.0 * s_k]) * p
    return p


def romanovski(n: int, alpha: float, beta: float, z):
    """Evaluate R_n^{alpha,beta}(z); R_0 = 1."""
    value = romanovski_polynomial(n, alpha, beta)(np.asarray(z, dtype=float))
    return value if np.ndim(value) else float(value)
