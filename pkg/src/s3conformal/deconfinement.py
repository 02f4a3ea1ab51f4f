"""Large compactification radius physics.

Covers the radius-dependent one-loop coupling, the linear temperature/radius
relation, the collapse of the cotangent dipole potential onto a Coulomb
potential, and the hydrogen-like limit of the bound-state spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .deformation import dipole_potential, gamma_north, gamma_south
from .eigensolver import SpectralProblem, solve
from .spectroscopy import HBAR_C_MEV_FM, PhysicalParams, bohr_radius, strong_rydberg

FIGURE2_PREFACTOR = 1.4
FIGURE2_DOMAIN = (1e-6, 10.0)
FIGURE2_SAMPLES = 150


def beta0(n_f: int) -> float:
    return 11 - 2 * n_f / 3


@dataclass(frozen=True)
class NonPerturbative:
    """Marker returned instead of a coupling when the logarithm is not positive-definite."""

    log_argument: float
    reason: str = "logarithm argument <= 1: the one-loop coupling is negative or divergent"

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class CouplingParams:
    """Inputs of the radius-dependent one-loop coupling.

    ``q2`` is Q^2 c^2 in MeV^2 and ``x`` is (hbar c / (R Lambda))^2.
    """

    x: float
    q2: float = 0.0
    rho: float = 0.0
    n_f: int = 3
    lambda_qcd_mev: float = 200.0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if not self.x > 0:
            raise ValueError("x must be positive")
        if self.q2 < 0:
            raise ValueError("q2 must be non-negative")
        if beta0(self.n_f) <= 0:
            raise ValueError(f"beta0 = 11 - 2 n_f/3 must be positive; n_f = {self.n_f} loses asymptotic freedom")

    @property
    def beta0(self) -> float:
        return beta0(self.n_f)

    @classmethod
    def from_radius(cls, R_fm: float, lambda_qcd_mev: float = 200.0, **kwargs) -> "CouplingParams":
        return cls(x=x_from_radius(R_fm, lambda_qcd_mev), lambda_qcd_mev=lambda_qcd_mev, **kwargs)


def x_from_radius(R_fm: float, lambda_qcd_mev: float, hbar_c: float = HBAR_C_MEV_FM) -> float:
    if R_fm <= 0:
        raise ValueError("R must be positive")
    return (hbar_c / (R_fm * lambda_qcd_mev)) ** 2


def _coupling_from_argument(argument: float, b0: float):
    if argument <= 1.0:
        return NonPerturbative(argument)
    return 4 * math.pi / (b0 * math.log(argument))


def log_argument(p: CouplingParams) -> float:
    uv = p.q2 / p.lambda_qcd_mev**2
    return uv + math.sqrt(1 - p.rho**2) * p.x + p.rho / p.x


def alpha_s_compactified(p: CouplingParams):
    """One-loop coupling with both the 1/R^2 and the R^2 infrared terms."""
    return _coupling_from_argument(log_argument(p), p.beta0)


def alpha_s_original(p: CouplingParams):
    """Coupling with only the 1/R^2 term; ``rho`` is ignored."""
    return _coupling_from_argument(p.q2 / p.lambda_qcd_mev**2 + p.x, p.beta0)


def figure2_curve(x):
    """The plotted infrared curve 1.4 / ln(x + 1/x)."""
    x = np.asarray(x, dtype=float)
    out = FIGURE2_PREFACTOR / np.log(x + 1 / x)
    return float(out) if out.ndim == 0 else out


def figure2_samples(samples: int = FIGURE2_SAMPLES, domain: tuple[float, float] = FIGURE2_DOMAIN):
    x = np.linspace(domain[0], domain[1], samples)
    return x, figure2_curve(x)


def figure2_literal(x, n_f: int = 3, rho: float = 1 / math.sqrt(2)):
    """The compactified formula at Q^2 = 0, read with its rho coefficients kept."""
    values = [alpha_s_compactified(CouplingParams(float(xi), rho=rho, n_f=n_f)) for xi in np.atleast_1d(x)]
    return values[0] if np.ndim(x) == 0 else values


def temperature_from_radius(R_fm: float, lambda_qcd_mev: float, n_c: int, hbar_c: float = HBAR_C_MEV_FM) -> float:
    """T = Lambda^2 R / (N_c hbar c), in MeV."""
    if R_fm <= 0:
        raise ValueError("R must be positive")
    return lambda_qcd_mev**2 * R_fm / (n_c * hbar_c)


def radius_from_temperature(T_mev: float, lambda_qcd_mev: float, n_c: int, hbar_c: float = HBAR_C_MEV_FM) -> float:
    if T_mev <= 0:
        raise ValueError("T must be positive")
    return T_mev * n_c * hbar_c / lambda_qcd_mev**2


@dataclass(frozen=True)
class CollapseReport:
    r_fm: np.ndarray
    v_curved: np.ndarray
    v_flat: np.ndarray
    deviation: np.ndarray
    R_fm: float
    r_max_fraction: float

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())

    @property
    def series_bound(self) -> float:
        """Leading term of 1 - x cot x at the outer edge."""
        return self.r_max_fraction**2 / 3

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.deviation) > 0))

    def rows(self) -> list[dict]:
        return [
            {"r_fm": float(r), "v_curved_mev": float(c), "v_flat_mev": float(f), "relative_deviation": float(d)}
            for r, c, f, d in zip(self.r_fm, self.v_curved, self.v_flat, self.deviation)
        ]


def _one_minus_x_cot_x(x: np.ndarray) -> np.ndarray:
    small = x < 1e-2
    out = np.empty_like(x)
    xs = x[small]
    out[small] = xs**2 / 3 + xs**4 / 45 + 2 * xs**6 / 945
    xl = x[~small]
    out[~small] = 1 - xl / np.tan(xl)
    return out


def coulomb_collapse_report(
    R_fm: float, alpha_s_nc: float, r_max_fraction: float = 0.1, points: int = 200, hbar_c: float = HBAR_C_MEV_FM
) -> CollapseReport:
    """Curved cotangent dipole potential against its flat Coulomb limit on (0, r_max]."""
    if not 0 < r_max_fraction < 1:
        raise ValueError("r_max_fraction must lie in (0, 1)")
    if R_fm <= 0:
        raise ValueError("R must be positive")
    r = np.linspace(r_max_fraction * R_fm / points, r_max_fraction * R_fm, points)
    chi = r / R_fm
    strength = hbar_c * alpha_s_nc
    v_curved = -strength / R_fm / np.tan(chi)
    v_flat = -strength / r
    # |V_curved - V_flat| / |V_flat| = 1 - chi cot chi, independent of the coupling.
    deviation = _one_minus_x_cot_x(chi)
    return CollapseReport(r, v_curved, v_flat, deviation, R_fm, r_max_fraction)


def small_angle_limits(chi, alpha_s_nc: float) -> dict:
    """Single-charge potentials next to their small-angle forms."""
    chi = np.asarray(chi, dtype=float)
    return {
        "gamma_n": gamma_north(chi, alpha_s_nc),
        "gamma_n_limit": alpha_s_nc * (1 / np.tan(chi) - 1 / math.pi),
        "gamma_s": gamma_south(chi, alpha_s_nc),
        "gamma_s_limit": np.full_like(chi, -alpha_s_nc / math.pi),
    }


@dataclass(frozen=True)
class RydbergLimit:
    K: np.ndarray
    bound: np.ndarray
    scattering: np.ndarray
    ionization_energy: float

    @property
    def energies(self) -> np.ndarray:
        return self.bound + self.scattering


def rydberg_limit_spectrum(K_list: Sequence[int], Ry_s: float, a0_star: float, k: float) -> RydbergLimit:
    """E_K = Ry (-1/(K+1)^2 + (a0* k)^2) with its bound and scattering parts apart."""
    K = np.asarray(K_list, dtype=int)
    if np.any(K < 0):
        raise ValueError("K must be non-negative")
    bound = -Ry_s / (K + 1.0) ** 2
    scattering = np.full(K.shape, Ry_s * (a0_star * k) ** 2)
    return RydbergLimit(K, bound, scattering, Ry_s)


@dataclass(frozen=True)
class CurvedFlatRow:
    R_fm: float
    K: int
    solver_mev: float
    coulomb_mev: float
    gap_formula_mev: float
    rydberg_mev: float

    @property
    def gap_solver_mev(self) -> float:
        return self.solver_mev - self.coulomb_mev

    @property
    def gap_discrepancy(self) -> float:
        """Solver gap minus formula gap, in units of the larger of Ry and the gap."""
        scale = max(abs(self.rydberg_mev), abs(self.gap_formula_mev))
        return abs(self.gap_solver_mev - self.gap_formula_mev) / scale

    def as_dict(self) -> dict:
        return {
            "R_fm": self.R_fm,
            "K": self.K,
            "solver_mev": self.solver_mev,
            "coulomb_mev": self.coulomb_mev,
            "gap_solver_mev": self.gap_solver_mev,
            "gap_formula_mev": self.gap_formula_mev,
            "gap_discrepancy": self.gap_discrepancy,
        }


def curvature_gap(K, params: PhysicalParams) -> float:
    """hbar^2 c^2 (K+1)^2 / (2 mu R^2): the distance above the Coulomb level."""
    return params.hbar_c**2 * (np.asarray(K) + 1.0) ** 2 / (2 * params.mu * params.R_fm**2)


def curved_vs_flat_spectrum(
    R_sequence: Sequence[float], params: PhysicalParams, levels: int = 3, ell: int = 0, grid_points: int = 4000
) -> list[CurvedFlatRow]:
    """Solve the dimensional cotangent problem at each radius and compare with Coulomb levels.

    Dividing by hbar^2 c^2/(2 mu R^2) leaves -u'' + l(l+1)/sin^2 u - g cot u
    with g = 2 mu R alpha_s N_c / (hbar c) = 2R / a0*, which the eigensolver
    handles directly.
    """
    R_sequence = [float(r) for r in R_sequence]
    if any(b <= a for a, b in zip(R_sequence, R_sequence[1:])):
        raise ValueError("R_sequence must be strictly increasing")
    rows = []
    for R in R_sequence:
        p = replace(params, R_fm=R)
        scale = p.hbar_c**2 / (2 * p.mu * R**2)
        g = 2 * p.mu * R * p.alpha_s_nc / p.hbar_c
        spectrum = solve(SpectralProblem(dipole_potential(g, ell=ell), grid_points), levels)
        ry = strong_rydberg(p)
        for n, value in enumerate(spectrum.eigenvalues):
            K = n + ell
            rows.append(
                CurvedFlatRow(R, K, float(scale * value), -ry / (K + 1) ** 2, float(curvature_gap(K, p)), ry)
            )
    return rows


def relative_gap(K: int, R_over_a0: float) -> float:
    """Gap to the Coulomb level in units of Ry: ((K+1) a0*/R)^2."""
    return ((K + 1) / R_over_a0) ** 2


def hagedorn_radius(lambda_qcd_mev: float = 200.0, n_c: int = 3, T_mev: float = 160.0) -> float:
    return radius_from_temperature(T_mev, lambda_qcd_mev, n_c)


__all__ = [
    "CollapseReport",
    "CouplingParams",
    "CurvedFlatRow",
    "NonPerturbative",
    "RydbergLimit",
    "alpha_s_compactified",
    "alpha_s_original",
    "beta0",
    "bohr_radius",
    "coulomb_collapse_report",
    "curvature_gap",
    "curved_vs_flat_spectrum",
    "figure2_curve",
    "figure2_literal",
    "figure2_samples",
    "hagedorn_radius",
    "log_argument",
    "radius_from_temperature",
    "relative_gap",
    "rydberg_limit_spectrum",
    "small_angle_limits",
    "temperature_from_radius",
    "x_from_radius",
]
