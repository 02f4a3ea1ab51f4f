"""Dimensional energies of the color-dipole spectrum and fits to meson levels.

Units follow one policy throughout: energies in MeV, squared energies in
GeV^2, lengths in fm. The only conversion factor lives in ``MEV2_PER_GEV2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

HBAR_C_MEV_FM = 197.3269804
MEV2_PER_GEV2 = 1.0e6

# Fitted constants for the f0 tower, in GeV^2.
REFERENCE_A = 0.10964
REFERENCE_B = 1.0434
REFERENCE_C = 1.1873

FIT_MODES = ("staged", "joint")


@dataclass(frozen=True)
class PhysicalParams:
    """Physical inputs of the dipole spectrum.

    ``mu_q_mev`` defaults to half of ``lambda_qcd_mev``; pass a value to treat
    it as a free parameter instead. ``mu_is_derived`` records which case holds.
    """

    R_fm: float
    lambda_qcd_mev: float
    alpha_s: float
    n_c: int = 3
    n_f: int = 3
    mu_q_mev: float | None = None
    hbar_c: float = HBAR_C_MEV_FM

    def __post_init__(self):
        if not self.R_fm > 0:
            raise ValueError("R_fm must be positive")
        if not self.lambda_qcd_mev > 0:
            raise ValueError("lambda_qcd_mev must be positive")
        if self.n_c < 1:
            raise ValueError("n_c must be at least 1")
        if self.mu_q_mev is not None and not self.mu_q_mev > 0:
            raise ValueError("mu_q_mev must be positive")

    @property
    def mu_is_derived(self) -> bool:
        return self.mu_q_mev is None

    @property
    def mu(self) -> float:
        return self.lambda_qcd_mev / 2 if self.mu_q_mev is None else self.mu_q_mev

    @property
    def alpha_s_nc(self) -> float:
        return self.alpha_s * self.n_c

    @property
    def reduced_compton_wavelength(self) -> float:
        return self.hbar_c / self.mu

    @classmethod
    def from_fit_constants(
        cls, A: float = REFERENCE_A, B: float = REFERENCE_B, lambda_qcd_mev: float = 200.0, n_c: int = 3, n_f: int = 3
    ) -> "PhysicalParams":
        """Invert A = (hbar c/R)^2 and B = (alpha_s N_c Lambda)^2/4 at a given Lambda."""
        if A <= 0 or B < 0:
            raise ValueError("A must be positive and B non-negative")
        R = HBAR_C_MEV_FM / math.sqrt(A * MEV2_PER_GEV2)
        alpha_s = 2 * math.sqrt(B * MEV2_PER_GEV2) / (n_c * lambda_qcd_mev)
        return cls(R, lambda_qcd_mev, alpha_s, n_c, n_f)


def _check_K(K) -> np.ndarray:
    k = np.asarray(K)
    if np.any(k < 0):
        raise ValueError("K must be non-negative")
    return k + 1.0


def spectrum_coefficients(p: PhysicalParams) -> tuple[float, float]:
    """(A, B) in GeV^2 such that E^2_K = A (K+1)^2 - B / (K+1)^2."""
    A = (p.hbar_c / p.R_fm) ** 2 / MEV2_PER_GEV2
    B = (p.alpha_s_nc * p.lambda_qcd_mev) ** 2 / 4 / MEV2_PER_GEV2
    return A, B


def squared_energy_formula(K, A: float, B: float, C: float = 0.0):
    k1 = _check_K(K)
    return A * k1**2 - B / k1**2 + C


def energy_squared(K, p: PhysicalParams):
    """Squared energy of level K in GeV^2 (no constant offset)."""
    A, B = spectrum_coefficients(p)
    out = squared_energy_formula(K, A, B)
    return float(out) if np.ndim(out) == 0 else out


def energy_mev(K, p: PhysicalParams):
    """Schroedinger-form energy of level K in MeV."""
    k1 = _check_K(K)
    kinetic = p.hbar_c**2 / (2 * p.mu * p.R_fm**2)
    out = kinetic * k1**2 - strong_rydberg(p) / k1**2
    return float(out) if np.ndim(out) == 0 else out


def energy_rydberg_form(K, p: PhysicalParams):
    k1 = _check_K(K)
    out = strong_rydberg(p) * (-1 / k1**2 + (bohr_radius(p) / p.R_fm) ** 2 * k1**2)
    return float(out) if np.ndim(out) == 0 else out


def strong_rydberg(p: PhysicalParams) -> float:
    return p.mu * p.alpha_s_nc**2 / 2


def bohr_radius(p: PhysicalParams) -> float:
    """Quark analogue of the reduced Bohr radius, in fm."""
    if p.alpha_s_nc == 0:
        return math.inf
    return p.hbar_c / (p.mu * p.alpha_s_nc)


def rydberg_identity_residual(p: PhysicalParams) -> float:
    """Relative gap between mu a^2 N^2/2 and (hbar c)^2 / (2 mu a0^2)."""
    ry = strong_rydberg(p)
    alt = p.hbar_c**2 / (2 * p.mu * bohr_radius(p) ** 2)
    return abs(ry - alt) / abs(ry)


def cot_magnitude(G_mev_fm: float, R_fm: float) -> float:
    """Strength 2G/R of a cotangent term written with a fitted G."""
    return 2 * G_mev_fm / R_fm


@dataclass(frozen=True)
class LevelRow:
    label: str
    mass_mev: float
    K: int
    sigma_mev: float | None = None

    @property
    def mass_squared_gev2(self) -> float:
        return self.mass_mev**2 / MEV2_PER_GEV2


@dataclass(frozen=True)
class LevelDataset:
    rows: tuple[LevelRow, ...]
    source: str | None = None

    def __post_init__(self):
        if not self.rows:
            raise ValueError("dataset is empty")
        for row in self.rows:
            if not row.mass_mev > 0:
                raise ValueError(f"row {row.label!r}: mass must be positive")
            if row.K < 0:
                raise ValueError(f"row {row.label!r}: K must be non-negative")
            if row.sigma_mev is not None and not row.sigma_mev > 0:
                raise ValueError(f"row {row.label!r}: sigma must be positive")
        sigmas = {row.sigma_mev is None for row in self.rows}
        if len(sigmas) > 1:
            raise ValueError("sigma_mev must be given for every row or for none")

    @property
    def K(self) -> np.ndarray:
        return np.array([row.K for row in self.rows], dtype=int)

    @property
    def mass_squared(self) -> np.ndarray:
        return np.array([row.mass_squared_gev2 for row in self.rows])

    @property
    def has_uncertainties(self) -> bool:
        return self.rows[0].sigma_mev is not None

    @property
    def distinct_K(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.K.tolist())))

    def scaled(self, factor: float) -> "LevelDataset":
        """Dataset with every M^2 multiplied by ``factor``."""
        s = math.sqrt(factor)
        rows = tuple(
            replace(r, mass_mev=r.mass_mev * s, sigma_mev=None if r.sigma_mev is None else r.sigma_mev * s)
            for r in self.rows
        )
        return LevelDataset(rows, self.source)

    @classmethod
    def from_csv(cls, path) -> "LevelDataset":
        """Read ``label,mass_mev,K[,sigma_mev]`` with optional ``#`` comment lines."""
        path = Path(path)
        with path.open(newline="") as handle:
            lines = [line for line in handle if line.strip() and not line.lstrip().startswith("#")]
        reader = csv.DictReader(lines)
        header = [name.strip() for name in reader.fieldnames or []]
        if header[:3] != ["label", "mass_mev", "K"] or len(header) > 4 or (len(header) == 4 and header[3] != "sigma_mev"):
            raise ValueError(f"{path}: expected header label,mass_mev,K[,sigma_mev], got {','.join(header)}")
        reader.fieldnames = header
        rows = []
        for number, record in enumerate(reader, start=2):
            try:
                k_text = record["K"].strip()
                k = int(k_text)
                sigma = record.get("sigma_mev")
                rows.append(
                    LevelRow(
                        record["label"].strip(),
                        float(record["mass_mev"]),
                        k,
                        float(sigma) if sigma not in (None, "") else None,
                    )
                )
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: malformed data row {number}: {exc}") from exc
        return cls(tuple(rows), str(path))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            header = ["label", "mass_mev", "K"] + (["sigma_mev"] if self.has_uncertainties else [])
            writer.writerow(header)
            for r in self.rows:
                values = [r.label, f"{r.mass_mev:.12g}", r.K]
                if self.has_uncertainties:
                    values.append(f"{r.sigma_mev:.12g}")
                writer.writerow(values)


def synthetic_levels(
    A: float = REFERENCE_A,
    B: float = REFERENCE_B,
    C: float = REFERENCE_C,
    K_values: Iterable[int] = range(6),
    noise_fraction: float = 0.0,
    seed: int = 0,
) -> LevelDataset:
    """Levels drawn from A (K+1)^2 - B/(K+1)^2 + C with Gaussian noise on M^2."""
    K_values = list(K_values)
    m2 = squared_energy_formula(np.array(K_values), A, B, C)
    if noise_fraction:
        rng = np.random.default_rng(seed)
        m2 = m2 * (1 + noise_fraction * rng.standard_normal(m2.size))
    if np.any(m2 <= 0):
        raise ValueError("synthetic M^2 must stay positive; adjust the constants or the noise")
    rows = tuple(
        LevelRow(f"K{k}", math.sqrt(v * MEV2_PER_GEV2), k) for k, v in zip(K_values, m2)
    )
    return LevelDataset(rows, source=f"synthetic(seed={seed}, noise={noise_fraction})")


class RankDeficientError(ValueError):
    """The level assignments cannot determine A, B and C."""


@dataclass(frozen=True)
class FitResult:
    A: float
    B: float
    C: float
    residuals: np.ndarray
    covariance: np.ndarray
    mode: str = "staged"
    K: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    observed: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def parameters(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C])

    @property
    def confining(self) -> bool:
        return self.A > 0

    def predict(self, K):
        return squared_energy_formula(K, self.A, self.B, self.C)

    def predicted_masses_mev(self, K):
        m2 = np.asarray(self.predict(K), dtype=float)
        return np.sqrt(np.clip(m2, 0, None) * MEV2_PER_GEV2)

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "mode": self.mode,
            "residuals": self.residuals.tolist(),
            "covariance": self.covariance.tolist(),
        }


def design_matrix(K) -> np.ndarray:
    k1 = _check_K(K).astype(float)
    return np.column_stack([k1**2, -1 / k1**2, np.ones_like(k1)])


def fit_levels(data: LevelDataset, mode: str = "staged") -> FitResult:
    """Least-squares fit of M^2 = A (K+1)^2 - B/(K+1)^2 + C.

    ``staged`` first fits A and B to the level splittings (M^2 with the
    weighted mean removed) and then fixes C as the mean offset; ``joint``
    solves for all three at once. With a linear model the two agree to
    rounding, which the staged route makes explicit.
    """
    if mode not in FIT_MODES:
        raise ValueError(f"mode must be one of {FIT_MODES}, got {mode!r}")
    distinct = data.distinct_K
    if len(distinct) < 3:
        raise RankDeficientError(
            f"need at least 3 distinct K values to fit A, B, C; got {len(distinct)} ({list(distinct)}), "
            f"so the (K+1)^2, 1/(K+1)^2 and constant columns are linearly dependent"
        )
    K = data.K
    y = data.mass_squared
    X = design_matrix(K)
    if data.has_uncertainties:
        sigma_m2 = np.array([2 * r.mass_mev * r.sigma_mev for r in data.rows]) / MEV2_PER_GEV2
        w = 1 / sigma_m2**2
    else:
        w = np.ones_like(y)
    sw = np.sqrt(w)

    if mode == "joint":
        params, *_ = linalg.lstsq(X * sw[:, None], y * sw)
    else:
        def wmean(v):
            return np.tensordot(w, v, axes=1) / np.sum(w)

        Xc = X[:, :2] - wmean(X[:, :2])
        yc = y - wmean(y)
        ab, *_ = linalg.lstsq(Xc * sw[:, None], yc * sw)
        c = wmean(y - X[:, :2] @ ab)
        params = np.array([ab[0], ab[1], c])

    residuals = y - X @ params
    normal = (X * w[:, None]).T @ X
    inverse = linalg.inv(normal)
    if data.has_uncertainties:
        covariance = inverse
    else:
        dof = y.size - 3
        scale = float(residuals @ residuals) / dof if dof > 0 else 0.0
        covariance = scale * inverse
    return FitResult(float(params[0]), float(params[1]), float(params[2]), residuals, covariance, mode, K, y)


def predicted_vs_observed(data: LevelDataset, fit: FitResult) -> list[dict]:
    predicted = fit.predicted_masses_mev(data.K)
    return [
        {"label": r.label, "K": r.K, "observed_mev": r.mass_mev, "predicted_mev": float(m)}
        for r, m in zip(data.rows, predicted)
    ]


def level_degeneracy(K: int) -> int:
    """Number of (l, m) states sharing the level K."""
    if K < 0:
        raise ValueError("K must be non-negative")
    return (K + 1) ** 2


def turning_point(A: float, B: float) -> float:
    """Smallest K from which A (K+1)^2 - B/(K+1)^2 increases.

    The derivative 2A(K+1) + 2B/(K+1)^3 is positive for A > 0 unless B is
    negative enough; the turning point solves A (K+1)^4 = -B.
    """
    if A <= 0:
        raise ValueError("A must be positive for a confining spectrum")
    if B >= 0:
        return 0.0
    return max((-B / A) ** 0.25 - 1, 0.0)


def fit_summary(fit: FitResult, truth: Sequence[float] | None = None) -> dict:
    out = fit.to_dict()
    if truth is not None:
        t = np.asarray(truth, dtype=float)
        out["relative_error"] = (np.abs(fit.parameters - t) / np.abs(t)).tolist()
    return out
