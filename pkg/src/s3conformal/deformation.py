"""Potentials induced by conformal rescalings e^{-2f(chi)} of the S1xS3 metric.

A :class:`DeformationProfile` carries f and its first two derivatives. From
it :func:`induced_potential` builds the scalar potential

    V(chi) = l(l+1)/sin^2 chi + f'^2 + f'' + 2 f' (K+1) cot chi,

whose highest-l ground state is U_KK = e^f sin^{K+1} chi with eigenvalue
(K+1)^2. The named families reproduce the trigonometric Rosen-Morse,
Poschl-Teller I, Scarf I, MIC-Kepler and a quasi-exactly solvable potential.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import simpson

FULL_DOMAIN = (0.0, math.pi)
HALF_DOMAIN = (0.0, 0.5 * math.pi)
DEFAULT_MARGIN = 1e-2

PROFILE_FAMILIES = ("linear", "log_cos", "log_csc_cot", "mic_kepler", "quadratic", "custom")
CLOSED_FORM_FAMILIES = ("trm", "poschl_teller", "scarf", "mic_kepler", "qes")

# closed-form family -> deformation family generating it
PROFILE_FOR_CLOSED_FORM = {
    "trm": "linear",
    "poschl_teller": "log_cos",
    "scarf": "log_csc_cot",
    "mic_kepler": "mic_kepler",
    "qes": "quadratic",
}

# The Poschl-Teller and Scarf closed forms carry (l+1) in the gradient
# cotangent term; the others carry (K+1).
CLOSED_FORM_COT_FACTOR = {
    "trm": "K",
    "poschl_teller": "ell",
    "scarf": "ell",
    "mic_kepler": "K",
    "qes": "K",
}

Func = Callable[[np.ndarray], np.ndarray]


def _zero(chi):
    return np.zeros_like(np.asarray(chi, dtype=float))


def _cot(chi):
    return 1.0 / np.tan(chi)


@dataclass(frozen=True)
class DeformationProfile:
    """Scale function f(chi) of the conformal factor with f' and f''."""

    family: str
    f: Func
    f_prime: Func
    f_double_prime: Func
    params: Mapping[str, float] = field(default_factory=dict)
    domain: tuple[float, float] = FULL_DOMAIN

    @classmethod
    def zero(cls) -> "DeformationProfile":
        return cls("custom", _zero, _zero, _zero)

    @classmethod
    def linear(cls, alpha_k: float) -> "DeformationProfile":
        """f = alpha_K chi / 2 (trigonometric Rosen-Morse)."""
        return cls(
            "linear",
            lambda chi: 0.5 * alpha_k * np.asarray(chi, dtype=float),
            lambda chi: 0.5 * alpha_k + _zero(chi),
            _zero,
            {"alpha_k": alpha_k},
        )

    @classmethod
    def log_cos(cls, alpha: float) -> "DeformationProfile":
        """f = (alpha/2) ln cos chi (Poschl-Teller I), defined on (0, pi/2)."""
        return cls(
            "log_cos",
            lambda chi: 0.5 * alpha * np.log(np.cos(chi)),
            lambda chi: -0.5 * alpha * np.tan(chi),
            lambda chi: -0.5 * alpha / np.cos(chi) ** 2,
            {"alpha": alpha},
            HALF_DOMAIN,
        )

    @classmethod
    def log_csc_cot(cls, alpha: float) -> "DeformationProfile":
        """Scarf I profile with f' = (alpha/2) csc chi, f'' = -(alpha/2) csc chi cot chi.

        The matching scale function is f = -(alpha/2) ln|csc chi + cot chi|,
        i.e. (alpha/2) ln tan(chi/2).
        """
        return cls(
            "log_csc_cot",
            lambda chi: 0.5 * alpha * np.log(np.tan(0.5 * np.asarray(chi, dtype=float))),
            lambda chi: 0.5 * alpha / np.sin(chi),
            lambda chi: -0.5 * alpha * _cot(chi) / np.sin(chi),
            {"alpha": alpha},
        )

    @classmethod
    def mic_kepler(cls, beta: float, alpha_k: float) -> "DeformationProfile":
        """f = (beta/2) ln sin chi + alpha_K chi / 2."""
        return cls(
            "mic_kepler",
            lambda chi: 0.5 * beta * np.log(np.sin(chi)) + 0.5 * alpha_k * np.asarray(chi, dtype=float),
            lambda chi: 0.5 * beta * _cot(chi) + 0.5 * alpha_k,
            lambda chi: -0.5 * beta / np.sin(chi) ** 2,
            {"beta": beta, "alpha_k": alpha_k},
        )

    @classmethod
    def quadratic(cls, alpha_k: float) -> "DeformationProfile":
        """f = alpha_K chi^2 / 2 (quasi-exactly solvable)."""
        return cls(
            "quadratic",
            lambda chi: 0.5 * alpha_k * np.asarray(chi, dtype=float) ** 2,
            lambda chi: alpha_k * np.asarray(chi, dtype=float),
            lambda chi: alpha_k + _zero(chi),
            {"alpha_k": alpha_k},
        )

    @classmethod
    def custom(cls, f: Func, f_prime: Func, f_double_prime: Func, domain=FULL_DOMAIN, **params) -> "DeformationProfile":
        return cls("custom", f, f_prime, f_double_prime, dict(params), tuple(domain))

    @classmethod
    def from_family(cls, family: str, **params) -> "DeformationProfile":
        builders = {
            "linear": cls.linear,
            "log_cos": cls.log_cos,
            "log_csc_cot": cls.log_csc_cot,
            "mic_kepler": cls.mic_kepler,
            "quadratic": cls.quadratic,
        }
        if family == "zero":
            return cls.zero()
        if family not in builders:
            raise ValueError(f"unknown deformation family {family!r}; expected one of {sorted(builders)}")
        return builders[family](**params)

    def interior_grid(self, n: int = 500, margin: float = DEFAULT_MARGIN) -> np.ndarray:
        a, b = self.domain
        return np.linspace(a + margin, b - margin, n)


@dataclass(frozen=True)
class PotentialModel:
    """A scalar potential on the quasi-radial interval.

    ``function`` is the shape; the constant ``additive_offset`` is kept apart so
    that both the shifted and unshifted forms are available.
    """

    kind: str
    family: str
    ell: int
    K: int
    function: Func
    params: Mapping[str, float] = field(default_factory=dict)
    additive_offset: float = 0.0
    domain: tuple[float, float] = FULL_DOMAIN
    components: Mapping[str, Func] = field(default_factory=dict)

    def evaluate(self, chi, include_offset: bool = True):
        chi = np.asarray(chi, dtype=float)
        value = self.function(chi) + (self.additive_offset if include_offset else 0.0)
        return value if np.ndim(value) else float(value)

    __call__ = evaluate

    def shifted(self, constant: float) -> "PotentialModel":
        """Copy with ``constant`` added to the offset."""
        return PotentialModel(
            self.kind, self.family, self.ell, self.K, self.function, self.params,
            self.additive_offset + constant, self.domain, self.components,
        )


def _check_quantum_numbers(ell: int, K: int) -> None:
    if int(K) != K or K < 0:
        raise ValueError(f"K must be a non-negative integer, got {K!r}")
    if int(ell) != ell or ell < 0 or ell > K:
        raise ValueError(f"ell must satisfy 0 <= ell <= K, got ell={ell!r}, K={K!r}")


def centrifugal(ell: int, chi):
    return ell * (ell + 1) / np.sin(chi) ** 2


def centrifugal_potential(ell: int, domain=FULL_DOMAIN) -> PotentialModel:
    """Free motion on S3 in the quasi-radial variable: l(l+1)/sin^2 chi."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    return PotentialModel("centrifugal", "free", ell, ell, lambda chi: centrifugal(ell, chi), domain=domain)


def induced_potential(profile: DeformationProfile, ell: int, K: int, cot_factor: str = "K") -> PotentialModel:
    """Scalar potential induced by ``profile`` for quantum numbers (l, K).

    ``cot_factor="ell"`` replaces (K+1) by (l+1) in the gradient term.
    """
    _check_quantum_numbers(ell, K)
    if cot_factor not in ("K", "ell"):
        raise ValueError("cot_factor must be 'K' or 'ell'")
    weight = (K + 1) if cot_factor == "K" else (ell + 1)

    def function(chi):
        fp = profile.f_prime(chi)
        return centrifugal(ell, chi) + fp * fp + profile.f_double_prime(chi) + 2.0 * fp * weight * _cot(chi)

    params = dict(profile.params, cot_factor=cot_factor)
    return PotentialModel("induced", profile.family, ell, K, function, params, domain=profile.domain)


def rescaled_curvature(profile: DeformationProfile, chi):
    """2 f' cot chi - f'^2 + f'' + 1."""
    chi = np.asarray(chi, dtype=float)
    fp = profile.f_prime(chi)
    value = 2.0 * fp * _cot(chi) - fp * fp + profile.f_double_prime(chi) + 1.0
    return value if np.ndim(value) else float(value)


def curvature_form(profile: DeformationProfile, ell: int, K: int, chi):
    """The alternative curvature expression l(l+1)/sin^2 + Scal* + 2 f'^2.

    It differs from :func:`induced_potential` by exactly 2 K f' cot chi - 1;
    see :func:`curvature_form_mismatch`.
    """
    _check_quantum_numbers(ell, K)
    chi = np.asarray(chi, dtype=float)
    fp = profile.f_prime(chi)
    return centrifugal(ell, chi) + rescaled_curvature(profile, chi) + 2.0 * fp * fp


def curvature_form_mismatch(profile: DeformationProfile, K: int, chi):
    """Predicted gap induced - curvature_form = 2 K f' cot chi - 1."""
    chi = np.asarray(chi, dtype=float)
    return 2.0 * K * profile.f_prime(chi) * _cot(chi) - 1.0


def mic_kepler_mu_squared(beta: float, K: int) -> float:
    return 0.5 * beta * (0.5 * beta - 1.0) + beta * (K + 1)


def closed_form_potential(family: str, ell: int, K: int, *, omit_cross_term: bool = False, **params) -> PotentialModel:
    """Closed-form expression of a named solvable potential.

    Offsets follow the conventions in which the ground state is shifted to
    zero: -(l+1+alpha/2)^2 for Poschl-Teller, -(K+1)^2 for Scarf and
    MIC-Kepler. The tRM shape is a(a-1)/sin^2 + 2b cot with a = l+1,
    2b = alpha_K (K+1) and offset alpha_K^2/4.

    For MIC-Kepler the cotangent coefficient is alpha_K (K+1+beta/2); the
    cross term alpha_K beta/2 follows from squaring f'. ``omit_cross_term=True``
    drops it and keeps alpha_K (K+1).
    """
    _check_quantum_numbers(ell, K)
    centrif = ell * (ell + 1)
    if family == "trm":
        alpha_k = float(params["alpha_k"])
        two_b = alpha_k * (K + 1)
        return PotentialModel(
            "closed_form", family, ell, K,
            lambda chi: centrif / np.sin(chi) ** 2 + two_b * _cot(chi),
            {"alpha_k": alpha_k, "a": ell + 1.0, "b": 0.5 * two_b},
            additive_offset=0.25 * alpha_k**2,
        )
    if family == "poschl_teller":
        alpha = float(params["alpha"])
        half = 0.5 * alpha
        return PotentialModel(
            "closed_form", family, ell, K,
            lambda chi: centrif / np.sin(chi) ** 2 + half * (half - 1.0) / np.cos(chi) ** 2,
            {"alpha": alpha},
            additive_offset=-((ell + 1 + half) ** 2),
            domain=HALF_DOMAIN,
        )
    if family == "scarf":
        alpha = float(params["alpha"])
        return PotentialModel(
            "closed_form", family, ell, K,
            lambda chi: (centrif + 0.25 * alpha**2) / np.sin(chi) ** 2
            + 0.5 * alpha * (2 * ell + 1) * _cot(chi) / np.sin(chi),
            {"alpha": alpha},
            additive_offset=-float((K + 1) ** 2),
        )
    if family == "mic_kepler":
        beta = float(params["beta"])
        alpha_k = float(params["alpha_k"])
        mu2 = mic_kepler_mu_squared(beta, K)
        if mu2 < 0 or not float(2.0 * math.sqrt(mu2)).is_integer():
            warnings.warn(
                f"MIC-Kepler mu^2={mu2:g} does not give an integer or half-integer mu",
                stacklevel=2,
            )
        cot_coeff = alpha_k * (K + 1) if omit_cross_term else alpha_k * (K + 1 + 0.5 * beta)
        return PotentialModel(
            "closed_form", family, ell, K,
            lambda chi: (centrif + mu2) / np.sin(chi) ** 2 + cot_coeff * _cot(chi),
            {"beta": beta, "alpha_k": alpha_k, "mu_squared": mu2, "omit_cross_term": omit_cross_term},
            additive_offset=-0.25 * beta**2 + 0.25 * alpha_k**2 - beta * (K + 1) - (K + 1) ** 2,
        )
    if family == "qes":
        alpha_k = float(params["alpha_k"])
        return PotentialModel(
            "closed_form", family, ell, K,
            lambda chi: centrif / np.sin(chi) ** 2
            + 2.0 * alpha_k * (K + 1) * np.asarray(chi) * _cot(chi)
            + alpha_k**2 * np.asarray(chi) ** 2
            + alpha_k,
            {"alpha_k": alpha_k},
        )
    raise ValueError(f"unknown closed-form family {family!r}; expected one of {CLOSED_FORM_FAMILIES}")


def profile_for_closed_form(family: str, **params) -> DeformationProfile:
    if family not in PROFILE_FOR_CLOSED_FORM:
        raise ValueError(f"unknown closed-form family {family!r}")
    return DeformationProfile.from_family(PROFILE_FOR_CLOSED_FORM[family], **params)


def master_formula_shift(family: str, ell: int, K: int) -> float:
    """Constant c with induced(chi) = closed_form(chi) + c (offsets included)."""
    return {
        "trm": 0.0,
        "poschl_teller": float((ell + 1) ** 2),
        "scarf": float((K + 1) ** 2),
        "mic_kepler": float((K + 1) ** 2),
        "qes": 0.0,
    }[family]


def master_formula_deviation(
    family: str, ell: int, K: int, chi=None, *, omit_cross_term: bool = False, **params
) -> float:
    """Max pointwise relative gap between the induced and closed forms.

    The gap at each point is scaled by max(1, |V|) so that values near the
    centrifugal poles are compared at working precision.
    """
    closed = closed_form_potential(family, ell, K, omit_cross_term=omit_cross_term, **params)
    profile = profile_for_closed_form(family, **params)
    induced = induced_potential(profile, ell, K, cot_factor=CLOSED_FORM_COT_FACTOR[family])
    if chi is None:
        chi = profile.interior_grid(500)
    v_induced = induced.evaluate(chi)
    v_closed = closed.evaluate(chi) + master_formula_shift(family, ell, K)
    scale = np.maximum(1.0, np.abs(v_induced))
    return float(np.max(np.abs(v_induced - v_closed) / scale))


def gamma_north(chi, alpha_s_nc: float, lambda_n: float = 0.0):
    """Potential of the anti-quark charge: (a/pi)(pi - chi) cot chi + lambda_N."""
    chi = np.asarray(chi, dtype=float)
    return alpha_s_nc / math.pi * (math.pi - chi) * _cot(chi) + lambda_n


def gamma_south(chi, alpha_s_nc: float, lambda_s: float = 0.0):
    """Potential of the quark charge: -(a/pi) chi cot chi + lambda_S."""
    chi = np.asarray(chi, dtype=float)
    return -alpha_s_nc / math.pi * chi * _cot(chi) + lambda_s


def dipole_potential(
    alpha_s_nc: float, lambda_n: float = 0.0, lambda_s: float = 0.0, ell: int = 0, swap_charges: bool = False
) -> PotentialModel:
    """Color-electric charge dipole on S3 plus the centrifugal term.

    V_F = l(l+1)/sin^2 chi - alpha_s N_c cot chi + lambda with
    lambda = lambda_S - lambda_N. ``swap_charges`` interchanges the two
    sources, which flips the sign of both the cotangent term and lambda.
    """
    if alpha_s_nc < 0:
        raise ValueError("alpha_s N_c must be non-negative; use swap_charges to reverse the sign")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    sign = -1.0 if swap_charges else 1.0
    lam = sign * (lambda_s - lambda_n)

    def gn(chi):
        return gamma_north(chi, alpha_s_nc, lambda_n)

    def gs(chi):
        return gamma_south(chi, alpha_s_nc, lambda_s)

    def ced(chi):
        return sign * (gs(chi) - gn(chi))

    return PotentialModel(
        "dipole", "dipole", ell, ell,
        lambda chi: centrifugal(ell, chi) - sign * alpha_s_nc * _cot(chi),
        {"alpha_s_nc": alpha_s_nc, "lambda_n": lambda_n, "lambda_s": lambda_s, "lambda": lam},
        additive_offset=lam,
        components={"gamma_n": gn, "gamma_s": gs, "v_ced": ced},
    )


def dipole_as_induced(alpha_s_nc: float, ell: int, K: int) -> tuple[PotentialModel, PotentialModel]:
    """Dipole potential and the linear-profile potential it coincides with.

    Uses alpha_K (K+1) = -alpha_s N_c and lambda = alpha_K^2 / 4.
    """
    _check_quantum_numbers(ell, K)
    alpha_k = -alpha_s_nc / (K + 1)
    dipole = dipole_potential(alpha_s_nc, lambda_n=0.0, lambda_s=0.25 * alpha_k**2, ell=ell)
    induced = induced_potential(DeformationProfile.linear(alpha_k), ell, K)
    return dipole, induced


@dataclass(frozen=True)
class GroundState:
    """U_KK(chi) = e^{f(chi)} sin^{K+1}(chi) with its L2 norm on the domain."""

    K: int
    profile: DeformationProfile
    norm: float

    def __call__(self, chi):
        chi = np.asarray(chi, dtype=float)
        return np.exp(self.profile.f(chi)) * np.sin(chi) ** (self.K + 1)

    def log_derivative(self, chi):
        return self.profile.f_prime(chi) + (self.K + 1) * _cot(chi)

    def second_derivative(self, chi):
        """U'' = U [(f' + (K+1) cot)^2 + f'' - (K+1) csc^2], analytically."""
        chi = np.asarray(chi, dtype=float)
        g = self.log_derivative(chi)
        return self(chi) * (g * g + self.profile.f_double_prime(chi) - (self.K + 1) / np.sin(chi) ** 2)

    def normalized(self, chi):
        return self(chi) / self.norm


def ground_state(profile: DeformationProfile, K: int, n_quad: int = 20001) -> GroundState:
    """Analytic ground state of the induced potential with l = K."""
    if int(K) != K or K < 0:
        raise ValueError("K must be a non-negative integer")
    a, b = profile.domain
    xs = np.linspace(a, b, n_quad)
    values = np.zeros_like(xs)
    interior = slice(1, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        values[interior] = np.exp(profile.f(xs[interior])) * np.sin(xs[interior]) ** (K + 1)
    peak = np.max(np.abs(values[interior]))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        edges = np.exp(profile.f(np.array([a, b]) + [1e-9, -1e-9])) * np.sin(np.array([a, b]) + [1e-9, -1e-9]) ** (K + 1)
    if not np.all(np.abs(edges) < 1e-3 * peak):
        raise ValueError(f"ground state of {profile.family!r} with K={K} does not vanish at the endpoints")
    norm_sq = simpson(values**2, x=xs)
    if not np.isfinite(norm_sq) or norm_sq <= 0:
        raise ValueError(f"ground state of {profile.family!r} with K={K} is not normalizable")
    return GroundState(int(K), profile, math.sqrt(norm_sq))


def ground_state_residual(profile: DeformationProfile, K: int, grid=None, margin: float = DEFAULT_MARGIN) -> float:
    """max |-U'' + V U - (K+1)^2 U| / max |U| for the l = K induced potential."""
    state = ground_state(profile, K, n_quad=2001)
    if grid is None:
        grid = profile.interior_grid(1000, margin)
    grid = np.asarray(grid, dtype=float)
    u = state(grid)
    v = induced_potential(profile, K, K).evaluate(grid)
    residual = -state.second_derivative(grid) + v * u - (K + 1) ** 2 * u
    return float(np.max(np.abs(residual)) / np.max(np.abs(u)))
