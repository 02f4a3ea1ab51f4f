"""Configuration: shipped defaults, user TOML overrides and custom profiles."""

from __future__ import annotations

import ast
import copy
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .deformation import FULL_DOMAIN, HALF_DOMAIN, DeformationProfile
from .spectroscopy import PhysicalParams


class ConfigError(ValueError):
    """A configuration file or value is malformed."""


def _read_toml_text(text: str, source: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: invalid TOML: {exc}") from exc


def load_defaults() -> dict:
    text = resources.files("s3conformal").joinpath("defaults.toml").read_text()
    return _read_toml_text(text, "defaults.toml")


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown configuration key {where}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"configuration key {where}{key!r} must be a table")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


_OPTIONAL_KEYS = {"physics": {"mu_q_mev"}}


def load_config(path=None) -> dict:
    """Defaults merged with an optional user TOML file."""
    config = load_defaults()
    if path is None:
        return config
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    user = _read_toml_text(text, str(path))
    for section, keys in _OPTIONAL_KEYS.items():
        for key in keys:
            if key in user.get(section, {}):
                config[section].setdefault(key, None)
    return _merge(config, user, "")


def physical_params(config: dict, **overrides) -> PhysicalParams:
    """PhysicalParams from the [physics] table, with non-None overrides applied."""
    section = dict(config["physics"])
    section.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PhysicalParams(
            R_fm=float(section["R_fm"]),
            lambda_qcd_mev=float(section["lambda_qcd_mev"]),
            alpha_s=float(section["alpha_s"]),
            n_c=int(section["n_c"]),
            n_f=int(section["n_f"]),
            mu_q_mev=None if section.get("mu_q_mev") is None else float(section["mu_q_mev"]),
            hbar_c=float(section["hbar_c"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid physics parameters: {exc}") from exc


# Names an expression may use, besides ``chi`` and the declared parameters.
_FUNCTIONS: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "cot": lambda x: 1.0 / np.tan(x),
    "csc": lambda x: 1.0 / np.sin(x),
    "sec": lambda x: 1.0 / np.cos(x),
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "arctan": np.arctan,
    "arcsin": np.arcsin,
    "arccos": np.arccos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "abs": np.abs,
}
_CONSTANTS = {"pi": math.pi, "e": math.e}
_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
)


def compile_expression(text: str, params: dict[str, float]) -> Callable:
    """Turn an arithmetic expression in ``chi`` into a vectorized callable.

    Only arithmetic, numeric literals, ``chi``, the given parameters and a
    fixed set of elementary functions are accepted.
    """
    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from exc
    known = set(_FUNCTIONS) | set(_CONSTANTS) | set(params) | {"chi"}
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigError(f"expression {text!r}: {type(node).__name__} is not allowed")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"expression {text!r}: only numeric literals are allowed")
        if isinstance(node, ast.Name) and node.id not in known:
            raise ConfigError(f"expression {text!r}: unknown name {node.id!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ConfigError(f"expression {text!r}: only elementary functions may be called")
            if node.keywords or len(node.args) != 1:
                raise ConfigError(f"expression {text!r}: functions take exactly one argument")
    code = compile(tree, "<profile>", "eval")
    namespace = {"__builtins__": {}, **_FUNCTIONS, **_CONSTANTS, **{k: float(v) for k, v in params.items()}}

    def evaluate(chi):
        chi = np.asarray(chi, dtype=float)
        return np.broadcast_to(eval(code, namespace, {"chi": chi}), chi.shape).astype(float)

    return evaluate


def _domain(value) -> tuple[float, float]:
    if value in (None, "full"):
        return FULL_DOMAIN
    if value == "half":
        return HALF_DOMAIN
    try:
        a, b = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"domain must be 'full', 'half' or [a, b], got {value!r}") from exc
    if not 0 <= a < b <= math.pi:
        raise ConfigError(f"domain [a, b] must satisfy 0 <= a < b <= pi, got {value!r}")
    return a, b


def _check_derivative(func, deriv, domain, label: str, tol: float = 1e-5) -> None:
    a, b = domain
    margin = 0.05 * (b - a)
    chi = np.linspace(a + margin, b - margin, 41)
    h = 1e-5
    numeric = (func(chi + h) - func(chi - h)) / (2 * h)
    given = deriv(chi)
    if not np.all(np.isfinite(given)):
        raise ConfigError(f"{label} is not finite inside the domain")
    err = np.max(np.abs(numeric - given) / np.maximum(1.0, np.abs(given)))
    if err > tol:
        raise ConfigError(f"{label} disagrees with a finite difference of its antiderivative (relative error {err:.2e})")


def profile_from_mapping(spec: dict, source: str = "profile") -> DeformationProfile:
    missing = [k for k in ("f", "f_prime", "f_double_prime") if k not in spec]
    if missing:
        raise ConfigError(f"{source}: missing keys {missing}")
    params = spec.get("params", {})
    if not isinstance(params, dict) or not all(isinstance(v, (int, float)) for v in params.values()):
        raise ConfigError(f"{source}: params must be a table of numbers")
    clash = set(params) & (set(_FUNCTIONS) | set(_CONSTANTS) | {"chi"})
    if clash:
        raise ConfigError(f"{source}: parameter names {sorted(clash)} shadow built-in names")
    domain = _domain(spec.get("domain"))
    f = compile_expression(spec["f"], params)
    fp = compile_expression(spec["f_prime"], params)
    fpp = compile_expression(spec["f_double_prime"], params)
    with np.errstate(all="ignore"):
        _check_derivative(f, fp, domain, f"{source}: f_prime")
        _check_derivative(fp, fpp, domain, f"{source}: f_double_prime")
    return DeformationProfile.custom(f, fp, fpp, domain, **params)


def load_profile(path) -> DeformationProfile:
    """Custom profile from a TOML file with a [profile] table.

    Example::

        [profile]
        f = "0.5 * a * chi"
        f_prime = "0.5 * a"
        f_double_prime = "0"
        domain = "full"

        [profile.params]
        a = 0.8
    """
    path = Path(path)
    try:
        data = _read_toml_text(path.read_text(), str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    if "profile" not in data or not isinstance(data["profile"], dict):
        raise ConfigError(f"{path}: expected a [profile] table")
    return profile_from_mapping(data["profile"], str(path))

