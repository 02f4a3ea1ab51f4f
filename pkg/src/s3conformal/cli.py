"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
Tables go to stdout unless ``--output`` or an output directory (flag or the
S3CONFORMAL_OUTPUT_DIR environment variable) is given.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import checks
from . import deconfinement as dc
from .config import ConfigError, load_config, load_profile, physical_params
from .deformation import (
    CLOSED_FORM_COT_FACTOR,
    centrifugal_potential,
    closed_form_potential,
    dipole_potential,
    induced_potential,
    profile_for_closed_form,
)
from .eigensolver import DISCRETIZATIONS, SpectralProblem, convergence_study, solve
from .export import FORMATS, atomic_write_text, render_json, render_records, resolve_output
from .spectroscopy import (
    FIT_MODES,
    MEV2_PER_GEV2,
    LevelDataset,
    PhysicalParams,
    bohr_radius,
    fit_levels,
    predicted_vs_observed,
    strong_rydberg,
    synthetic_levels,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2
POTENTIAL_FAMILIES = sorted(checks.FAMILY_ALIASES) + ["custom", "dipole", "free"]
DECONFINE_REPORTS = ("curved-flat", "collapse", "temperature", "rydberg")


class UsageError(Exception):
    """Bad combination of command-line options."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on besides input files."""

    command: str
    options: dict
    settings: dict = field(repr=False)
    output: str | None = None
    out_dir: str | None = None
    fmt: str | None = None

    def table_format(self) -> str:
        return self.fmt or self.settings["output"]["format"]


def _emit(run: RunConfig, text: str, default_name: str) -> None:
    path = resolve_output(run.output, default_name, run.out_dir)
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)
        print(f"wrote {path}", file=sys.stderr)


def _emit_records(run: RunConfig, records: list[dict], stem: str) -> None:
    fmt = run.table_format()
    _emit(run, render_records(records, fmt), f"{stem}.{fmt}")


def _family_params(args, family: str) -> dict:
    params = dict(checks.FAMILY_PARAMS[family])
    for key in params:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def _build_potential(args):
    """Returns (model, extra columns) for the potential/solve commands."""
    family = args.family
    if family == "free":
        return centrifugal_potential(args.ell), {}
    if family == "dipole":
        model = dipole_potential(args.alphas_nc, lambda_s=args.lambda_, ell=args.ell, swap_charges=args.swap_charges)
        return model, model.components
    if family == "custom":
        if not args.f_spec:
            raise UsageError("--family custom requires --f-spec FILE")
        profile = load_profile(args.f_spec)
        model = induced_potential(profile, args.ell, args.k)
        return model, {"f": profile.f, "f_prime": profile.f_prime, "f_double_prime": profile.f_double_prime}
    canonical = checks.canonical_family(family)
    params = _family_params(args, canonical)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        closed = closed_form_potential(canonical, args.ell, args.k, omit_cross_term=args.omit_cross_term, **params)
    profile = profile_for_closed_form(canonical, **params)
    induced = induced_potential(profile, args.ell, args.k, cot_factor=CLOSED_FORM_COT_FACTOR[canonical])
    return closed, {"v_induced": induced.evaluate}


def cmd_potential(run: RunConfig, args) -> int:
    model, extra = _build_potential(args)
    settings = run.settings["potential"]
    samples = args.samples or settings["samples"]
    margin = settings["margin"] if args.margin is None else args.margin
    a, b = model.domain
    chi = np.linspace(a + margin, b - margin, samples)
    columns = {"chi": chi, "v": model.evaluate(chi)}
    for name, func in extra.items():
        columns[name] = np.broadcast_to(func(chi), chi.shape)
    records = [{k: float(v[i]) for k, v in columns.items()} for i in range(samples)]
    _emit_records(run, records, f"potential_{args.family}")
    return EXIT_OK


def _reference_levels(args, count: int):
    n = np.arange(count)
    if args.family == "free":
        return (n + args.ell + 1.0) ** 2
    if args.family == "dipole":
        n1 = n + args.ell + 1.0
        sign = -1.0 if args.swap_charges else 1.0
        return n1**2 - args.alphas_nc**2 / 4 / n1**2 + sign * args.lambda_
    return [None] * count


def cmd_solve(run: RunConfig, args) -> int:
    model, _ = _build_potential(args)
    s = run.settings["solver"]
    count = args.count or s["count"]
    grid = args.grid_points or s["grid_points"]
    problem = SpectralProblem(model, grid, args.discretization or s["discretization"])
    reference = _reference_levels(args, count)
    if args.convergence:
        study = convergence_study(problem, count, args.convergence)
        records = [
            {
                "index": k,
                "eigenvalue_finest": float(study.eigenvalues[-1, k]),
                "extrapolated": float(study.extrapolated[k]),
                "order": float(study.orders[k]) if not study.exact else math.inf,
                "reference": reference[k],
            }
            for k in range(count)
        ]
        for note in study.diagnostics:
            print(f"note: {note}", file=sys.stderr)
    else:
        values = solve(problem, count).eigenvalues
        records = [{"index": k, "eigenvalue": float(values[k]), "reference": reference[k]} for k in range(count)]
    _emit_records(run, records, f"spectrum_{args.family}")
    return EXIT_OK


def cmd_verify(run: RunConfig, args) -> int:
    if args.k is not None and args.family is None:
        raise UsageError("--k requires --family")
    params = None
    if args.family is not None:
        params = _family_params(args, checks.canonical_family(args.family))
    results = checks.verify_suite(args.family, args.k, params)
    for result in results:
        print(result.line())
    failed = [r for r in results if r.passed is False]
    print(f"{len(results) - len(failed)} of {len(results)} checks passed or skipped; {len(failed)} failed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _physics(run: RunConfig, args) -> PhysicalParams:
    return physical_params(
        run.settings,
        lambda_qcd_mev=args.lambda_qcd,
        R_fm=args.radius_fm,
        alpha_s=args.alpha_s,
        n_c=args.nc,
        mu_q_mev=args.mu_q,
    )


def cmd_fit(run: RunConfig, args) -> int:
    s = run.settings["fit"]
    if args.data:
        data = LevelDataset.from_csv(args.data)
    else:
        noise = s["noise_fraction"] if args.noise is None else args.noise
        seed = s["seed"] if args.seed is None else args.seed
        data = synthetic_levels(s["A"], s["B"], s["C"], s["K_values"], noise, seed)
    fit = fit_levels(data, args.mode or s["mode"])
    p = _physics(run, args)
    report = fit.to_dict()
    report["source"] = data.source
    if fit.A > 0 and fit.B >= 0:
        report["derived"] = {
            "R_fm": p.hbar_c / math.sqrt(fit.A * MEV2_PER_GEV2),
            "alpha_s": 2 * math.sqrt(fit.B * MEV2_PER_GEV2) / (p.n_c * p.lambda_qcd_mev),
            "lambda_qcd_mev": p.lambda_qcd_mev,
        }
    table = predicted_vs_observed(data, fit)
    if args.predictions:
        atomic_write_text(args.predictions, render_records(table, "csv"))
    if run.fmt == "csv":
        _emit(run, render_records(table, "csv"), "fit_predictions.csv")
    else:
        _emit(run, render_json(report), "fit_report.json")
    return EXIT_OK


def _alpha_record(x: float, value) -> dict:
    if isinstance(value, dc.NonPerturbative):
        return {"x": x, "alpha_s": None, "status": "non-perturbative"}
    return {"x": x, "alpha_s": value, "status": "ok"}


def cmd_coupling(run: RunConfig, args) -> int:
    s = run.settings["coupling"]
    n_f = s["n_f"] if args.nf is None else args.nf
    rho = s["rho"] if args.rho is None else args.rho
    q2 = s["q2"] if args.q2 is None else args.q2
    lam = args.lambda_qcd or run.settings["physics"]["lambda_qcd_mev"]
    if args.radius_fm:
        xs = [dc.x_from_radius(r, lam) for r in args.radius_fm]
    elif args.x:
        xs = list(args.x)
    else:
        xs = list(np.linspace(s["x_min"], s["x_max"], s["samples"]))
    records = []
    for x in xs:
        params = dc.CouplingParams(float(x), q2=q2, rho=rho, n_f=n_f, lambda_qcd_mev=lam)
        value = dc.alpha_s_original(params) if args.reading == "original" else dc.alpha_s_compactified(params)
        record = _alpha_record(float(x), value)
        record["figure2"] = dc.figure2_curve(float(x))
        records.append(record)
    _emit_records(run, records, "coupling")
    return EXIT_OK


def cmd_deconfine(run: RunConfig, args) -> int:
    s = run.settings["deconfine"]
    p = _physics(run, args)
    if args.report == "temperature":
        if args.temperature:
            records = [
                {"T_mev": t, "R_fm": dc.radius_from_temperature(t, p.lambda_qcd_mev, p.n_c, p.hbar_c)}
                for t in args.temperature
            ]
        else:
            radii = args.r_sequence or [p.R_fm]
            records = [
                {"R_fm": r, "T_mev": dc.temperature_from_radius(r, p.lambda_qcd_mev, p.n_c, p.hbar_c)} for r in radii
            ]
    elif args.report == "collapse":
        fraction = args.r_max_fraction or s["r_max_fraction"]
        report = dc.coulomb_collapse_report(p.R_fm, p.alpha_s_nc, fraction, hbar_c=p.hbar_c)
        records = report.rows()
        print(
            f"max relative deviation {report.max_deviation:.6g} (series bound {report.series_bound:.6g}); "
            f"monotone: {report.monotone}",
            file=sys.stderr,
        )
    elif args.report == "rydberg":
        levels = args.levels or s["levels"]
        k = s["k_fm"] if args.k_fm is None else args.k_fm
        spec = dc.rydberg_limit_spectrum(range(levels), strong_rydberg(p), bohr_radius(p), k)
        records = [
            {"K": int(K), "bound_mev": b, "scattering_mev": sc, "energy_mev": e}
            for K, b, sc, e in zip(spec.K, spec.bound, spec.scattering, spec.energies)
        ]
    else:
        if p.alpha_s_nc == 0 and not args.r_sequence:
            raise UsageError("alpha_s = 0 has no Bohr-like radius; pass --r-sequence in fm")
        radii = args.r_sequence or [f * bohr_radius(p) for f in s["r_sequence_a0"]]
        rows = dc.curved_vs_flat_spectrum(
            radii, p, levels=args.levels or s["levels"], grid_points=args.grid_points or s["grid_points"]
        )
        records = [row.as_dict() for row in rows]
    _emit_records(run, records, f"deconfine_{args.report.replace('-', '_')}")
    return EXIT_OK


def cmd_reproduce(run: RunConfig, args) -> int:
    rows = checks.reproduction_table()
    width = max(len(r.quantity) for r in rows)
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.quantity:<{width}} | reference {r.reference:.6g} | computed {r.computed:.6g} | tol {r.tolerance:.1e} | {status}")
    if run.output or run.out_dir:
        _emit(run, render_records([r.as_dict() for r in rows], run.table_format()), f"reproduction.{run.table_format()}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_CHECK_FAILED


def _add_physics(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("physical parameters (override the config file)")
    g.add_argument("--lambda-qcd", type=float, help="Lambda_QCD in MeV")
    g.add_argument("--radius-fm", type=float, help="compactification radius R in fm")
    g.add_argument("--alpha-s", type=float, help="strong coupling alpha_s")
    g.add_argument("--nc", type=int, help="number of colors N_c")
    g.add_argument("--mu-q", type=float, help="mu_q c^2 in MeV (default Lambda/2)")


def _add_family(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--family", required=required, choices=POTENTIAL_FAMILIES)
    parser.add_argument("--ell", type=int, default=0)
    parser.add_argument("--k", type=int, default=0, help="quantum number K (l <= K)")
    parser.add_argument("--alpha-k", dest="alpha_k", type=float)
    parser.add_argument("--alpha", type=float, help="Poschl-Teller / Scarf strength")
    parser.add_argument("--beta", type=float, help="MIC-Kepler beta")
    parser.add_argument("--alphas-nc", dest="alphas_nc", type=float, default=2.0, help="dipole strength alpha_s N_c")
    parser.add_argument("--lambda", dest="lambda_", type=float, default=0.0, help="dipole constant lambda")
    parser.add_argument("--swap-charges", action="store_true")
    parser.add_argument("--f-spec", help="TOML file with a custom [profile]")
    parser.add_argument("--omit-cross-term", action="store_true", help="MIC-Kepler cotangent coefficient without the beta cross term")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file merged over the shipped defaults")
    common.add_argument("--output-dir", help="directory for output files (env: S3CONFORMAL_OUTPUT_DIR)")
    common.add_argument("-o", "--output", help="output file, or - for stdout")
    common.add_argument("--format", choices=FORMATS)

    parser = argparse.ArgumentParser(prog="s3conformal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", parents=[common], help="sample a potential on its domain")
    _add_family(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--margin", type=float)
    p.set_defaults(handler=cmd_potential)

    p = sub.add_parser("solve", parents=[common], help="numerical spectrum of a potential")
    _add_family(p)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--discretization", choices=DISCRETIZATIONS)
    p.add_argument("--count", type=int)
    p.add_argument("--convergence", type=int, nargs="+", metavar="N", help="grid sequence for a convergence study")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="run the invariant checks")
    p.add_argument("--family", choices=sorted(checks.FAMILY_ALIASES))
    p.add_argument("--k", type=int)
    p.add_argument("--alpha-k", dest="alpha_k", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("fit", parents=[common], help="fit A, B, C to level data")
    p.add_argument("--data", help="CSV with label,mass_mev,K[,sigma_mev]; synthetic data if omitted")
    p.add_argument("--mode", choices=FIT_MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise", type=float, help="relative Gaussian noise on synthetic M^2")
    p.add_argument("--predictions", help="also write predicted vs observed masses to this CSV")
    _add_physics(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("coupling", parents=[common], help="radius-dependent strong coupling")
    p.add_argument("--nf", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--q2", type=float, help="Q^2 c^2 in MeV^2")
    p.add_argument("--lambda-qcd", type=float)
    p.add_argument("--x", type=float, nargs="+")
    p.add_argument("--radius-fm", type=float, nargs="+")
    p.add_argument("--reading", choices=("compactified", "original"), default="compactified")
    p.set_defaults(handler=cmd_coupling)

    p = sub.add_parser("deconfine", parents=[common], help="large-radius reports")
    p.add_argument("--report", choices=DECONFINE_REPORTS, default="curved-flat")
    p.add_argument("--r-sequence", type=float, nargs="+", metavar="R_FM")
    p.add_argument("--temperature", type=float, nargs="+", metavar="T_MEV")
    p.add_argument("--r-max-fraction", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--k-fm", type=float, help="wavenumber k in 1/fm for the rydberg report")
    _add_physics(p)
    p.set_defaults(handler=cmd_deconfine)

    p = sub.add_parser("reproduce-paper", parents=[common], help="table of reproduced reference numbers")
    p.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_config(args.config)
        options = {k: v for k, v in vars(args).items() if k not in ("handler",)}
        run = RunConfig(args.command, options, settings, args.output, args.output_dir, args.format)
        return args.handler(run, args)
    except (ConfigError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
