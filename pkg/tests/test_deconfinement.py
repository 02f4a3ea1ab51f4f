import math

import numpy as np
import pytest

from s3conformal.deconfinement import (
    CouplingParams,
    NonPerturbative,
    alpha_s_compactified,
    alpha_s_original,
    beta0,
    coulomb_collapse_report,
    curvature_gap,
    curved_vs_flat_spectrum,
    figure2_curve,
    figure2_literal,
    figure2_samples,
    radius_from_temperature,
    relative_gap,
    rydberg_limit_spectrum,
    small_angle_limits,
    temperature_from_radius,
    x_from_radius,
)
from s3conformal.spectroscopy import PhysicalParams, bohr_radius, energy_rydberg_form, strong_rydberg


def test_beta0():
    assert beta0(3) == 9.0
    assert beta0(6) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        CouplingParams(1.0, n_f=17)


def test_reduces_to_original_when_rho_zero():
    p = CouplingParams(x=0.3, q2=5e5, rho=0.0)
    assert alpha_s_compactified(p) == pytest.approx(alpha_s_original(p), rel=1e-15)
    expected = 4 * math.pi / (9 * math.log(5e5 / 200.0**2 + 0.3))
    assert alpha_s_original(p) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_ultraviolet_limit(x):
    values = [alpha_s_compactified(CouplingParams(x, q2=q2, rho=0.5)) for q2 in (1e6, 1e10, 1e20, 1e100)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 0.01


def test_infrared_large_radius_limit():
    values = [alpha_s_compactified(CouplingParams(x, rho=0.5)) for x in (1e-2, 1e-5, 1e-10, 1e-50)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 0.02


def test_nonperturbative_marker():
    out = alpha_s_original(CouplingParams(x=0.5))
    assert isinstance(out, NonPerturbative)
    assert out.log_argument == 0.5 and not out
    assert isinstance(alpha_s_original(CouplingParams(x=1.0)), NonPerturbative)


def test_figure2_value_at_one():
    assert figure2_curve(1.0) == pytest.approx(1.4 / math.log(2), abs=1e-12)
    # 2.0197 is quoted truncated to four decimals; the value is 2.019773...
    assert figure2_curve(1.0) == pytest.approx(2.0197, abs=1e-4)


def test_figure2_samples_match_expression():
    x, y = figure2_samples()
    assert x.size == 150 and x[0] == 1e-6 and x[-1] == 10.0
    np.testing.assert_allclose(y, 1.4 / np.log(x + 1 / x), rtol=1e-12, atol=0)


def test_figure2_single_maximum_at_one():
    x = np.linspace(1e-3, 10, 10000)
    step = x[1] - x[0]
    assert abs(x[np.argmax(figure2_curve(x))] - 1.0) <= step


def test_figure2_literal_reading_differs():
    literal = figure2_literal(1.0)
    assert literal == pytest.approx(4 * math.pi / (9 * math.log(math.sqrt(2))), rel=1e-14)
    assert abs(literal - figure2_curve(1.0)) > 1.0
    assert len(figure2_literal(np.array([0.5, 1.0]))) == 2


def test_x_from_radius():
    assert x_from_radius(197.3269804 / 200.0, 200.0) == pytest.approx(1.0, rel=1e-15)
    p = CouplingParams.from_radius(2.0)
    assert p.x == pytest.approx((197.3269804 / 400.0) ** 2)


def test_temperature_examples():
    assert temperature_from_radius(0.58, 200.0, 3) == pytest.approx(39.19, abs=0.01)
    assert radius_from_temperature(160.0, 200.0, 3) == pytest.approx(2.37, abs=0.01)
    assert round(radius_from_temperature(160.0, 200.0, 3)) == 2
    assert 100 <= radius_from_temperature(7000.0, 200.0, 3) <= 110


def test_temperature_is_linear_and_invertible():
    T = temperature_from_radius(1.3, 250.0, 3)
    assert temperature_from_radius(2.6, 250.0, 3) == 2 * T
    assert radius_from_temperature(T, 250.0, 3) == pytest.approx(1.3, rel=1e-15)


def test_collapse_report_bound_and_monotone():
    report = coulomb_collapse_report(2.0, 3.0, 0.1)
    assert report.max_deviation < 0.0034
    assert report.max_deviation == pytest.approx(0.1**2 / 3, rel=1e-3)
    assert report.monotone
    assert report.deviation[0] < 1e-7


def test_collapse_deviation_against_direct_ratio():
    report = coulomb_collapse_report(1.5, 2.0, 0.4, points=50)
    direct = np.abs(report.v_curved - report.v_flat) / np.abs(report.v_flat)
    np.testing.assert_allclose(report.deviation, direct, rtol=1e-9)


def test_collapse_monotone_to_half_radius():
    assert coulomb_collapse_report(1.0, 1.0, 0.5).monotone


def test_collapse_validation():
    with pytest.raises(ValueError):
        coulomb_collapse_report(1.0, 1.0, 1.0)


def test_small_angle_limits():
    out = small_angle_limits(1e-3, 3.0)
    assert out["gamma_n"] == pytest.approx(out["gamma_n_limit"], rel=1e-5)
    assert out["gamma_s"] == pytest.approx(out["gamma_s_limit"], rel=1e-5)


def test_rydberg_limit_examples():
    spec = rydberg_limit_spectrum(range(5), 450.0, 0.66, 0.0)
    np.testing.assert_allclose(spec.energies, -450.0 / np.arange(1, 6) ** 2)
    assert spec.ionization_energy == 450.0
    assert np.all(np.diff(spec.bound) > 0)
    far = rydberg_limit_spectrum([10**6], 450.0, 0.66, 0.0)
    assert -1e-9 < far.energies[0] < 0


def test_rydberg_limit_matches_curved_formula():
    p0 = PhysicalParams(1.0, 200.0, 0.4)
    k = 0.8
    for K in (3, 30, 300):
        R = (K + 1) / k
        p = PhysicalParams(R, 200.0, 0.4)
        limit = rydberg_limit_spectrum([K], strong_rydberg(p0), bohr_radius(p0), k).energies[0]
        assert energy_rydberg_form(K, p) == pytest.approx(limit, rel=1e-12)


def test_relative_gap_example():
    assert relative_gap(0, 100.0) == pytest.approx(1e-4)


def test_curved_vs_flat_gap_shrinks_and_matches():
    p = PhysicalParams(1.0, 200.0, 0.5)
    a0 = bohr_radius(p)
    rows = curved_vs_flat_spectrum([2 * a0, 4 * a0, 8 * a0], p, levels=3)
    assert max(r.gap_discrepancy for r in rows) < 2e-5
    ground = [r for r in rows if r.K == 0]
    assert all(b.gap_solver_mev < a.gap_solver_mev for a, b in zip(ground, ground[1:]))
    for r in rows:
        assert r.gap_formula_mev == pytest.approx(strong_rydberg(p) * relative_gap(r.K, r.R_fm / a0), rel=1e-12)


def test_curved_vs_flat_without_coupling():
    p = PhysicalParams(1.0, 200.0, 0.0)
    rows = curved_vs_flat_spectrum([1.0, 2.0], p, levels=2)
    for r in rows:
        assert r.coulomb_mev == 0.0
        assert r.solver_mev == pytest.approx(float(curvature_gap(r.K, PhysicalParams(r.R_fm, 200.0, 0.0))), rel=1e-5)


def test_curved_vs_flat_requires_increasing_radii():
    with pytest.raises(ValueError):
        curved_vs_flat_spectrum([2.0, 1.0], PhysicalParams(1.0, 200.0, 0.5))
