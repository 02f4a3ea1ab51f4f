import math

import numpy as np
import pytest

from s3conformal.deformation import (
    DeformationProfile,
    centrifugal_potential,
    closed_form_potential,
    dipole_potential,
    ground_state,
    induced_potential,
)
from s3conformal.eigensolver import (
    SpectralProblem,
    convergence_study,
    degeneracy_report,
    discretize,
    grid_spacing,
    richardson_extrapolate,
    solve,
)

FREE = centrifugal_potential(0)


def trm_levels(alpha_s_nc, count):
    k1 = np.arange(1, count + 1, dtype=float)
    return k1**2 - alpha_s_nc**2 / 4 / k1**2


def test_fd_matrix_structure():
    problem = SpectralProblem(dipole_potential(1.0), 100)
    op = discretize(problem)
    h = math.pi / 101
    np.testing.assert_allclose(op.nodes, h * np.arange(1, 101), rtol=1e-14)
    np.testing.assert_allclose(op.diagonal, 2 / h**2 - 1.0 / np.tan(op.nodes), rtol=1e-14)
    np.testing.assert_allclose(op.off_diagonal, -1 / h**2)
    dense = op.dense()
    assert np.array_equal(dense, dense.T)


def test_sine_matrix_is_symmetric_and_kinetic_diagonal():
    op = discretize(SpectralProblem(FREE, 16, "sine"))
    np.testing.assert_allclose(op.matrix, np.diag(np.arange(1, 17) ** 2.0), atol=1e-12)
    op = discretize(SpectralProblem(dipole_potential(2.0, ell=1), 16, "sine"))
    assert np.allclose(op.matrix, op.matrix.T, atol=0)


def test_nonfinite_potential_rejected():
    with pytest.raises(ValueError, match="not finite"):
        discretize(SpectralProblem(lambda chi: 1.0 / (chi - chi[10]), 100))


def test_problem_validation():
    with pytest.raises(ValueError):
        SpectralProblem(FREE, 32)
    with pytest.raises(ValueError):
        SpectralProblem(FREE, 100, "chebyshev")
    with pytest.raises(ValueError):
        solve(SpectralProblem(FREE, 100), 26)


def test_free_box_levels():
    values = solve(SpectralProblem(FREE, 2000), 6).eigenvalues
    k = np.arange(1, 7)
    assert np.max(np.abs(values - k**2) / k**2) < 1e-4


def test_centrifugal_ell_one_extrapolates_to_four():
    grids = (1000, 2000, 4000)
    problem = SpectralProblem(centrifugal_potential(1), 1000)
    values = [solve(problem.with_grid(n), 1).eigenvalues[0] for n in grids]
    h = [grid_spacing(problem.with_grid(n)) for n in grids]
    assert richardson_extrapolate(h, values) == pytest.approx(4.0, rel=1e-6)


def test_richardson_removes_known_powers():
    h = np.array([0.1, 0.05, 0.025])
    values = 3.0 + 2.0 * h**2 - 7.0 * h**4
    assert richardson_extrapolate(h, values, (2, 4)) == pytest.approx(3.0, abs=1e-13)


@pytest.mark.parametrize("discretization,n", [("fd", 2000), ("sine", 64)])
def test_trm_spectrum(discretization, n):
    a = 2.0
    values = solve(SpectralProblem(dipole_potential(a), n, discretization), 5).eigenvalues
    want = trm_levels(a, 5)
    assert np.max(np.abs(values - want) / np.maximum(np.abs(want), 1.0)) < 1e-3


@pytest.mark.parametrize("K", [0, 1, 2])
def test_poschl_teller_ground_state_energy_is_zero(K):
    model = closed_form_potential("poschl_teller", K, K, alpha=3.0)
    assert model.domain == (0.0, math.pi / 2)
    assert abs(solve(SpectralProblem(model, 2000), 1).eigenvalues[0]) < 1e-4


@pytest.mark.parametrize("K", [1, 2, 3])
def test_scarf_ground_state_energy_is_zero(K):
    model = closed_form_potential("scarf", K, K, alpha=0.6)
    assert abs(solve(SpectralProblem(model, 2000), 1).eigenvalues[0]) < 1e-4


def test_degeneracy_examples():
    rows = degeneracy_report(2, 2000)
    assert [(r.ell, r.level_index) for r in rows] == [(0, 2), (1, 1), (2, 0)]
    assert all(r.relative_error < 1e-4 for r in rows)
    (only,) = degeneracy_report(0, 2000)
    assert only.eigenvalue == pytest.approx(1.0, rel=1e-5)


def test_degeneracy_spread_at_high_resolution():
    values = np.array([r.eigenvalue for r in degeneracy_report(4, 4000)])
    assert (values.max() - values.min()) / 25.0 < 1e-4


def test_convergence_order_free():
    study = convergence_study(SpectralProblem(FREE), 3, (500, 1000, 2000))
    assert not study.exact
    assert study.orders == pytest.approx([2, 2, 2], abs=0.3)
    np.testing.assert_allclose(study.extrapolated, [1, 4, 9], rtol=1e-8)


def test_convergence_sine_basis_exact_for_zero_potential():
    study = convergence_study(SpectralProblem(FREE, 16, "sine"), 3, (16, 32, 64))
    assert study.exact
    assert study.convergence_order == math.inf
    np.testing.assert_allclose(study.eigenvalues, np.tile([1.0, 4.0, 9.0], (3, 1)), atol=1e-12)


def test_convergence_order_trm():
    study = convergence_study(SpectralProblem(dipole_potential(2.0)), 2, (500, 1000, 2000))
    assert study.orders == pytest.approx([2, 2], abs=0.3)


def test_convergence_study_requires_doubling():
    with pytest.raises(ValueError):
        convergence_study(SpectralProblem(FREE), 1, (500, 800, 2000))


def test_rayleigh_ritz_monotone_in_basis_size():
    model = closed_form_potential("qes", 1, 2, alpha_k=0.5)
    previous = None
    for n in (32, 64, 128):
        values = solve(SpectralProblem(model, n, "sine"), 5).eigenvalues
        if previous is not None:
            assert np.all(values <= previous)
        previous = values


@pytest.mark.parametrize("discretization", ["fd", "sine"])
def test_orthonormality_and_oscillation(discretization):
    spectrum = solve(SpectralProblem(dipole_potential(2.0, ell=1), 400, discretization), 8)
    assert np.all(np.diff(spectrum.eigenvalues) > 0)
    assert spectrum.orthonormality_residual() < 1e-8
    assert [spectrum.sign_changes(k) for k in range(8)] == list(range(8))


def test_solve_is_deterministic():
    problem = SpectralProblem(closed_form_potential("scarf", 1, 1, alpha=0.6), 1000)
    first, second = solve(problem, 5), solve(problem, 5)
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)


@pytest.mark.parametrize(
    "profile",
    [
        DeformationProfile.linear(0.8),
        DeformationProfile.log_cos(3.0),
        DeformationProfile.log_csc_cot(0.6),
        DeformationProfile.mic_kepler(1.0, 0.4),
        DeformationProfile.quadratic(0.5),
    ],
    ids=lambda p: p.family,
)
def test_lowest_state_overlaps_analytic_ground_state(profile):
    K = 2
    spectrum = solve(SpectralProblem(induced_potential(profile, K, K), 4000), 1)
    assert spectrum.eigenvalues[0] == pytest.approx((K + 1) ** 2, rel=1e-4)
    assert spectrum.overlap(ground_state(profile, K)) > 1 - 1e-6


@pytest.mark.parametrize(
    "model",
    [centrifugal_potential(1), dipole_potential(2.0), closed_form_potential("qes", 0, 0, alpha_k=0.5)],
    ids=["free", "dipole", "qes"],
)
def test_first_order_perturbation(model):
    delta = 1e-5

    def weight(chi):
        return np.cos(chi) + 0.5 * np.sin(chi) ** 2

    base = solve(SpectralProblem(model, 2000), 3)
    plus = solve(SpectralProblem(lambda chi: model(chi) + delta * weight(chi), 2000), 3).eigenvalues
    minus = solve(SpectralProblem(lambda chi: model(chi) - delta * weight(chi), 2000), 3).eigenvalues
    for k in range(3):
        predicted = base.expectation(weight, k)
        measured = (plus[k] - minus[k]) / (2 * delta)
        assert measured == pytest.approx(predicted, rel=1e-3)
