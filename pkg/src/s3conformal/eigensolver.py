"""Dirichlet eigensolver for -u'' + V(chi) u = E u on a bounded interval.

Two discretizations are available: second-order finite differences on a
uniform interior grid (a symmetric tridiagonal matrix) and a Rayleigh-Ritz
sine basis (a dense symmetric matrix whose potential block is integrated by
Gauss-Legendre quadrature). Dirichlet nodes never touch the endpoints, so
centrifugal 1/sin^2 terms stay finite in every matrix entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import linalg
from scipy.optimize import brentq

from .deformation import FULL_DOMAIN, centrifugal_potential

DISCRETIZATIONS = ("fd", "sine")
DEFAULT_GRID_POINTS = 2000
MIN_GRID_POINTS = 64
MIN_BASIS_SIZE = 8


class ConvergenceError(RuntimeError):
    """The eigenvalue iteration did not converge."""


@dataclass(frozen=True)
class SpectralProblem:
    potential: Callable
    grid_points: int = DEFAULT_GRID_POINTS
    discretization: str = "fd"
    domain: tuple[float, float] | None = None
    domain_margin: float = 0.0
    quadrature_points: int | None = None

    def __post_init__(self):
        if self.discretization not in DISCRETIZATIONS:
            raise ValueError(f"discretization must be one of {DISCRETIZATIONS}, got {self.discretization!r}")
        minimum = MIN_GRID_POINTS if self.discretization == "fd" else MIN_BASIS_SIZE
        if self.grid_points < minimum:
            raise ValueError(f"grid_points must be at least {minimum} for {self.discretization!r}")

    @property
    def interval(self) -> tuple[float, float]:
        a, b = self.domain or getattr(self.potential, "domain", FULL_DOMAIN)
        return a + self.domain_margin, b - self.domain_margin

    def with_grid(self, grid_points: int) -> "SpectralProblem":
        return SpectralProblem(
            self.potential, grid_points, self.discretization, self.domain, self.domain_margin, self.quadrature_points
        )


@dataclass(frozen=True)
class DiscreteOperator:
    """Matrix of the discretized operator.

    Finite differences store the tridiagonal bands; the sine basis stores the
    dense matrix together with the quadrature used for the potential block.
    """

    discretization: str
    interval: tuple[float, float]
    nodes: np.ndarray
    diagonal: np.ndarray | None = None
    off_diagonal: np.ndarray | None = None
    matrix: np.ndarray | None = None

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        n = self.diagonal.size
        out = np.diag(self.diagonal)
        idx = np.arange(n - 1)
        out[idx, idx + 1] = self.off_diagonal
        out[idx + 1, idx] = self.off_diagonal
        return out


def _evaluate_potential(potential, nodes) -> np.ndarray:
    with np.errstate(all="ignore"):
        values = np.asarray(potential(nodes), dtype=float)
    values = np.broadcast_to(values, nodes.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"potential is not finite at interior node {i} (chi={nodes[i]:.12g})")
    return np.array(values)


def _sine_basis(k: np.ndarray, x: np.ndarray, a: float, length: float) -> np.ndarray:
    return math.sqrt(2.0 / length) * np.sin(np.outer(k, x - a) * (math.pi / length))


def discretize(problem: SpectralProblem) -> DiscreteOperator:
    a, b = problem.interval
    length = b - a
    n = problem.grid_points
    if problem.discretization == "fd":
        h = length / (n + 1)
        nodes = a + h * np.arange(1, n + 1)
        v = _evaluate_potential(problem.potential, nodes)
        return DiscreteOperator("fd", (a, b), nodes, 2.0 / h**2 + v, np.full(n - 1, -1.0 / h**2))

    n_quad = problem.quadrature_points or max(2048, 4 * n)
    xq, wq = np.polynomial.legendre.leggauss(n_quad)
    xq = a + 0.5 * length * (xq + 1.0)
    wq = 0.5 * length * wq
    v = _evaluate_potential(problem.potential, xq)
    k = np.arange(1, n + 1)
    phi = _sine_basis(k, xq, a, length)
    matrix = (phi * (wq * v)) @ phi.T
    matrix = 0.5 * (matrix + matrix.T)
    matrix[np.diag_indices(n)] += (k * math.pi / length) ** 2
    return DiscreteOperator("sine", (a, b), xq, matrix=matrix)


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    # make the first sizeable lobe of every eigenvector positive
    out = vectors.copy()
    for row in out:
        peak = np.max(np.abs(row))
        first = np.flatnonzero(np.abs(row) > 1e-3 * peak)
        if first.size and row[first[0]] < 0:
            row *= -1.0
    return out


def _count_sign_changes(values: np.ndarray, rel_floor: float = 1e-9) -> int:
    peak = np.max(np.abs(values))
    signs = np.sign(values[np.abs(values) > rel_floor * peak])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (count, len(nodes)), L2-normalized
    nodes: np.ndarray
    weights: np.ndarray
    grid_points: int
    discretization: str
    interval: tuple[float, float]
    convergence_order: float | None = None

    def orthonormality_residual(self) -> float:
        gram = (self.eigenvectors * self.weights) @ self.eigenvectors.T
        return float(np.max(np.abs(gram - np.eye(len(self.eigenvalues)))))

    def sign_changes(self, k: int) -> int:
        return _count_sign_changes(self.eigenvectors[k])

    def expectation(self, func: Callable, k: int) -> float:
        """<psi_k| w |psi_k> under the result's quadrature weights."""
        psi = self.eigenvectors[k]
        return float(np.sum(self.weights * psi * psi * func(self.nodes)))

    def overlap(self, func: Callable, k: int = 0) -> float:
        """|<psi_k|g>| / ||g|| for a reference function g."""
        g = np.asarray(func(self.nodes), dtype=float)
        norm = math.sqrt(np.sum(self.weights * g * g))
        return float(abs(np.sum(self.weights * self.eigenvectors[k] * g)) / norm)


def solve(problem: SpectralProblem, count: int) -> SpectrumResult:
    """Lowest ``count`` eigenpairs, ascending and deterministic."""
    if count < 1:
        raise ValueError("count must be positive")
    if count > problem.grid_points // 4:
        raise ValueError(f"count={count} exceeds grid_points/4={problem.grid_points // 4}")
    op = discretize(problem)
    a, b = op.interval
    try:
        if op.discretization == "fd":
            values, vectors = linalg.eigh_tridiagonal(
                op.diagonal, op.off_diagonal, select="i", select_range=(0, count - 1), lapack_driver="stemr"
            )
            nodes = op.nodes
            weights = np.full(nodes.size, (b - a) / (nodes.size + 1))
            samples = vectors.T
        else:
            values, coeffs = linalg.eigh(op.matrix, subset_by_index=[0, count - 1])
            m = max(problem.grid_points, 1000)
            h = (b - a) / (m + 1)
            nodes = a + h * np.arange(1, m + 1)
            weights = np.full(m, h)
            basis = _sine_basis(np.arange(1, problem.grid_points + 1), nodes, a, b - a)
            samples = coeffs.T @ basis
    except linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed to converge: {exc}") from exc

    norms = np.sqrt(np.sum(weights * samples * samples, axis=1))
    samples = _fix_sign(samples / norms[:, None])
    return SpectrumResult(
        np.asarray(values), samples, nodes, weights, problem.grid_points, problem.discretization, (a, b)
    )


def eigenvalues(problem: SpectralProblem, count: int) -> np.ndarray:
    return solve(problem, count).eigenvalues


def grid_spacing(problem: SpectralProblem) -> float:
    a, b = problem.interval
    return (b - a) / (problem.grid_points + 1)


def richardson_extrapolate(h: Sequence[float], values: Sequence[float], powers: Sequence[float] = (2,)) -> float:
    """Eliminate the listed powers of h using the len(powers)+1 finest samples."""
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=float)
    m = len(powers) + 1
    if h.size < m:
        raise ValueError(f"need at least {m} samples for powers {tuple(powers)}")
    order = np.argsort(h)[:m]
    design = np.column_stack([np.ones(m)] + [h[order] ** p for p in powers])
    return float(np.linalg.solve(design, values[order])[0])


def _observed_order(h: np.ndarray, e: np.ndarray) -> float:
    """Order p with (e1-e2)/(e2-e3) = (h1^p - h2^p)/(h2^p - h3^p)."""
    d1, d2 = e[0] - e[1], e[1] - e[2]
    if d2 == 0 or d1 / d2 <= 0:
        return float("nan")
    ratio = d1 / d2

    def mismatch(p):
        return (h[0] ** p - h[1] ** p) / (h[1] ** p - h[2] ** p) - ratio

    try:
        return brentq(mismatch, 0.05, 20.0)
    except ValueError:
        return math.log(ratio) / math.log(h[0] / h[1])


@dataclass(frozen=True)
class ConvergenceStudy:
    grid_points: tuple[int, ...]
    spacings: np.ndarray
    eigenvalues: np.ndarray  # (len(grids), count)
    extrapolated: np.ndarray
    orders: np.ndarray
    exact: bool
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def convergence_order(self) -> float:
        return float(np.nanmedian(self.orders)) if not self.exact else math.inf


def convergence_study(problem: SpectralProblem, count: int, grid_sequence: Sequence[int]) -> ConvergenceStudy:
    """Observed convergence order of the lowest ``count`` eigenvalues.

    The order comes from the three finest grids; the limit is a Richardson
    extrapolation at that order, and the reported order is the log-log slope
    of |E(h) - E_limit| over the non-finest grids.
    """
    grids = tuple(int(n) for n in grid_sequence)
    if len(grids) < 3:
        raise ValueError("need at least three grid sizes")
    if any(b < 2 * a for a, b in zip(grids, grids[1:])):
        raise ValueError("each grid must be at least twice the previous one")
    results = np.array([solve(problem.with_grid(n), count).eigenvalues for n in grids])
    spacings = np.array([grid_spacing(problem.with_grid(n)) for n in grids])
    scale = np.maximum(1.0, np.abs(results).max(axis=0))
    spread = np.max(np.abs(results - results[-1]), axis=0) / scale
    diagnostics: list[str] = []
    if np.all(spread < 1e-12):
        return ConvergenceStudy(grids, spacings, results, results[-1].copy(), np.full(count, math.inf), True)

    orders = np.empty(count)
    limits = np.empty(count)
    for j in range(count):
        column = results[:, j]
        p = _observed_order(spacings[-3:], column[-3:])
        if not np.isfinite(p):
            diagnostics.append(f"level {j}: non-monotone error sequence {column.tolist()}")
            p = 2.0
        limit = column[-1] + (column[-1] - column[-2]) / ((spacings[-2] / spacings[-1]) ** p - 1.0)
        errors = np.abs(column[:-1] - limit)
        if np.any(errors == 0):
            orders[j] = p
        else:
            orders[j] = np.polyfit(np.log(spacings[:-1]), np.log(errors), 1)[0]
        limits[j] = limit
        diffs = np.diff(column)
        if np.any(np.sign(diffs) != np.sign(diffs[0])):
            diagnostics.append(f"level {j}: eigenvalue sequence is not monotone in N")
    return ConvergenceStudy(grids, spacings, results, limits, orders, False, tuple(diagnostics))


@dataclass(frozen=True)
class DegeneracyRow:
    ell: int
    level_index: int
    eigenvalue: float
    target: float

    @property
    def relative_error(self) -> float:
        return abs(self.eigenvalue - self.target) / abs(self.target)


def degeneracy_report(K: int, grid_points: int = DEFAULT_GRID_POINTS, ell_max: int | None = None) -> list[DegeneracyRow]:
    """Level K of the free problem for each l <= K.

    For centrifugal term l(l+1)/sin^2 the (K-l)-th eigenvalue should equal
    (K+1)^2 for every l.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    ell_max = K if ell_max is None else min(ell_max, K)
    rows = []
    for ell in range(ell_max + 1):
        index = K - ell
        problem = SpectralProblem(centrifugal_potential(ell), grid_points)
        spectrum = solve(problem, max(index + 1, 1))
        rows.append(DegeneracyRow(ell, index, float(spectrum.eigenvalues[index]), float((K + 1) ** 2)))
    return rows
