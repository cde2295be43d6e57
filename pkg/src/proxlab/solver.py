"""Proximal forward-backward splitting for small linear inverse problems.

The model is ``y = A x + noise`` with a 2-D unknown.  Parameter selection
follows the cocoercivity recipe for relaxed shrinkage operators: the
relaxation ``delta`` is chosen from the Gram spectrum so the operator is the
gradient of a convex potential under the data term, and the step ``mu`` is an
interpolation across its admissible interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Point2

__all__ = [
    "LinearModel",
    "SpectralBounds",
    "SolverParams",
    "PfbsResult",
    "spectral_bounds",
    "select_parameters",
    "pfbs",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DIVERGENCE_NORM = 1e12


@dataclass(frozen=True)
class LinearModel:
    """Observation model ``y = A x + noise`` with an ``(M, 2)`` design matrix."""

    a_matrix: np.ndarray
    y: np.ndarray
    x_true: Point2 | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.a_matrix, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 1:
            raise ValueError(f"a_matrix must be (M, 2) with M >= 1, got {a.shape}")
        if y.shape != (a.shape[0],):
            raise ValueError(f"y must have shape ({a.shape[0]},), got {y.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
            raise ValueError("model entries must be finite")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "y", y)

    @property
    def m_rows(self) -> int:
        return self.a_matrix.shape[0]

    def gram_terms(self) -> tuple[float, float, float, float, float]:
        """Entries of ``A^T A`` and ``A^T y`` accumulated in fixed row order."""
        g11 = g12 = g22 = c1 = c2 = 0.0
        for (a1, a2), yi in zip(self.a_matrix.tolist(), self.y.tolist()):
            g11 += a1 * a1
            g12 += a1 * a2
            g22 += a2 * a2
            c1 += a1 * yi
            c2 += a2 * yi
        return g11, g12, g22, c1, c2


@dataclass(frozen=True)
class SpectralBounds:
    """Extreme eigenvalues ``0 <= rho <= kappa`` of the Gram matrix ``A^T A``."""

    rho: float
    kappa: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and math.isfinite(self.kappa)):
            raise ValueError("spectral bounds must be finite")
        if not 0.0 <= self.rho <= self.kappa:
            raise ValueError(f"need 0 <= rho <= kappa, got ({self.rho}, {self.kappa})")


@dataclass(frozen=True)
class SolverParams:
    """Relaxation, cocoercivity index, and step size for the splitting iteration."""

    delta: float
    beta: float
    mu: float
    gamma_delta: float
    gamma_mu: float
    mu_interval: tuple[float, float]
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self) -> None:
        if abs(self.beta - self.delta / (1.0 + self.delta)) > 1e-15:
            raise ValueError("beta must equal delta / (1 + delta)")
        if not self.tol > 0 or self.max_iter < 1:
            raise ValueError("need tol > 0 and max_iter >= 1")


def spectral_bounds(a_matrix) -> SpectralBounds:
    """Closed-form extreme eigenvalues of ``A^T A`` for an ``(M, 2)`` matrix."""
    model = LinearModel(a_matrix, np.zeros(np.asarray(a_matrix).shape[0]))
    g11, g12, g22, _, _ = model.gram_terms()
    half_tr = 0.5 * (g11 + g22)
    det = g11 * g22 - g12 * g12
    disc = half_tr * half_tr - det
    root = math.sqrt(disc) if disc > 0.0 else 0.0
    rho = half_tr - root
    kappa = half_tr + root
    if rho < 0.0:  # clip tiny negative rounding of a PSD spectrum
        rho = 0.0
    return SpectralBounds(rho, kappa)


def select_parameters(
    bounds: SpectralBounds,
    gamma_delta: float = 1.01,
    gamma_mu: float = 0.5,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolverParams:
    """Pick the relaxation and step size from the Gram spectrum.

    ``delta = gamma_delta * (kappa - rho) / (2 * rho)`` exceeds the convexity
    threshold for any ``gamma_delta > 1``; the step interpolates between the
    endpoints of the admissible interval ``[(1 - beta) * rho, (1 + beta) / kappa)``
    with weight ``gamma_mu`` on the lower-end formula ``(1 - beta) / rho``.
    """
    rho, kappa = bounds.rho, bounds.kappa
    if rho <= 0.0:
        raise ValueError("rho must be positive to choose delta (Gram matrix is singular)")
    if gamma_delta <= 1.0:
        raise ValueError(f"gamma_delta must exceed 1, got {gamma_delta}")
    if not 0.0 <= gamma_mu <= 1.0:
        raise ValueError(f"gamma_mu must lie in [0, 1], got {gamma_mu}")
    delta = gamma_delta * (kappa - rho) / (2.0 * rho)
    if delta <= 0.0:
        raise ValueError("kappa equals rho: no relaxation needed, delta undefined")
    beta = delta / (1.0 + delta)
    mu = gamma_mu * (1.0 - beta) / rho + (1.0 - gamma_mu) * (1.0 + beta) / kappa
    interval = ((1.0 - beta) * rho, (1.0 + beta) / kappa)
    return SolverParams(
        delta=delta,
        beta=beta,
        mu=mu,
        gamma_delta=gamma_delta,
        gamma_mu=gamma_mu,
        mu_interval=interval,
        tol=tol,
        max_iter=max_iter,
    )


@dataclass(frozen=True)
class PfbsResult:
    """Terminal iterate of the splitting iteration plus its recorded path."""

    x_hat: Point2
    iterations: int
    converged: bool
    diverged: bool
    trace: tuple[tuple[Point2, Point2], ...] | None

    def trajectory(self) -> list[Point2]:
        """Flattened path ``x_0, x_{1/2}, x_1, ...`` ending at the terminal iterate."""
        if self.trace is None:
            raise ValueError("trace was not recorded")
        path: list[Point2] = []
        for xk, xh in self.trace:
            path.extend((xk, xh))
        path.append(self.x_hat)
        return path


def pfbs(
    model: LinearModel,
    shrink,
    mu: float,
    x0=Point2(0.0, 0.0),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    record_trace: bool = True,
) -> PfbsResult:
    """Proximal forward-backward splitting ``x <- shrink(x - mu * A^T (A x - y))``.

    Stops when the iterate displacement drops to ``tol``; flags divergence
    when the iterate norm passes 1e12.  ``shrink`` maps a coordinate pair to a
    coordinate pair.  The trace stores ``(x_k, x_{k+1/2})`` per iteration.
    """
    if not (math.isfinite(mu) and mu > 0):
        raise ValueError(f"mu must be positive and finite, got {mu!r}")
    g11, g12, g22, c1, c2 = model.gram_terms()
    x1, x2 = Point2.of(x0)
    trace: list[tuple[Point2, Point2]] | None = [] if record_trace else None
    iterations = 0
    converged = False
    diverged = False
    for _ in range(int(max_iter)):
        h1 = x1 - mu * (g11 * x1 + g12 * x2 - c1)
        h2 = x2 - mu * (g12 * x1 + g22 * x2 - c2)
        n1, n2 = shrink((h1, h2))
        if trace is not None:
            trace.append((Point2(x1, x2), Point2(h1, h2)))
        step = math.hypot(n1 - x1, n2 - x2)
        x1, x2 = float(n1), float(n2)
        iterations += 1
        if math.hypot(x1, x2) > DIVERGENCE_NORM:
            diverged = True
            break
        if step <= tol:
            converged = True
            break
    return PfbsResult(
        x_hat=Point2(x1, x2),
        iterations=iterations,
        converged=converged,
        diverged=diverged,
        trace=tuple(trace) if trace is not None else None,
    )
