"""Scalar sparsity penalties and the shrinkage operators attached to them.

All value functions and single-valued shrinkers broadcast over numpy arrays;
scalar input yields a plain float.  Set-valued proxes are pointwise and return
:class:`~proxlab.core.ScalarProxSet`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScalarProxSet

__all__ = [
    "SQRT2",
    "MCParams",
    "FirmParams",
    "l0_norm",
    "mc_penalty",
    "l0_envelope",
    "prox_l0",
    "prox_l0_envelope",
    "hard",
    "firm",
    "soft",
    "firm_shrinker",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MCParams:
    """Minimax-concave penalty parameter (the magnitude where the penalty flattens)."""

    lambda2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda2", float(self.lambda2))
        if not (math.isfinite(self.lambda2) and self.lambda2 > 0):
            raise ValueError(f"lambda2 must be positive and finite, got {self.lambda2!r}")


@dataclass(frozen=True)
class FirmParams:
    """Firm-shrinkage thresholds ``0 < lambda1 < lambda2``."""

    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda1", float(self.lambda1))
        object.__setattr__(self, "lambda2", float(self.lambda2))
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ValueError("firm thresholds must be finite")
        if not 0.0 < self.lambda1 < self.lambda2:
            raise ValueError(
                f"firm thresholds must satisfy 0 < lambda1 < lambda2, got "
                f"({self.lambda1}, {self.lambda2})"
            )


def _maybe_scalar(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def l0_norm(x):
    """Number of nonzeros, evaluated elementwise (0 at 0, else 1)."""
    x = np.asarray(x, dtype=float)
    return _maybe_scalar(x, np.where(x == 0.0, 0.0, 1.0))


def mc_penalty(x, params: MCParams):
    """Minimax-concave penalty: ``|x| - x^2/(2*lambda2)`` below ``lambda2``, constant above."""
    lam2 = params.lambda2
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    return _maybe_scalar(x, np.where(a <= lam2, a - a * a / (2.0 * lam2), lam2 / 2.0))


def l0_envelope(x):
    """Tightest 1-weakly-convex minorant of the zero-counting penalty.

    Equals ``sqrt(2)|x| - x^2/2`` for ``|x| <= sqrt(2)`` and 1 beyond, i.e.
    ``sqrt(2)`` times the minimax-concave penalty at ``lambda2 = sqrt(2)``.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    return _maybe_scalar(x, np.where(a <= SQRT2, SQRT2 * a - a * a / 2.0, 1.0))


def prox_l0(x: float, gamma: float = 1.0) -> ScalarProxSet:
    """Set-valued prox of the zero-counting penalty at step ``gamma``.

    Keeps 0 below the threshold ``sqrt(2*gamma)``, keeps ``x`` above it, and
    returns both candidates exactly at the threshold.
    """
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError(f"gamma must be positive and finite, got {gamma!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    thr = math.sqrt(2.0 * gamma)
    a = abs(x)
    if a < thr:
        return ScalarProxSet.single(0.0)
    if a == thr:
        return ScalarProxSet.pair(0.0, x)
    return ScalarProxSet.single(x)


def prox_l0_envelope(x: float) -> ScalarProxSet:
    """Set-valued prox of :func:`l0_envelope` at unit step.

    The two-point jump of :func:`prox_l0` at ``|x| = sqrt(2)`` fills in to the
    whole interval between 0 and ``x``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    a = abs(x)
    if a < SQRT2:
        return ScalarProxSet.single(0.0)
    if a == SQRT2:
        return ScalarProxSet.interval(min(0.0, x), max(0.0, x))
    return ScalarProxSet.single(x)


def hard(x, threshold: float):
    """Hard shrinkage: zero out everything with magnitude up to ``threshold``.

    The boundary point maps to 0 (the set-valued prox offers both candidates
    there; this single-valued selection keeps the small branch).
    """
    threshold = float(threshold)
    if not (math.isfinite(threshold) and threshold > 0):
        raise ValueError(f"threshold must be positive and finite, got {threshold!r}")
    x = np.asarray(x, dtype=float)
    return _maybe_scalar(x, np.where(np.abs(x) <= threshold, 0.0, x))


def firm(x, params: FirmParams):
    """Firm shrinkage: dead zone below ``lambda1``, linear ramp, identity past ``lambda2``."""
    lam1, lam2 = params.lambda1, params.lambda2
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    sgn = np.where(x < 0, -1.0, 1.0)
    ramp = sgn * lam2 * (a - lam1) / (lam2 - lam1)
    out = np.where(a <= lam1, 0.0, np.where(a <= lam2, ramp, x))
    return _maybe_scalar(x, out)


def soft(x, threshold: float):
    """Soft shrinkage ``sign(x) * max(|x| - threshold, 0)``."""
    threshold = float(threshold)
    if not (math.isfinite(threshold) and threshold >= 0):
        raise ValueError(f"threshold must be nonnegative and finite, got {threshold!r}")
    x = np.asarray(x, dtype=float)
    sgn = np.where(x < 0, -1.0, 1.0)
    return _maybe_scalar(x, sgn * np.maximum(np.abs(x) - threshold, 0.0))


def firm_shrinker(params: FirmParams):
    """Componentwise firm shrinkage as a plain ``(x1, x2) -> (y1, y2)`` callable."""
    lam1, lam2 = params.lambda1, params.lambda2
    gap = lam2 - lam1

    def shrink_one(x: float) -> float:
        a = abs(x)
        if a <= lam1:
            return 0.0
        if a <= lam2:
            s = -1.0 if x < 0 else 1.0
            return s * lam2 * (a - lam1) / gap
        return x

    def shrink(p):
        x1, x2 = p
        return shrink_one(x1), shrink_one(x2)

    return shrink
