"""Reverse-ordered weighted l1 penalty in the plane: prox, envelope, relaxed prox.

The penalty pairs the *smaller* weight with the *larger* magnitude, which makes
it nonconvex; its prox is set-valued on diagonal ties.  The envelope variant is
the tightest 1-weakly-convex minorant, whose prox fills each two-point tie with
the connecting segment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Point2, ProxSet, WeightPair

__all__ = [
    "EnvelopeConstants",
    "rowl_penalty",
    "prox_rowl_2d",
    "rowl_envelope_2d",
    "prox_rowl_envelope_2d",
    "rowl_shrinker",
]


def _default_v() -> np.ndarray:
    r = 1.0 / math.sqrt(2.0)
    return np.array([[r, r], [-r, r]])


def _default_c() -> np.ndarray:
    return 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])


@dataclass(frozen=True)
class EnvelopeConstants:
    """The rank-one curvature-correction matrix of the planar envelope.

    ``c_matrix`` equals ``V @ diag(1, 0) @ V.T`` for the rotation ``V`` by 45
    degrees; the factorization is verified at construction.
    """

    c_matrix: np.ndarray = field(default_factory=_default_c)
    v_matrix: np.ndarray = field(default_factory=_default_v)

    def __post_init__(self) -> None:
        c, v = self.c_matrix, self.v_matrix
        recon = v @ np.diag([1.0, 0.0]) @ v.T
        if not np.all(np.abs(recon - c) <= 1e-15):
            raise ValueError("c_matrix does not factor as V diag(1,0) V^T")
        if not np.all(np.abs(c - c.T) <= 1e-15):
            raise ValueError("c_matrix must be symmetric")
        eig = np.sort(np.linalg.eigvalsh(c))
        if not np.all(np.abs(eig - np.array([0.0, 1.0])) <= 1e-12):
            raise ValueError("c_matrix must have eigenvalues {0, 1}")


ENVELOPE_CONSTANTS = EnvelopeConstants()


def rowl_penalty(x, w):
    """Weighted sum of sorted magnitudes, smallest weight on the largest entry.

    ``x`` may carry leading batch axes; ``w`` is a nondecreasing, nonnegative
    weight vector matching the trailing axis.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("w must be a nonempty 1-D weight vector")
    if np.any(w < 0) or np.any(np.diff(w) < 0):
        raise ValueError("weights must be nonnegative and nondecreasing")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != w.size:
        raise ValueError(f"x has {x.shape[-1]} components but w has {w.size}")
    a = np.sort(np.abs(x), axis=-1)[..., ::-1]
    out = a @ w
    if out.ndim == 0:
        return float(out)
    return out


def _signs(x: np.ndarray) -> np.ndarray:
    return np.where(x < 0, -1.0, 1.0)


def prox_rowl_2d(x, w: WeightPair) -> ProxSet:
    """Set-valued prox of the planar ordered weighted penalty at unit step.

    Off ties the answer is unique: subtract the weights matched to the
    magnitude order and clip at zero.  On a magnitude tie both matchings are
    optimal, giving a two-point set (collapsed when the candidates coincide).
    """
    p = Point2.of(x)
    a = np.abs(p.as_array())
    s = _signs(p.as_array())
    cand_keep = np.maximum(a - w.as_array(), 0.0)
    cand_swap = np.maximum(a - w.reversed_array(), 0.0)
    if a[0] > a[1]:
        return ProxSet.single(s * cand_keep)
    if a[0] < a[1]:
        return ProxSet.single(s * cand_swap)
    return ProxSet.point_pair(s * cand_keep, s * cand_swap)


def rowl_envelope_2d(x, w: WeightPair):
    """Tightest 1-weakly-convex minorant of the planar ordered weighted penalty.

    Three regimes on the sorted magnitudes ``s1 >= s2 >= 0``: the minorant
    equals the penalty once the gap ``s1 - s2`` reaches the weight spread;
    nearer the diagonal a quadratic correction in the antidiagonal direction
    is subtracted; and when ``s1 + s2`` drops below the spread the minorant
    turns into the bilinear bowl ``w1*(s1+s2) + s1*s2``, which vanishes at the
    origin.  (Dropping the third regime and extending the quadratic correction
    all the way in would dip below the convex biconjugate bound — e.g. to
    ``-spread**2/4`` at 0 — so it would no longer be the tightest minorant.)
    Broadcasts over ``(..., 2)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError("x must have 2 trailing components")
    a = np.abs(x)
    s1 = np.maximum(a[..., 0], a[..., 1])
    s2 = np.minimum(a[..., 0], a[..., 1])
    base = w.w1 * s1 + w.w2 * s2
    v = np.stack([s1 + w.w1, s2 + w.w2], axis=-1)
    c = ENVELOPE_CONSTANTS.c_matrix
    quad = 0.5 * np.einsum("...i,ij,...j->...", v, c, v)
    inner = w.w1 * (s1 + s2) + s1 * s2
    out = np.where(
        s1 >= s2 + w.spread,
        base,
        np.where(s1 + s2 >= w.spread, base - quad, inner),
    )
    if out.ndim == 0:
        return float(out)
    return out


def prox_rowl_envelope_2d(x, w: WeightPair) -> ProxSet:
    """Set-valued prox of :func:`rowl_envelope_2d` at unit step.

    Identical to :func:`prox_rowl_2d` off ties; on a tie the two candidate
    points fill in to their connecting segment.
    """
    p = Point2.of(x)
    a = np.abs(p.as_array())
    s = _signs(p.as_array())
    cand_keep = np.maximum(a - w.as_array(), 0.0)
    cand_swap = np.maximum(a - w.reversed_array(), 0.0)
    if a[0] > a[1]:
        return ProxSet.single(s * cand_keep)
    if a[0] < a[1]:
        return ProxSet.single(s * cand_swap)
    return ProxSet.segment(s * cand_keep, s * cand_swap)


def rowl_shrinker(w: WeightPair):
    """Deterministic selection of :func:`prox_rowl_2d` for iterative solvers.

    On exact magnitude ties it keeps the identity matching (weights in given
    order), everywhere else it returns the unique prox point.
    """
    w1, w2 = w.w1, w.w2

    def shrink(p):
        x1, x2 = p
        a1, a2 = abs(x1), abs(x2)
        s1 = -1.0 if x1 < 0 else 1.0
        s2 = -1.0 if x2 < 0 else 1.0
        if a1 >= a2:
            lo, hi = w1, w2
        else:
            lo, hi = w2, w1
        y1 = a1 - lo
        y2 = a2 - hi
        return (s1 * y1 if y1 > 0 else 0.0, s2 * y2 if y2 > 0 else 0.0)

    return shrink
