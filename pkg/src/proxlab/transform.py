"""Grid-based convex-analysis machinery: conjugates, envelopes, prox oracles.

Everything here is deliberately independent of the closed forms elsewhere in
the package, so it can serve as an oracle against them: a naive grid Legendre
transform, the weakly convex envelope built from a double conjugation, an
exhaustive grid prox search with cluster detection, and a graph-inversion
routine converting a scalar shrinkage operator into its relaxed counterpart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Point2, ProxSet, ScalarProxSet

__all__ = [
    "Axis",
    "GridSpec",
    "SampledFunction",
    "legendre_conjugate_grid",
    "weakly_convex_envelope_grid",
    "brute_force_prox",
    "default_prox_box",
    "BoxTooSmallError",
    "GraphSegment",
    "MonotoneGraph1D",
    "convert_1d",
    "InclusionReport",
    "verify_inclusion",
    "check_monotone",
    "check_lipschitz",
    "jacobian_symmetry_defect",
]


class BoxTooSmallError(ValueError):
    """A brute-force prox search hit the search-box boundary."""


@dataclass(frozen=True)
class Axis:
    """A uniform 1-D grid from ``lo`` to ``hi`` with spacing ``step``."""

    lo: float
    hi: float
    step: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "step", float(self.step))
        if not all(map(math.isfinite, (self.lo, self.hi, self.step))):
            raise ValueError("axis bounds and step must be finite")
        if self.step <= 0 or self.hi <= self.lo:
            raise ValueError(f"need lo < hi and step > 0, got [{self.lo}, {self.hi}] @ {self.step}")
        ratio = (self.hi - self.lo) / self.step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(f"(hi - lo)/step must be integral, got {ratio}")

    @property
    def count(self) -> int:
        return int(round((self.hi - self.lo) / self.step)) + 1

    def points(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.count)


@dataclass(frozen=True)
class GridSpec:
    """One or two :class:`Axis` objects forming a line or box grid."""

    axes: tuple[Axis, ...]

    def __post_init__(self) -> None:
        if len(self.axes) not in (1, 2):
            raise ValueError("GridSpec supports 1 or 2 axes")
        object.__setattr__(self, "axes", tuple(self.axes))

    @classmethod
    def line(cls, lo: float, hi: float, step: float) -> "GridSpec":
        return cls((Axis(lo, hi, step),))

    @classmethod
    def square(cls, lo: float, hi: float, step: float) -> "GridSpec":
        ax = Axis(lo, hi, step)
        return cls((ax, ax))

    @classmethod
    def box(cls, ax0: Axis, ax1: Axis) -> "GridSpec":
        return cls((ax0, ax1))

    @property
    def dims(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes)

    @property
    def max_step(self) -> float:
        return max(ax.step for ax in self.axes)

    def mesh(self) -> np.ndarray:
        """Grid coordinates: shape ``(n,)`` for a line, ``(n0, n1, 2)`` for a box."""
        if self.dims == 1:
            return self.axes[0].points()
        g0, g1 = np.meshgrid(self.axes[0].points(), self.axes[1].points(), indexing="ij")
        return np.stack([g0, g1], axis=-1)


@dataclass(frozen=True)
class SampledFunction:
    """Dense samples of a function on a :class:`GridSpec` (+inf marks empty domain)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if np.any(np.isnan(v)) or np.any(np.isneginf(v)):
            raise ValueError("sampled values must be > -inf and not NaN")

    @classmethod
    def sample(cls, grid: GridSpec, fn) -> "SampledFunction":
        """Evaluate a vectorized function on the grid (1-D gets points, 2-D gets ``(..., 2)``)."""
        return cls(grid, np.asarray(fn(grid.mesh()), dtype=float))

    def value_at(self, point) -> float:
        """Multilinear interpolation at an interior point."""
        if self.grid.dims == 1:
            x = float(np.asarray(point).reshape(()))
            ax = self.grid.axes[0]
            if not ax.lo <= x <= ax.hi:
                raise ValueError(f"{x} outside grid [{ax.lo}, {ax.hi}]")
            return float(np.interp(x, ax.points(), self.values))
        p = Point2.of(point)
        out = self.values
        for k, (ax, coord) in enumerate(zip(self.grid.axes, (p.x1, p.x2))):
            if not ax.lo <= coord <= ax.hi:
                raise ValueError(f"{coord} outside grid axis {k} [{ax.lo}, {ax.hi}]")
            t = (coord - ax.lo) / ax.step
            i = min(int(t), ax.count - 2)
            frac = t - i
            out = (1.0 - frac) * out[i] + frac * out[i + 1]
        return float(out)


def _conjugate_lines(xs: np.ndarray, vals: np.ndarray, us: np.ndarray) -> np.ndarray:
    """Row-wise discrete Legendre transform: ``out[b, j] = max_i xs[i]*us[j] - vals[b, i]``."""
    b, n = vals.shape
    out = np.empty((b, us.size))
    chunk = max(1, int(4_000_000 // max(b * n, 1)))
    for j0 in range(0, us.size, chunk):
        uj = us[j0:j0 + chunk]
        scores = xs[None, None, :] * uj[None, :, None] - vals[:, None, :]
        out[:, j0:j0 + chunk] = np.max(scores, axis=2)
    return out


def legendre_conjugate_grid(f: SampledFunction, dual: GridSpec) -> SampledFunction:
    """Discrete convex conjugate: exact maximum of ``<x, u> - f(x)`` over the sample grid.

    The 2-D transform factorizes into two 1-D passes, which reproduces the
    joint maximum exactly.  Values near the dual boundary reflect the
    truncated primal domain; trust the inner portion of the dual grid.
    """
    if f.grid.dims != dual.dims:
        raise ValueError("primal and dual grids must have the same dimension")
    if not np.any(np.isfinite(f.values)):
        raise ValueError("empty effective domain: all sampled values are +inf")
    if f.grid.dims == 1:
        out = _conjugate_lines(f.grid.axes[0].points(), f.values[None, :], dual.axes[0].points())
        return SampledFunction(dual, out[0])
    x0, x1 = (ax.points() for ax in f.grid.axes)
    u0, u1 = (ax.points() for ax in dual.axes)
    inner = _conjugate_lines(x1, f.values, u1)          # (n0, m1): conjugate along axis 1
    outer = _conjugate_lines(x0, (-inner).T, u0)        # (m1, m0): then along axis 0
    return SampledFunction(dual, outer.T)


def _half_sq(grid: GridSpec) -> np.ndarray:
    mesh = grid.mesh()
    if grid.dims == 1:
        return 0.5 * mesh * mesh
    return 0.5 * np.sum(mesh * mesh, axis=-1)


def weakly_convex_envelope_grid(f: SampledFunction, dual: GridSpec | None = None) -> SampledFunction:
    """Tightest 1-weakly-convex minorant via double conjugation of ``f + ||.||^2/2``.

    The dual grid defaults to the primal one; widen it when the shifted
    function's slopes exceed the primal range, and trust the result only on
    the interior of the primal grid.
    """
    dual = dual if dual is not None else f.grid
    shifted = SampledFunction(f.grid, f.values + _half_sq(f.grid))
    conj = legendre_conjugate_grid(shifted, dual)
    biconj = legendre_conjugate_grid(conj, f.grid)
    return SampledFunction(f.grid, biconj.values - _half_sq(f.grid))


def default_prox_box(x, reach: float, step: float) -> GridSpec:
    """Square search box of half-width ``reach + 1`` around ``x``, snapped to ``step``."""
    if reach < 0:
        raise ValueError("reach must be nonnegative")
    half = reach + 1.0
    n = max(2, int(math.ceil(2.0 * half / step)))
    p = np.atleast_1d(np.asarray(x, dtype=float))
    axes = tuple(Axis(c - half, (c - half) + n * step, step) for c in p)
    return GridSpec(axes)


def _cluster_tol(step: float, gamma: float) -> float:
    # Grid offset from a true minimizer costs O(step^2 / gamma) in objective.
    return 1e-9 + step * step / gamma


def _best_index(obj: np.ndarray, flat_idx: np.ndarray) -> int:
    # Deterministic representative: lowest objective, first in row-major order.
    sub = obj.reshape(-1)[flat_idx]
    return int(flat_idx[int(np.argmin(sub))])


def _brute_force_prox_1d(penalty, x: float, gamma: float, box: GridSpec) -> ScalarProxSet:
    ax = box.axes[0]
    ys = ax.points()
    obj = np.asarray(penalty(ys), dtype=float) + (x - ys) ** 2 / (2.0 * gamma)
    if not np.any(np.isfinite(obj)):
        raise ValueError("objective is +inf everywhere on the box")
    tol = _cluster_tol(ax.step, gamma)
    sel = np.flatnonzero(obj <= np.min(obj) + tol)
    if sel[0] == 0 or sel[-1] == ys.size - 1:
        raise BoxTooSmallError("minimizer cluster touches the search-box boundary")
    runs = np.split(sel, np.flatnonzero(np.diff(sel) > 1) + 1)
    if len(runs) == 1:
        run = runs[0]
        if run.size > 3:
            return ScalarProxSet.interval(ys[run[0]], ys[run[-1]])
        return ScalarProxSet.single(ys[_best_index(obj, run)])
    if len(runs) == 2:
        return ScalarProxSet.pair(
            ys[_best_index(obj, runs[0])], ys[_best_index(obj, runs[1])]
        )
    raise ValueError(f"found {len(runs)} optimizer clusters; expected at most 2")


def _brute_force_prox_2d(penalty, x, gamma: float, box: GridSpec) -> ProxSet:
    mesh = box.mesh()
    p = Point2.of(x)
    obj = np.asarray(penalty(mesh), dtype=float)
    obj = obj + ((p.x1 - mesh[..., 0]) ** 2 + (p.x2 - mesh[..., 1]) ** 2) / (2.0 * gamma)
    if not np.any(np.isfinite(obj)):
        raise ValueError("objective is +inf everywhere on the box")
    step = box.max_step
    tol = _cluster_tol(step, gamma)
    mask = obj <= np.min(obj) + tol
    idx = np.argwhere(mask)
    if (
        np.any(idx[:, 0] == 0)
        or np.any(idx[:, 0] == box.shape[0] - 1)
        or np.any(idx[:, 1] == 0)
        or np.any(idx[:, 1] == box.shape[1] - 1)
    ):
        raise BoxTooSmallError("minimizer cluster touches the search-box boundary")
    labels, nlab = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))

    def cluster_best(k: int) -> np.ndarray:
        flat = np.flatnonzero((labels == k).reshape(-1))
        i = _best_index(obj, flat)
        return mesh.reshape(-1, 2)[i]

    if nlab == 1:
        cells = np.argwhere(labels == 1)
        extent = cells.max(axis=0) - cells.min(axis=0)
        if max(extent) <= 3:
            return ProxSet.single(cluster_best(1))
        pts = mesh.reshape(-1, 2)[np.flatnonzero((labels == 1).reshape(-1))]
        center = pts.mean(axis=0)
        dev = pts - center
        cov = dev.T @ dev
        evecs = np.linalg.eigh(cov)[1]
        axis_dir, perp_dir = evecs[:, 1], evecs[:, 0]
        if np.max(np.abs(dev @ perp_dir)) > 1.5 * step:
            raise ValueError("optimizer cluster spans a 2-D blob, not a segment")
        proj = dev @ axis_dir
        return ProxSet.segment(pts[int(np.argmin(proj))], pts[int(np.argmax(proj))])
    if nlab == 2:
        return ProxSet.point_pair(cluster_best(1), cluster_best(2))
    raise ValueError(f"found {nlab} optimizer clusters; expected at most 2")


def brute_force_prox(penalty, x, gamma: float, box: GridSpec):
    """Exhaustive grid prox: minimize ``penalty(y) + ||x - y||^2 / (2*gamma)`` over ``box``.

    ``penalty`` must evaluate vectorized on the box mesh.  Near-optimal grid
    cells (within a curvature-scaled tolerance) are merged into clusters by
    adjacency; one compact cluster reports a single point, one elongated
    collinear cluster reports a segment/interval, two clusters report a pair.
    A cluster touching the box boundary raises :class:`BoxTooSmallError`.
    """
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError(f"gamma must be positive and finite, got {gamma!r}")
    if box.dims == 1:
        return _brute_force_prox_1d(penalty, float(x), gamma, box)
    return _brute_force_prox_2d(penalty, x, gamma, box)


@dataclass(frozen=True)
class GraphSegment:
    """A straight monotone piece of a prox graph; vertical segments fill jumps."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        for v in (self.x0, self.y0, self.x1, self.y1):
            if not math.isfinite(v):
                raise ValueError("graph segment coordinates must be finite")
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError("graph segments must be nondecreasing in both coordinates")
        if self.x1 == self.x0 and self.y1 == self.y0:
            raise ValueError("degenerate graph segment")

    @property
    def vertical(self) -> bool:
        return self.x1 == self.x0


class MonotoneGraph1D:
    """A maximal monotone curve in the plane, stored as connected straight pieces.

    This is the filled graph of a (possibly discontinuous) scalar shrinkage
    operator: affine pieces between breakpoints plus vertical segments closing
    each jump.
    """

    def __init__(self, segments) -> None:
        segs = tuple(segments)
        if not segs:
            raise ValueError("need at least one segment")
        for prev, nxt in zip(segs, segs[1:]):
            if (prev.x1, prev.y1) != (nxt.x0, nxt.y0):
                raise ValueError(
                    f"segments must chain exactly: {prev.x1, prev.y1} != {nxt.x0, nxt.y0}"
                )
        self.segments = segs

    @classmethod
    def hard_graph(cls, threshold: float, limit: float = 1e6) -> "MonotoneGraph1D":
        """Filled graph of hard shrinkage at ``threshold``, truncated to ``[-limit, limit]``."""
        t = float(threshold)
        if not (math.isfinite(t) and t > 0 and limit > t):
            raise ValueError("need 0 < threshold < limit")
        return cls(
            [
                GraphSegment(-limit, -limit, -t, -t),
                GraphSegment(-t, -t, -t, 0.0),
                GraphSegment(-t, 0.0, t, 0.0),
                GraphSegment(t, 0.0, t, t),
                GraphSegment(t, t, limit, limit),
            ]
        )

    @property
    def x_range(self) -> tuple[float, float]:
        return self.segments[0].x0, self.segments[-1].x1

    def breakpoints(self) -> list[tuple[float, ScalarProxSet]]:
        """Jump locations with the interval of values filling each jump."""
        return [
            (s.x0, ScalarProxSet.interval(s.y0, s.y1)) for s in self.segments if s.vertical
        ]

    def image_at(self, x: float) -> ScalarProxSet:
        """All graph values above ``x`` (an interval at breakpoints)."""
        x = float(x)
        lo_x, hi_x = self.x_range
        if not lo_x <= x <= hi_x:
            raise ValueError(f"{x} outside graph range [{lo_x}, {hi_x}]")
        ys: list[float] = []
        for s in self.segments:
            if s.x0 <= x <= s.x1:
                if s.vertical:
                    ys.extend((s.y0, s.y1))
                else:
                    ys.append(s.y0 + (s.y1 - s.y0) * (x - s.x0) / (s.x1 - s.x0))
        if min(ys) < max(ys):
            return ScalarProxSet.interval(min(ys), max(ys))
        return ScalarProxSet.single(ys[0])


_CONVERT_RESIDUAL = 1e-12


def convert_1d(graph: MonotoneGraph1D, delta: float, q: float) -> float:
    """Relax a scalar shrinkage operator by graph inversion.

    Finds the point ``(x, p)`` on the filled graph with
    ``x + delta * p = (delta + 1) * q`` and returns ``p``; this is the value at
    ``q`` of the relaxed operator obtained by scaling the underlying penalty
    down by ``delta + 1``.  Solved by monotone bisection along the graph
    piece containing the target, to residual ``1e-12`` (or float exhaustion).
    """
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive and finite, got {delta!r}")
    q = float(q)
    if not math.isfinite(q):
        raise ValueError(f"q must be finite, got {q!r}")
    target = (delta + 1.0) * q

    def fval(x: float, y: float) -> float:
        return x + delta * y

    first, last = graph.segments[0], graph.segments[-1]
    if target < fval(first.x0, first.y0) or target > fval(last.x1, last.y1):
        raise ValueError(f"query {q} maps outside the representable graph range")

    for seg in graph.segments:
        f_lo = fval(seg.x0, seg.y0)
        f_hi = fval(seg.x1, seg.y1)
        if not f_lo <= target <= f_hi:
            continue
        if seg.vertical:
            # Bisect the jump on the value axis.
            lo, hi = seg.y0, seg.y1

            def value(t: float) -> float:
                return t

            def resid(t: float) -> float:
                return fval(seg.x0, t) - target

        else:
            slope = (seg.y1 - seg.y0) / (seg.x1 - seg.x0)
            lo, hi = seg.x0, seg.x1

            def value(t: float, s=seg, sl=slope) -> float:
                return s.y0 + sl * (t - s.x0)

            def resid(t: float) -> float:
                return fval(t, value(t)) - target

        r_lo = resid(lo)
        if abs(r_lo) <= _CONVERT_RESIDUAL:
            return value(lo)
        r_hi = resid(hi)
        if abs(r_hi) <= _CONVERT_RESIDUAL:
            return value(hi)
        best_t, best_r = (lo, abs(r_lo)) if abs(r_lo) < abs(r_hi) else (hi, abs(r_hi))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            r = resid(mid)
            if abs(r) < best_r:
                best_t, best_r = mid, abs(r)
            if abs(r) <= _CONVERT_RESIDUAL:
                return value(mid)
            if r < 0.0:
                lo = mid
            else:
                hi = mid
        return value(best_t)
    raise ValueError("target not bracketed by any graph piece")  # pragma: no cover


@dataclass(frozen=True)
class InclusionReport:
    """Outcome of an oracle check that one prox set sits inside another."""

    prox_penalty: object
    prox_envelope: object
    max_distance: float
    included: bool


def verify_inclusion(penalty, envelope, x, box: GridSpec, gamma: float = 1.0) -> InclusionReport:
    """Check by exhaustive search that the penalty's prox lies inside the envelope's.

    Both proxes are computed with :func:`brute_force_prox` on the same box;
    every defining point of the first must come within twice the grid step of
    the second set.
    """
    prox_pen = brute_force_prox(penalty, x, gamma, box)
    prox_env = brute_force_prox(envelope, x, gamma, box)
    step = box.max_step
    if box.dims == 1:
        dist = max(prox_env.distance(v) for v in prox_pen.values())
    else:
        dist = max(prox_env.distance(p) for p in prox_pen.points())
    return InclusionReport(prox_pen, prox_env, float(dist), bool(dist <= 2.0 * step))


def _sample_pairs(pairs: int, seed: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, size=(pairs, 2))
    ys = rng.uniform(lo, hi, size=(pairs, 2))
    return xs, ys


def check_monotone(op, pairs: int = 1000, seed: int = 0, lo: float = -8.0, hi: float = 8.0) -> float:
    """Smallest ``<op(x) - op(y), x - y>`` over random point pairs (>= 0 for monotone ops)."""
    xs, ys = _sample_pairs(pairs, seed, lo, hi)
    dif_in = xs - ys
    dif_out = np.asarray(op(xs)) - np.asarray(op(ys))
    return float(np.min(np.sum(dif_in * dif_out, axis=-1)))


def check_lipschitz(
    op, bound: float, pairs: int = 1000, seed: int = 0, lo: float = -8.0, hi: float = 8.0
) -> float:
    """Largest displacement ratio ``|op(x) - op(y)| / |x - y|`` over random pairs.

    ``bound`` is the reference constant the caller compares the result
    against; it does not affect the sampling.
    """
    del bound
    xs, ys = _sample_pairs(pairs, seed, lo, hi)
    num = np.linalg.norm(np.asarray(op(xs)) - np.asarray(op(ys)), axis=-1)
    den = np.linalg.norm(xs - ys, axis=-1)
    keep = den > 0
    return float(np.max(num[keep] / den[keep]))


def jacobian_symmetry_defect(op, x, h: float = 1e-5) -> float:
    """Asymmetry ``|J01 - J10|`` of the central-difference Jacobian of a planar operator."""
    if not (math.isfinite(h) and h > 0):
        raise ValueError(f"h must be positive and finite, got {h!r}")
    p = Point2.of(x).as_array()
    e0 = np.array([h, 0.0])
    e1 = np.array([0.0, h])
    j01 = (np.asarray(op(p + e1)) - np.asarray(op(p - e1)))[0] / (2.0 * h)
    j10 = (np.asarray(op(p + e0)) - np.asarray(op(p - e0)))[1] / (2.0 * h)
    return float(abs(j01 - j10))
