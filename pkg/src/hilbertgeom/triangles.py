"""Ideal triangles and their Hilbert areas.

An ideal triangle has its three vertices on the boundary; its Hilbert area
integrates the measure density over the open hull.  The density blows up at
each ideal vertex, so the area is assembled from a compact central hexagon
plus three corner ladders: nested cuts parallel to the opposite side at
geometric side fractions 2^-k peel the corner into trapezoids whose areas
form a (nearly) geometric series.  Summing the trapezoids and extrapolating
the tail gives the corner area; a ladder whose increments stop decaying is
reported as diverged, which is exactly the non-hyperbolic signature the
polygon domains must show.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import ConvexDomain, as_point, as_points
from .errors import DegenerateVertices, InvalidTriangle
from .measure import QuadratureEstimate, region_area

LADDER_DEPTH = 12
_SIDE_SAMPLES = 64


@dataclass(frozen=True)
class IdealTriangle:
    """Triangle with vertices on the domain boundary.

    ``validity`` records whether the open hull lies in the domain and the
    closed hull meets the boundary only at the vertices; when it fails,
    ``invalid_reason`` says why (polygons with a side along an edge report
    "side in boundary").
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    validity: bool
    invalid_reason: str = None

    def vertices(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c])

    def to_jsonable(self) -> dict:
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "validity": self.validity,
            "invalid_reason": self.invalid_reason,
        }


@dataclass(frozen=True)
class CornerDecomposition:
    """Cut of an ideal triangle into three corner triangles and a hexagon.

    Corner i keeps vertex i and the two cut points at fraction ``s`` along
    the adjacent sides; because both cuts use the same fraction, each cut
    segment is parallel to the opposite side.  With s = 1/2 the hexagon
    degenerates to the medial triangle.
    """

    corners: tuple  # three (3, 2) arrays: vertex, cut toward next, cut toward previous
    hexagon: np.ndarray
    cut_fraction: float


def _triangle_vertices(domain: ConvexDomain, params) -> np.ndarray:
    t = np.asarray(params, dtype=float).reshape(3)
    return domain.boundary_points(t)


def make_ideal_triangle(domain: ConvexDomain, t1: float, t2: float, t3: float) -> IdealTriangle:
    """Ideal triangle from three boundary parameters.

    Raises ``DegenerateVertices`` for coincident or collinear vertices;
    boundary contact along a side only marks the triangle invalid.
    """
    return ideal_triangle_from_points(domain, _triangle_vertices(domain, (t1, t2, t3)))


def ideal_triangle_from_points(domain: ConvexDomain, points) -> IdealTriangle:
    """Ideal triangle from three boundary points (already on the boundary)."""
    V = as_points(points)
    if V.shape != (3, 2):
        raise ValueError("expected exactly three planar points")
    sc = domain.scale()
    for i in range(3):
        for j in range(i + 1, 3):
            if np.hypot(*(V[i] - V[j])) < 1e-9 * sc:
                raise DegenerateVertices("coincident vertices")
    cross = (V[1, 0] - V[0, 0]) * (V[2, 1] - V[0, 1]) - (V[1, 1] - V[0, 1]) * (V[2, 0] - V[0, 0])
    if abs(cross) < 1e-12 * sc * sc:
        raise DegenerateVertices("collinear vertices")

    validity = True
    reason = None
    fr = np.arange(1, _SIDE_SAMPLES) / _SIDE_SAMPLES
    for i in range(3):
        p, q = V[i], V[(i + 1) % 3]
        side = p[None, :] + fr[:, None] * (q - p)[None, :]
        if np.any(domain.gauge(side) >= -1e-12 * sc):
            validity = False
            reason = "side in boundary"
            break
    return IdealTriangle(a=V[0], b=V[1], c=V[2], validity=validity, invalid_reason=reason)


def corner_decomposition(domain: ConvexDomain, T: IdealTriangle, s: float) -> CornerDecomposition:
    """Split a valid ideal triangle at side fraction ``s`` from each vertex.

    ``s`` must lie in (0, 1/2]; beyond 1/2 the central piece is no longer a
    hexagon and the pieces stop partitioning the triangle.
    """
    if not T.validity:
        raise InvalidTriangle(T.invalid_reason or "invalid ideal triangle")
    if not (0.0 < s <= 0.5):
        raise ValueError("cut fraction must lie in (0, 1/2]")
    V = T.vertices()
    corners = []
    for i in range(3):
        a, b, c = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
        corners.append(np.stack([a, a + s * (b - a), a + s * (c - a)]))
    hex_pts = []
    for i in range(3):
        a, b = V[i], V[(i + 1) % 3]
        hex_pts.append(a + s * (b - a))
        hex_pts.append(b + s * (a - b))
    hexagon = np.asarray(hex_pts)
    if s == 0.5:
        hexagon = hexagon[::2]
    return CornerDecomposition(corners=tuple(corners), hexagon=hexagon, cut_fraction=s)


def _ladder_piece(V: np.ndarray, i: int, s_out: float, s_in: float) -> np.ndarray:
    """Trapezoid between the cuts at fractions s_out > s_in toward vertex i."""
    a, b, c = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
    return np.stack(
        [a + s_out * (b - a), a + s_in * (b - a), a + s_in * (c - a), a + s_out * (c - a)]
    )


@dataclass(frozen=True)
class CornerLadder:
    """Partial sums of one corner ladder with its extrapolated tail."""

    partial: float
    tail: float
    increments: tuple
    diverged: bool
    error: float


def _run_ladder(
    domain: ConvexDomain,
    V: np.ndarray,
    i: int,
    tol: float,
    depth: int,
    piece_kwargs: dict,
) -> CornerLadder:
    fractions = 0.5 ** np.arange(1, depth + 1)
    increments = []
    err = 0.0
    for k in range(len(fractions) - 1):
        piece = _ladder_piece(V, i, fractions[k], fractions[k + 1])
        est = region_area(domain, piece, tol=tol, **piece_kwargs)
        increments.append(est.value)
        err += est.error_bound
    mu = np.asarray(increments)
    partial = float(mu.sum())
    # non-Cauchy ladder: last three increments fail to decay (5% slack),
    # or the decay ratio is too close to 1 for the geometric tail to close
    slack = 1.05
    diverged = bool(mu[-1] >= mu[-2] / slack and mu[-2] >= mu[-3] / slack)
    r_hat = mu[-1] / mu[-2] if mu[-2] > 0 else 1.0
    r_prev = mu[-2] / mu[-3] if mu[-3] > 0 else 1.0
    if r_hat >= 0.98:
        diverged = True
    if diverged:
        return CornerLadder(partial=partial, tail=0.0, increments=tuple(increments),
                            diverged=True, error=err)
    tail = float(mu[-1] * r_hat / (1.0 - r_hat))
    tail_alt = float(mu[-1] * r_prev / (1.0 - r_prev)) if r_prev < 1.0 else 2.0 * tail
    err += abs(tail - tail_alt) + mu[-1] * r_hat ** 2
    return CornerLadder(partial=partial, tail=tail, increments=tuple(increments),
                        diverged=False, error=err)


def ideal_triangle_area_detail(
    domain: ConvexDomain,
    T: IdealTriangle,
    tol: float = 1e-3,
    ladder_depth: int = LADDER_DEPTH,
    max_depth: int = 9,
    max_cells: int = 1500,
    n_dirs: int = 24,
):
    """Hexagon estimate plus the three corner ladders of an ideal triangle."""
    if not T.validity:
        raise InvalidTriangle(T.invalid_reason or "invalid ideal triangle")
    V = T.vertices()
    piece_kwargs = {"max_depth": max_depth, "max_cells": max_cells, "n_dirs": n_dirs}
    hexagon = corner_decomposition(domain, T, 0.5).hexagon
    hex_est = region_area(domain, hexagon, tol=tol, **piece_kwargs)
    ladders = tuple(
        _run_ladder(domain, V, i, tol, ladder_depth, piece_kwargs) for i in range(3)
    )
    return hex_est, ladders


def ideal_triangle_area(
    domain: ConvexDomain,
    T: IdealTriangle,
    tol: float = 1e-3,
    ladder_depth: int = LADDER_DEPTH,
) -> QuadratureEstimate:
    """Hilbert area of a valid ideal triangle.

    Hexagon quadrature plus corner ladders; the ladder tails are geometric
    extrapolations, and any non-Cauchy ladder marks the whole estimate as
    diverged with the partial sum as a lower bound.
    """
    hex_est, ladders = ideal_triangle_area_detail(domain, T, tol=tol, ladder_depth=ladder_depth)
    value = hex_est.value + sum(lad.partial + lad.tail for lad in ladders)
    err = hex_est.error_bound + sum(lad.error for lad in ladders)
    diverged = any(lad.diverged for lad in ladders)
    return QuadratureEstimate(
        value=float(value),
        error_bound=float(err),
        depth=max(hex_est.depth, ladder_depth),
        diverged=bool(diverged),
    )


# ---------------------------------------------------------------------------
# supremum search


@dataclass(frozen=True)
class TriangleSamplerConfig:
    """Sampling plan for the supremal-area search.

    Random triples are stratified over the boundary parameterization; on
    polygons, deliberate corner-hugging triples (exact corner parameters and
    parameters offset by ``corner_offset``) are appended, because divergent
    witnesses sit where flat boundary arcs meet.
    """

    budget: int = 6
    seed: int = 0
    corner_offset: float = 1e-6
    tol: float = 1e-3


@dataclass(frozen=True)
class SupAreaResult:
    """Largest observed ideal-triangle area with divergent samples kept apart.

    ``best_triangle``/``best_estimate`` give the largest converged sample (or
    the largest divergent partial when nothing converged); every diverged
    sample is recorded in ``divergent`` as a (triangle, estimate) pair.
    """

    best_triangle: IdealTriangle
    best_estimate: QuadratureEstimate
    divergent: tuple
    samples_used: int

    @property
    def max_value(self) -> float:
        vals = [self.best_estimate.value] if self.best_estimate else []
        vals += [est.value for _, est in self.divergent]
        return max(vals) if vals else 0.0

    @property
    def any_diverged(self) -> bool:
        return len(self.divergent) > 0


def _sample_triples(domain: ConvexDomain, config: TriangleSamplerConfig) -> list:
    rng = np.random.default_rng(config.seed)
    period = domain.param_period
    # jitter kept away from the stratum edges so sampled vertices stay
    # well separated; sliver triangles cost quadrature time without ever
    # being area maximizers
    U = 0.1 + 0.8 * rng.random((config.budget, 3))
    triples = []
    for i in range(config.budget):
        base = U[i, 0]
        t = (
            base,
            base + (1.0 + U[i, 1]) / 3.0,
            base + (2.0 + U[i, 2]) / 3.0,
        )
        triples.append(tuple((x % 1.0) * period for x in t))
    corner_params = getattr(domain, "vertex_params", None)
    if corner_params is not None:
        cp = corner_params()
        n = len(cp)
        picks = [(0, n // 3, (2 * n) // 3)] if n > 3 else [(0, 1, 2)]
        for i, j, k in picks:
            triples.append((cp[i], cp[j], cp[k]))
            off = config.corner_offset
            triples.append((cp[i] + off, cp[j] + off, cp[k] + off))
            triples.append((cp[i] - off, cp[j] - off, cp[k] - off))
    return triples


def sup_area_search(domain: ConvexDomain, config: TriangleSamplerConfig = TriangleSamplerConfig()) -> SupAreaResult:
    """Maximize ideal-triangle area over sampled boundary triples."""
    if config.budget < 1:
        raise ValueError("budget must be at least 1")
    best_tri, best_est = None, None
    divergent = []
    used = 0
    for t1, t2, t3 in _sample_triples(domain, config):
        try:
            T = make_ideal_triangle(domain, t1, t2, t3)
        except DegenerateVertices:
            continue
        if not T.validity:
            continue
        used += 1
        est = ideal_triangle_area(domain, T, tol=config.tol)
        if est.diverged:
            divergent.append((T, est))
        elif best_est is None or est.value > best_est.value:
            best_tri, best_est = T, est
    if best_est is None and divergent:
        best_tri, best_est = max(divergent, key=lambda pair: pair[1].value)
    return SupAreaResult(
        best_triangle=best_tri,
        best_estimate=best_est,
        divergent=tuple(divergent),
        samples_used=used,
    )
