"""Hilbert distance, Finsler norm, and Gromov-hyperbolicity estimators.

The distance between interior points p, q is half the log of the cross-ratio
of (a, p, q, b), where a and b are the boundary hits of the line through p
and q (a on the p side).  With L = |q - p| and t-, t+ the distances from p
to the boundary along -(q-p) and +(q-p):

    d(p, q) = 1/2 * ln( (L + t-)/t- * t+/(t+ - L) )

Geodesics are taken as straight segments.  That is the honest choice on
strictly convex domains, where segments are the only geodesics; on polygons
segments are still geodesics, just not the only ones, and the estimators
below are documented as evaluating the segment representative.

Two hyperbolicity estimators are provided side by side: the four-point
Gromov-product defect and the thin-triangle defect.  Both are driven by a
seeded stream of boundary-biased samples, so enlarging the budget only
appends samples and the estimates are monotone in the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import ConvexDomain, as_point, as_points
from .errors import PointNotInterior, SegmentNotInDomain

COINCIDENCE_TOL = 1e-14
_TINY = 1e-300
_SCAN_POINTS = 256
_GOLDEN_ITERS = 48
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _require_interior(domain: ConvexDomain, P: np.ndarray, label: str) -> None:
    if np.any(domain.gauge(P) >= 0.0):
        raise PointNotInterior(f"{label} not interior")


def hilbert_distances(domain: ConvexDomain, P, Q, validate: bool = True) -> np.ndarray:
    """Row-wise Hilbert distances between interior points.

    With ``validate=False`` the rows are trusted to be interior; near-boundary
    rows then degrade to very large values instead of raising, which is what
    the segment-distance scans rely on.
    """
    P = as_points(P)
    Q = as_points(Q)
    if validate:
        _require_interior(domain, P, "first point")
        _require_interior(domain, Q, "second point")
    V = Q - P
    L = np.hypot(V[:, 0], V[:, 1])
    out = np.zeros(len(P))
    move = L >= COINCIDENCE_TOL
    if not np.any(move):
        return out
    Pm, Vm, Lm = P[move], V[move], L[move]
    t_plus, t_minus = domain.ray_hits_both(Pm, Vm)
    gap = np.maximum(t_plus - Lm, _TINY)
    t_minus = np.maximum(t_minus, _TINY)
    with np.errstate(over="ignore"):
        out[move] = 0.5 * np.log((Lm + t_minus) / t_minus * (t_plus / gap))
    return out


def hilbert_distance(domain: ConvexDomain, p, q) -> float:
    """Hilbert distance; returns 0 for coincident points (within 1e-14)."""
    return float(hilbert_distances(domain, as_point(p)[None, :], as_point(q)[None, :])[0])


def finsler_norms(domain: ConvexDomain, P, V, validate: bool = True) -> np.ndarray:
    """Row-wise Finsler norms (1/2)|v| (1/t- + 1/t+); zero rows give 0."""
    P = as_points(P)
    V = as_points(V)
    if validate:
        _require_interior(domain, P, "base point")
    speed = np.hypot(V[:, 0], V[:, 1])
    out = np.zeros(len(P))
    move = speed > 0.0
    if not np.any(move):
        return out
    t_plus, t_minus = domain.ray_hits_both(P[move], V[move])
    t_plus = np.maximum(t_plus, _TINY)
    t_minus = np.maximum(t_minus, _TINY)
    out[move] = 0.5 * speed[move] * (1.0 / t_minus + 1.0 / t_plus)
    return out


def finsler_norm(domain: ConvexDomain, p, v) -> float:
    """Finsler norm of tangent vector ``v`` at interior point ``p``."""
    return float(finsler_norms(domain, as_point(p)[None, :], as_point(v)[None, :])[0])


def gromov_product(domain: ConvexDomain, x, y, w) -> float:
    """Gromov product (x|y) based at w: (d(x,w) + d(y,w) - d(x,y)) / 2."""
    X = as_points([x, x, y])
    Y = as_points([w, y, w])
    d = hilbert_distances(domain, X, Y)
    return 0.5 * float(d[0] + d[2] - d[1])


# ---------------------------------------------------------------------------
# point-to-segment distance


def point_to_segment_distances(
    domain: ConvexDomain,
    P,
    A,
    B,
    n_scan: int = _SCAN_POINTS,
    validate: bool = True,
) -> np.ndarray:
    """Row-wise min over segment [A_i, B_i] of the distance from P_i.

    Grid pre-scan (``n_scan`` points, endpoints included) followed by a
    batched golden-section refinement around the best grid cell.  The scan
    keeps the search honest on polygonal domains where the profile can have
    flat valleys; golden section then squeezes the winning bracket.
    """
    P = as_points(P)
    A = as_points(A)
    B = as_points(B)
    n = len(P)
    if validate:
        _require_interior(domain, P, "query point")
        sc = domain.scale()
        ends = np.concatenate([A, B], axis=0)
        if np.any(domain.gauge(ends) > 1e-7 * sc):
            raise SegmentNotInDomain("segment endpoint outside the closed domain")
        if np.any(domain.gauge(0.5 * (A + B)) >= 0.0):
            raise SegmentNotInDomain("segment midpoint not interior")

    s = np.linspace(0.0, 1.0, n_scan)
    # (n, n_scan) distances in a single vectorized call
    Pt = np.repeat(P, n_scan, axis=0)
    X = (A[:, None, :] + s[None, :, None] * (B - A)[:, None, :]).reshape(-1, 2)
    D = hilbert_distances(domain, Pt, X, validate=False).reshape(n, n_scan)
    k = np.argmin(D, axis=1)
    best = D[np.arange(n), k]
    lo = s[np.maximum(k - 1, 0)]
    hi = s[np.minimum(k + 1, n_scan - 1)]

    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)

    def _eval(t: np.ndarray) -> np.ndarray:
        X = A + t[:, None] * (B - A)
        return hilbert_distances(domain, P, X, validate=False)

    f1 = _eval(x1)
    f2 = _eval(x2)
    for _ in range(_GOLDEN_ITERS):
        take_left = f1 < f2
        hi = np.where(take_left, x2, hi)
        lo = np.where(take_left, lo, x1)
        x1_new = np.where(take_left, hi - _INV_PHI * (hi - lo), x2)
        x2_new = np.where(take_left, x1, lo + _INV_PHI * (hi - lo))
        stale1 = take_left
        x1, x2 = x1_new, x2_new
        fresh = _eval(np.where(stale1, x1, x2))
        f1_new = np.where(stale1, fresh, f2)
        f2_new = np.where(stale1, f1, fresh)
        f1, f2 = f1_new, f2_new
    refined = np.minimum(f1, f2)
    return np.minimum(best, refined)


def point_to_segment_distance(domain: ConvexDomain, p, a, b) -> float:
    """Distance from interior point ``p`` to the straight segment [a, b].

    The segment must lie in the closed domain with its relative interior
    inside the open domain (ideal-triangle sides qualify).
    """
    return float(
        point_to_segment_distances(
            domain,
            as_point(p)[None, :],
            as_point(a)[None, :],
            as_point(b)[None, :],
        )[0]
    )


# ---------------------------------------------------------------------------
# samplers


def boundary_biased_points(
    domain: ConvexDomain,
    shape,
    rng: np.random.Generator,
    approach: float = 1e-4,
    windows=None,
) -> np.ndarray:
    """Random interior points biased toward the boundary.

    Each point picks a boundary parameter (uniform over the period, or over
    the window assigned to its trailing axis slot) and a gap fraction that is
    log-uniform in [approach, 1]; it then sits at fraction (1 - gap) of the
    way from the domain anchor to the boundary.  Samples are drawn from the
    stream in one block, so for a fixed seed the first k points are the same
    for every budget >= k.
    """
    if not (0.0 < approach < 1.0):
        raise ValueError("approach must lie in (0, 1)")
    shape = tuple(np.atleast_1d(shape).astype(int))
    U = rng.random(shape + (2,))
    flat = U.reshape(-1, 2)
    m = len(flat)
    if windows is None:
        params = flat[:, 0] * domain.param_period
    else:
        slots = np.unravel_index(np.arange(m), shape)[-1]
        W = np.asarray(windows, dtype=float).reshape(-1, 2)
        wi = slots % len(W)
        params = W[wi, 0] + flat[:, 0] * (W[wi, 1] - W[wi, 0])
    gap = approach ** flat[:, 1]
    anchor = domain.interior_point()
    Bd = domain.boundary_points(params)
    V = Bd - anchor
    T = domain.ray_hits(np.repeat(anchor[None, :], m, axis=0), V)
    lens = np.hypot(V[:, 0], V[:, 1])
    pts = anchor + ((1.0 - gap) * T / lens)[:, None] * V
    return pts.reshape(shape + (2,))


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class FourPointConfig:
    """Sampling plan for the four-point estimator."""

    budget: int = 2000
    seed: int = 0
    approach: float = 1e-4
    windows: tuple = None  # optional per-slot boundary parameter windows


@dataclass(frozen=True)
class ThinTriangleConfig:
    """Sampling plan for the thin-triangle estimator."""

    budget: int = 24
    side_points: int = 8
    seed: int = 0
    approach: float = 1e-4
    windows: tuple = None


@dataclass(frozen=True)
class DeltaEstimate:
    """Hyperbolicity estimate with its extremal witness.

    ``witness`` re-evaluates to ``delta_hat`` (within 1e-9) through
    :func:`reevaluate_witness`; when quadrature-style divergence makes no
    sense here, larger budgets only ever raise the estimate.
    """

    delta_hat: float
    witness: dict
    samples_used: int

    def to_jsonable(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "witness": self.witness,
            "samples_used": self.samples_used,
        }


def _four_point_defects(domain: ConvexDomain, quads: np.ndarray) -> np.ndarray:
    """Clamped Gromov-product defect for each (4, 2) quadruple (x, y, z, w)."""
    x, y, z, w = quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3]
    P = np.concatenate([x, y, x, x, y, z])
    Q = np.concatenate([w, w, y, z, z, w])
    d = hilbert_distances(domain, P, Q, validate=False).reshape(6, -1)
    dxw, dyw, dxy, dxz, dyz, dzw = d
    xy_w = 0.5 * (dxw + dyw - dxy)
    yz_w = 0.5 * (dyw + dzw - dyz)
    xz_w = 0.5 * (dxw + dzw - dxz)
    return np.maximum(np.minimum(xy_w, yz_w) - xz_w, 0.0)


def delta_four_point(domain: ConvexDomain, config: FourPointConfig = FourPointConfig()) -> DeltaEstimate:
    """Four-point hyperbolicity estimate.

    Maximum over sampled labeled quadruples (x, y, z, w) of

        min((x|y)_w, (y|z)_w) - (x|z)_w,  clamped at 0.

    Degenerate quadruples contribute 0 and the estimate is monotone in the
    budget for a fixed seed.
    """
    if config.budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(config.seed)
    quads = boundary_biased_points(
        domain, (config.budget, 4), rng, approach=config.approach, windows=config.windows
    )
    defects = _four_point_defects(domain, quads)
    k = int(np.argmax(defects))
    witness = {"kind": "four-point", "points": quads[k].tolist()}
    return DeltaEstimate(delta_hat=float(defects[k]), witness=witness, samples_used=config.budget)


def window_candidates(
    domain: ConvexDomain,
    windows,
    approach: float = 1e-6,
    params_per_window: int = 5,
    gap_levels: int = 5,
) -> np.ndarray:
    """Deterministic interior candidates fanned toward boundary windows.

    For each parameter window, boundary anchors are spread evenly and each
    anchor contributes points at log-spaced gap fractions from ``approach``
    up to 1 (the domain anchor itself).
    """
    gaps = np.geomspace(approach, 1.0, gap_levels)
    anchor = domain.interior_point()
    pts = []
    for lo, hi in windows:
        params = np.linspace(lo, hi, params_per_window) % domain.param_period
        B = domain.boundary_points(params)
        for b in B:
            pts.append(anchor + np.outer(1.0 - gaps, b - anchor))
    return np.concatenate(pts, axis=0)


def delta_four_point_grid(domain: ConvexDomain, points) -> DeltaEstimate:
    """Exhaustive four-point defect over every labeled quadruple of ``points``.

    Meant for deliberate stress configurations (a few dozen candidates): the
    pairwise distance matrix is computed once and the defect of all n^4
    labeled quadruples is maximized by broadcasting, so this stays cheap up
    to n of about 80.
    """
    C = as_points(points)
    n = len(C)
    if n < 4:
        raise ValueError("need at least four candidate points")
    if n > 120:
        raise ValueError("candidate set too large for exhaustive search")
    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    D = hilbert_distances(domain, C[I.ravel()], C[J.ravel()], validate=False).reshape(n, n)
    D = 0.5 * (D + D.T)
    gp = 0.5 * (D[:, None, :] + D[None, :, :] - D[:, :, None])  # gp[i, j, l] = (i|j)_l
    best = 0.0
    arg = (0, 0, 0, 0)
    for l in range(n):
        g = gp[:, :, l]
        F = np.minimum(g[:, :, None], g[None, :, :]) - g[:, None, :]  # [i, j, k]
        m = float(F.max())
        if m > best:
            best = m
            i, j, k = np.unravel_index(int(np.argmax(F)), F.shape)
            arg = (int(i), int(j), int(k), l)
    i, j, k, l = arg
    witness = {"kind": "four-point", "points": [C[i].tolist(), C[j].tolist(), C[k].tolist(), C[l].tolist()]}
    return DeltaEstimate(delta_hat=best, witness=witness, samples_used=n ** 4)


def _collinear(a: np.ndarray, b: np.ndarray, c: np.ndarray, scale: float) -> bool:
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return abs(cross) <= 1e-13 * scale * scale


def triangle_thinness(
    domain: ConvexDomain,
    a,
    b,
    c,
    side_points: int = 8,
) -> tuple[float, dict]:
    """Thinness of the segment triangle abc: the largest, over points p on a
    side, of the distance from p to the union of the two other sides.

    Returns the value together with a witness record.  Collinear vertices
    give 0 (the sides overlap).
    """
    a, b, c = as_point(a), as_point(b), as_point(c)
    sc = domain.scale()
    if _collinear(a, b, c, sc):
        return 0.0, {"kind": "thin-triangle", "vertices": [a.tolist(), b.tolist(), c.tolist()],
                     "side": 0, "point": a.tolist(), "degenerate": True}
    V = np.stack([a, b, c])
    fr = (np.arange(side_points) + 0.5) / side_points
    # probe side i connects V[i+1] and V[i+2]; the opposite sides are
    # (V[i], V[i+1]) and (V[i], V[i+2])
    P_list = [V[(i + 1) % 3] + fr[:, None] * (V[(i + 2) % 3] - V[(i + 1) % 3]) for i in range(3)]
    P_rows, A_rows, B_rows = [], [], []
    for i in range(3):
        for j in ((i + 1) % 3, (i + 2) % 3):
            P_rows.append(P_list[i])
            A_rows.append(np.repeat(V[i][None, :], side_points, axis=0))
            B_rows.append(np.repeat(V[j][None, :], side_points, axis=0))
    D = point_to_segment_distances(
        domain, np.concatenate(P_rows), np.concatenate(A_rows), np.concatenate(B_rows), validate=False
    )
    D = D.reshape(3, 2, side_points)
    per_point = D.min(axis=1)  # min over the two opposite sides
    side_idx, pt_idx = np.unravel_index(int(np.argmax(per_point)), per_point.shape)
    value = float(per_point[side_idx, pt_idx])
    witness_point = P_list[side_idx][pt_idx]
    witness = {
        "kind": "thin-triangle",
        "vertices": [a.tolist(), b.tolist(), c.tolist()],
        "side": int(side_idx),
        "point": witness_point.tolist(),
    }
    return value, witness


def delta_thin(domain: ConvexDomain, config: ThinTriangleConfig = ThinTriangleConfig()) -> DeltaEstimate:
    """Thin-triangle hyperbolicity estimate over sampled segment triangles."""
    if config.budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(config.seed)
    tris = boundary_biased_points(
        domain, (config.budget, 3), rng, approach=config.approach, windows=config.windows
    )
    best = -1.0
    best_witness = None
    for i in range(config.budget):
        value, witness = triangle_thinness(
            domain, tris[i, 0], tris[i, 1], tris[i, 2], side_points=config.side_points
        )
        if value > best:
            best = value
            best_witness = witness
    return DeltaEstimate(delta_hat=float(max(best, 0.0)), witness=best_witness, samples_used=config.budget)


def reevaluate_witness(domain: ConvexDomain, witness: dict) -> float:
    """Recompute the defect recorded in an estimator witness."""
    kind = witness.get("kind")
    if kind == "four-point":
        quad = np.asarray(witness["points"], dtype=float)[None, :, :]
        return float(_four_point_defects(domain, quad)[0])
    if kind == "thin-triangle":
        if witness.get("degenerate"):
            return 0.0
        V = [as_point(v) for v in witness["vertices"]]
        p = as_point(witness["point"])[None, :]
        i = int(witness["side"])
        others = [(V[i], V[(i + 1) % 3]), (V[i], V[(i + 2) % 3])]
        vals = [
            float(point_to_segment_distances(domain, p, a[None, :], b[None, :], validate=False)[0])
            for a, b in others
        ]
        return min(vals)
    raise ValueError(f"unknown witness kind {kind!r}")
