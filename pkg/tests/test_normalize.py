import math

import numpy as np
import pytest

from hilbertgeom.domains import Ellipse, PBall, Polygon, ProjectiveMap, unit_disk
from hilbertgeom.errors import (
    InsufficientSignal,
    InvalidTriangle,
    PreconditionViolated,
    StripTooWide,
)
from hilbertgeom.metric import hilbert_distances
from hilbertgeom.normalize import (
    boundary_graph,
    graph_alpha_fit,
    normalize_many,
    normalize_triangle_pointed,
)
from hilbertgeom.triangles import ideal_triangle_from_points, make_ideal_triangle

# frozen outputs
P4_ASYMMETRIC_ALPHA = 0.20280594289506867

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
TARGETS = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def test_boundary_graph_disk_matches_circle():
    strip = boundary_graph(unit_disk(), [0.0, -1.0], [1.0, 0.0], 0.5)
    x = strip.x
    exact = 1.0 - np.sqrt(1.0 - x * x)
    assert np.max(np.abs(strip.f - exact)) <= 1e-12
    assert strip.f[-1] == pytest.approx(1.0 - math.sqrt(0.75), abs=1e-12)
    # secant coefficients are consistent with the stored samples
    assert strip.f[0] == pytest.approx(strip.b - strip.s * strip.rho, abs=1e-12)


def test_boundary_graph_quartic_ball():
    strip = boundary_graph(PBall(4.0), [0.0, -1.0], [1.0, 0.0], 0.5)
    exact = 1.0 - (1.0 - strip.x**4) ** 0.25
    assert np.max(np.abs(strip.f - exact)) <= 1e-9
    assert strip.f[-1] == pytest.approx(1.0 - 0.9375**0.25, abs=1e-12)


def test_boundary_graph_auto_frame_from_vector():
    # a bare tangent direction is completed to the inward frame
    strip = boundary_graph(unit_disk(), [0.0, -1.0], np.array([1.0, 0.0]), 0.3)
    assert strip.f[(len(strip.f) - 1) // 2] <= 1e-12
    assert np.all(strip.f >= 0.0)


def test_boundary_graph_preconditions():
    disk = unit_disk()
    with pytest.raises(PreconditionViolated):
        boundary_graph(disk, [0.0, -0.5], [1.0, 0.0], 0.3)  # not a boundary point
    with pytest.raises(PreconditionViolated):
        boundary_graph(disk, [0.0, -1.0], [0.0, 1.0], 0.3)  # x-axis not tangent
    with pytest.raises(StripTooWide):
        boundary_graph(disk, [0.0, -1.0], [1.0, 0.0], 1.2)


def test_graph_alpha_fit_contact_orders():
    disk_fit = graph_alpha_fit(boundary_graph(unit_disk(), [0.0, -1.0], [1.0, 0.0], 0.5))
    assert abs(disk_fit.alpha_hat - 2.0) <= 0.05
    p4_fit = graph_alpha_fit(boundary_graph(PBall(4.0), [0.0, -1.0], [1.0, 0.0], 0.5))
    assert abs(p4_fit.alpha_hat - 4.0) <= 0.1
    assert disk_fit.mu_hat > 0.0


def test_graph_alpha_fit_flat_edge_raises():
    square = Polygon(SQUARE)
    strip = boundary_graph(square, [0.5, 0.0], [1.0, 0.0], 0.3)
    assert np.max(strip.f) <= 1e-12
    with pytest.raises(InsufficientSignal):
        graph_alpha_fit(strip)


def _symmetric_disk_triangle():
    disk = unit_disk()
    period = disk.param_period
    return disk, make_ideal_triangle(disk, 0.0, period / 3.0, 2.0 * period / 3.0)


def test_normalize_disk_symmetric_triangle():
    disk, tri = _symmetric_disk_triangle()
    res = normalize_triangle_pointed(disk, tri)
    assert res.alpha == pytest.approx(0.5, abs=1e-9)
    assert res.vertex_residual <= 1e-8
    assert res.tangency_residual <= 1e-8
    assert res.permutation == (0, 1, 2)
    V = tri.vertices()[list(res.permutation)]
    mapped = ProjectiveMap(res.matrix).apply_many(V)
    assert np.max(np.abs(mapped - TARGETS)) <= 1e-8


def test_normalize_conic_always_half():
    # conics are projectively round: every ideal triangle normalizes to 1/2
    disk = unit_disk()
    period = disk.param_period
    for ts in ((0.05, 0.4, 0.77), (0.11, 0.45, 0.62), (0.0, 0.21, 0.5)):
        tri = make_ideal_triangle(disk, *(t * period for t in ts))
        res = normalize_triangle_pointed(disk, tri)
        assert res.alpha == pytest.approx(0.5, abs=1e-9)
    ell = Ellipse(semi_axes=(1.4, 0.7), rotation=0.4)
    tri = make_ideal_triangle(ell, 0.3, 2.1, 4.4)
    res = normalize_triangle_pointed(ell, tri)
    assert res.alpha == pytest.approx(0.5, abs=1e-9)


def test_normalize_pball_asymmetric_alpha_below_half():
    dom = PBall(4.0)
    period = dom.param_period
    tri = make_ideal_triangle(dom, 0.03 * period, 0.30 * period, 0.55 * period)
    res = normalize_triangle_pointed(dom, tri)
    assert res.alpha == pytest.approx(P4_ASYMMETRIC_ALPHA, abs=1e-9)
    assert 0.0 < res.alpha < 0.5
    assert res.vertex_residual <= 1e-8


def test_normalize_is_idempotent():
    dom = PBall(4.0)
    period = dom.param_period
    tri = make_ideal_triangle(dom, 0.03 * period, 0.30 * period, 0.55 * period)
    res = normalize_triangle_pointed(dom, tri)
    target_tri = ideal_triangle_from_points(res.domain, TARGETS)
    assert target_tri.validity
    res2 = normalize_triangle_pointed(res.domain, target_tri)
    M = np.asarray(res2.matrix)
    M = M / M[np.unravel_index(np.argmax(np.abs(M)), M.shape)]
    assert np.max(np.abs(M - np.eye(3))) <= 1e-8
    assert res2.alpha == pytest.approx(res.alpha, abs=1e-9)


def test_normalize_preserves_distances():
    dom = PBall(3.0)
    period = dom.param_period
    tri = make_ideal_triangle(dom, 0.08 * period, 0.41 * period, 0.69 * period)
    res = normalize_triangle_pointed(dom, tri)
    rng = np.random.default_rng(11)
    P, Q = [], []
    while len(P) < 6:
        cand = rng.uniform(-0.8, 0.8, (2, 2))
        if np.all(dom.gauge(cand) < -1e-3):
            P.append(cand[0])
            Q.append(cand[1])
    P, Q = np.array(P), np.array(Q)
    d0 = hilbert_distances(dom, P, Q)
    H = ProjectiveMap(res.matrix)
    d1 = hilbert_distances(res.domain, H.apply_many(P), H.apply_many(Q))
    assert np.max(np.abs(d1 - d0) / np.maximum(d0, 1e-12)) <= 1e-9


def test_normalize_rejects_invalid_triangle():
    square = Polygon(SQUARE)
    tri = make_ideal_triangle(square, 0.0, 0.25, 0.5)
    with pytest.raises(InvalidTriangle):
        normalize_triangle_pointed(square, tri)


def test_normalize_many_shares_min_alpha():
    disk, sym = _symmetric_disk_triangle()
    dom = PBall(4.0)
    period = dom.param_period
    asym = make_ideal_triangle(dom, 0.03 * period, 0.30 * period, 0.55 * period)
    results = normalize_many([(disk, sym), (dom, asym)])
    assert len(results) == 2
    floor = min(r.alpha for r in results)
    assert all(r.e_report == floor for r in results)
    assert floor == pytest.approx(P4_ASYMMETRIC_ALPHA, abs=1e-9)
    assert normalize_many([]) == []


def test_normalization_result_serializes():
    disk, tri = _symmetric_disk_triangle()
    res = normalize_triangle_pointed(disk, tri)
    blob = res.to_jsonable()
    assert set(blob) >= {"matrix", "alpha", "vertex_residual", "tangency_residual", "permutation", "e_report"}
    assert len(blob["matrix"]) == 3 and len(blob["matrix"][0]) == 3
