import math

import numpy as np
import pytest

from hilbertgeom.domains import PBall, Polygon, unit_disk
from hilbertgeom.errors import DegenerateVertices, InvalidTriangle
from hilbertgeom.measure import region_area
from hilbertgeom.triangles import (
    SupAreaResult,
    TriangleSamplerConfig,
    corner_decomposition,
    ideal_triangle_area,
    ideal_triangle_area_detail,
    make_ideal_triangle,
    sup_area_search,
)

# frozen quadrature outputs for the default settings
DISK_SYMMETRIC_AREA = 3.1409962989426528
SQUARE_EDGE_TRIPLE_AREA = 1.6171470604337113
DISK_SUP_BUDGET2_SEED0 = 3.1409856477197238

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def _symmetric_disk_triangle(offset=0.0):
    disk = unit_disk()
    period = disk.param_period
    return disk, make_ideal_triangle(disk, offset, offset + period / 3.0, offset + 2.0 * period / 3.0)


def test_make_ideal_triangle_vertices_on_boundary():
    disk, tri = _symmetric_disk_triangle()
    assert tri.validity
    V = tri.vertices()
    assert np.max(np.abs(disk.gauge(V))) <= 1e-9


def test_make_ideal_triangle_rejects_degenerate_params():
    disk = unit_disk()
    with pytest.raises(DegenerateVertices):
        make_ideal_triangle(disk, 0.1, 0.1, 2.0)
    with pytest.raises(DegenerateVertices):
        # antipodal pair plus a coincident copy is collinear
        make_ideal_triangle(disk, 0.0, math.pi, 2.0 * math.pi)


def test_square_corner_triple_is_invalid():
    square = Polygon(SQUARE)
    tri = make_ideal_triangle(square, 0.0, 0.25, 0.5)
    assert not tri.validity
    assert tri.invalid_reason == "side in boundary"
    with pytest.raises(InvalidTriangle):
        ideal_triangle_area(square, tri)


def test_square_edge_midpoint_triple_converges():
    square = Polygon(SQUARE)
    tri = make_ideal_triangle(square, 0.125, 0.375, 0.625)
    assert tri.validity
    est = ideal_triangle_area(square, tri)
    assert not est.diverged
    assert est.value == pytest.approx(SQUARE_EDGE_TRIPLE_AREA, rel=1e-9)


def test_corner_decomposition_geometry():
    disk, tri = _symmetric_disk_triangle()
    a, b, c = tri.vertices()
    dec = corner_decomposition(disk, tri, 0.25)
    assert np.asarray(dec.hexagon).shape == (6, 2)
    assert np.allclose(dec.hexagon[0], a + 0.25 * (b - a), atol=1e-12)
    assert dec.cut_fraction == 0.25
    # the medial cut degenerates the hexagon to a triangle
    medial = corner_decomposition(disk, tri, 0.5)
    assert np.asarray(medial.hexagon).shape == (3, 2)
    for bad in (0.0, 0.6, -0.1):
        with pytest.raises(ValueError):
            corner_decomposition(disk, tri, bad)


def test_corner_decomposition_partitions_area():
    disk, tri = _symmetric_disk_triangle()
    dec = corner_decomposition(disk, tri, 0.5)
    whole = region_area(disk, tri.vertices(), tol=1e-2)
    pieces = [region_area(disk, dec.hexagon, tol=1e-2)]
    pieces += [region_area(disk, np.asarray(cor), tol=1e-2) for cor in dec.corners]
    total = sum(p.value for p in pieces)
    assert total == pytest.approx(whole.value, rel=2e-2)


def test_disk_ideal_triangle_area_is_pi():
    disk, tri = _symmetric_disk_triangle()
    est = ideal_triangle_area(disk, tri)
    assert not est.diverged
    assert est.value == pytest.approx(DISK_SYMMETRIC_AREA, rel=1e-9)
    assert est.value == pytest.approx(math.pi, rel=1e-2)


def test_disk_ideal_triangle_rotation_invariant():
    _, tri0 = _symmetric_disk_triangle()
    disk, tri1 = _symmetric_disk_triangle(offset=0.31)
    e0 = ideal_triangle_area(disk, tri0)
    e1 = ideal_triangle_area(disk, tri1)
    assert e1.value == pytest.approx(e0.value, rel=1e-6)


def test_disk_corner_ladders_symmetric():
    disk, tri = _symmetric_disk_triangle()
    _, ladders = ideal_triangle_area_detail(disk, tri)
    sums = [lad.partial + lad.tail for lad in ladders]
    assert max(sums) - min(sums) <= 1e-6
    assert all(not lad.diverged for lad in ladders)


def test_ideal_triangle_serializes():
    _, tri = _symmetric_disk_triangle()
    blob = tri.to_jsonable()
    assert blob["validity"] is True
    assert len(blob["a"]) == 2


def test_sup_area_search_disk():
    # every ideal triangle of the Klein disk has area pi, so the search
    # should land there no matter which triples it draws
    res = sup_area_search(unit_disk(), TriangleSamplerConfig(budget=2, seed=0))
    assert res.samples_used == 2
    assert len(res.divergent) == 0
    assert not res.any_diverged
    assert res.max_value == pytest.approx(DISK_SUP_BUDGET2_SEED0, rel=1e-9)
    assert res.max_value == pytest.approx(math.pi, rel=5e-3)


def test_sup_area_result_max_value_includes_divergent():
    from hilbertgeom.measure import QuadratureEstimate

    conv = QuadratureEstimate(value=2.0, error_bound=0.1, depth=3, diverged=False)
    div = QuadratureEstimate(value=9.0, error_bound=1.0, depth=3, diverged=True)
    res = SupAreaResult(best_triangle=None, best_estimate=conv, divergent=((None, div),), samples_used=4)
    assert res.any_diverged
    assert res.max_value == 9.0
