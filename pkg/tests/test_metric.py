import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertgeom.domains import PBall, Polygon, ProjectiveImage, ProjectiveMap, unit_disk
from hilbertgeom.errors import PointNotInterior
from hilbertgeom.metric import (
    FourPointConfig,
    ThinTriangleConfig,
    delta_four_point,
    delta_four_point_grid,
    delta_thin,
    finsler_norm,
    gromov_product,
    hilbert_distance,
    hilbert_distances,
    point_to_segment_distance,
    reevaluate_witness,
    triangle_thinness,
    window_candidates,
)

# frozen estimator outputs for the default seeds
DISK_FOUR_POINT_2000_SEED0 = 0.6698247508818951
DISK_THIN_24_SEED0 = 0.8601061283554778
SQUARE_GRID_FOUR_POINT = 3.0279100549988267

DELTA_H2 = math.log(1.0 + math.sqrt(2.0))


def test_klein_radial_distances():
    disk = unit_disk()
    for r in (0.1, 0.5, 0.9):
        d = hilbert_distance(disk, (0.0, 0.0), (r, 0.0))
        assert abs(d - math.atanh(r)) <= 1e-12


def test_distance_basic_properties():
    disk = unit_disk()
    assert hilbert_distance(disk, (0.2, 0.1), (0.2, 0.1)) == 0.0
    d1 = hilbert_distance(disk, (0.2, 0.1), (-0.4, 0.3))
    d2 = hilbert_distance(disk, (-0.4, 0.3), (0.2, 0.1))
    assert abs(d1 - d2) <= 1e-12
    with pytest.raises(PointNotInterior):
        hilbert_distance(disk, (1.5, 0.0), (0.0, 0.0))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    p=st.sampled_from([2.0, 3.0, 7.0]),
)
def test_triangle_inequality_property(seed, p):
    rng = np.random.default_rng(seed)
    dom = PBall(p)
    pts = []
    while len(pts) < 3:
        cand = rng.uniform(-1.0, 1.0, 2)
        if dom.gauge(cand[None])[0] < -1e-3:
            pts.append(cand)
    a, b, c = pts
    dab = hilbert_distance(dom, a, b)
    dbc = hilbert_distance(dom, b, c)
    dac = hilbert_distance(dom, a, c)
    assert dac <= dab + dbc + 1e-9


def test_projective_invariance_of_distance():
    disk = unit_disk()
    H = ProjectiveMap(np.array([[1.0, 0.12, 0.0], [0.05, 1.0, 0.02], [0.08, -0.03, 1.0]]))
    image = ProjectiveImage(disk, H)
    rng = np.random.default_rng(7)
    P = rng.uniform(-0.6, 0.6, (12, 2))
    Q = rng.uniform(-0.6, 0.6, (12, 2))
    d0 = hilbert_distances(disk, P, Q)
    d1 = hilbert_distances(image, H.apply_many(P), H.apply_many(Q))
    assert np.max(np.abs(d1 - d0) / np.maximum(d0, 1e-12)) <= 1e-9


def test_finsler_norm_klein_values():
    disk = unit_disk()
    v = (0.0, 1.0)
    assert abs(finsler_norm(disk, (0.0, 0.0), (1.0, 0.0)) - 1.0) <= 1e-12
    r = 0.6
    expected = 1.0 / (1.0 - r * r)
    assert abs(finsler_norm(disk, (r, 0.0), (1.0, 0.0)) - expected) <= 1e-12
    # positive homogeneity
    f1 = finsler_norm(disk, (0.3, 0.2), v)
    f3 = finsler_norm(disk, (0.3, 0.2), (0.0, 3.0))
    assert abs(f3 - 3.0 * f1) <= 1e-12


def test_finsler_norm_is_metric_derivative():
    dom = PBall(4.0)
    p = np.array([0.3, -0.2])
    v = np.array([0.8, 0.6])
    eps = 1e-5
    d = hilbert_distance(dom, p, p + eps * v)
    f = finsler_norm(dom, p, v)
    assert abs(d / (eps * f) - 1.0) <= 1e-3


def test_gromov_product_identities():
    disk = unit_disk()
    x, y, w = (0.4, 0.0), (-0.3, 0.2), (0.0, -0.5)
    gxy = gromov_product(disk, x, y, w)
    gyx = gromov_product(disk, y, x, w)
    assert abs(gxy - gyx) <= 1e-12
    assert gxy >= 0.0
    assert gromov_product(disk, x, x, w) == pytest.approx(hilbert_distance(disk, w, x), abs=1e-12)


def test_point_to_segment_distance():
    disk = unit_disk()
    a, b = np.array([-0.5, 0.0]), np.array([0.5, 0.0])
    on_segment = np.array([0.1, 0.0])
    assert point_to_segment_distance(disk, on_segment, a, b) <= 1e-9
    off = np.array([0.0, 0.4])
    d_seg = point_to_segment_distance(disk, off, a, b)
    d_ends = min(hilbert_distance(disk, off, a), hilbert_distance(disk, off, b))
    assert d_seg <= d_ends + 1e-12
    assert d_seg > 0.0


def test_triangle_thinness_collinear_is_zero():
    disk = unit_disk()
    value, witness = triangle_thinness(disk, (-0.5, 0.0), (0.0, 0.0), (0.5, 0.0))
    assert value == 0.0
    assert witness["degenerate"] is True


def test_delta_four_point_disk():
    est = delta_four_point(unit_disk(), FourPointConfig(budget=2000, seed=0))
    assert est.delta_hat == pytest.approx(DISK_FOUR_POINT_2000_SEED0, rel=1e-12)
    # sampled four-point delta of the Klein disk stays under the log(2) bound
    assert 0.4 <= est.delta_hat <= math.log(2.0) + 1e-9
    assert reevaluate_witness(unit_disk(), est.witness) == pytest.approx(est.delta_hat, rel=1e-12)


def test_delta_thin_disk():
    est = delta_thin(unit_disk(), ThinTriangleConfig(budget=24, seed=0))
    assert est.delta_hat == pytest.approx(DISK_THIN_24_SEED0, rel=1e-12)
    assert 0.5 <= est.delta_hat <= DELTA_H2 + 1e-9
    assert reevaluate_witness(unit_disk(), est.witness) == pytest.approx(est.delta_hat, rel=1e-12)


def test_square_four_point_grows_past_hyperbolic_range():
    # deliberate candidates fanned into two adjacent corners expose the flat
    # faces; random sampling at this budget rarely finds them
    square = Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    pts = window_candidates(square, [(0.23, 0.27), (0.48, 0.52)], approach=1e-6)
    est = delta_four_point_grid(square, pts)
    assert est.delta_hat == pytest.approx(SQUARE_GRID_FOUR_POINT, rel=1e-9)
    assert est.delta_hat > 3.0


def test_delta_estimates_serialize():
    est = delta_four_point(unit_disk(), FourPointConfig(budget=50, seed=4))
    blob = est.to_jsonable()
    assert set(blob) >= {"delta_hat", "witness", "samples_used"}
    assert blob["samples_used"] == 50
