import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertgeom.domains import PBall, Polygon, unit_disk
from hilbertgeom.errors import PointNotInterior, RegionOutsideDomain
from hilbertgeom.measure import (
    QuadratureEstimate,
    ball_area,
    densities,
    density,
    region_area,
    unit_ball_area,
)


def test_klein_density_closed_form():
    disk = unit_disk()
    for r in (0.0, 0.5, 0.99):
        exact = (1.0 - r * r) ** -1.5
        assert density(disk, (r, 0.0)) == pytest.approx(exact, rel=1e-12)


def test_density_requires_interior_point():
    with pytest.raises(PointNotInterior):
        density(unit_disk(), (1.0, 0.0))


def test_density_monotone_under_inclusion():
    # shrinking the domain grows the density pointwise
    small = PBall(2.0, scale=0.8)
    big = unit_disk()
    P = np.array([[0.0, 0.0], [0.3, 0.1], [-0.2, 0.4]])
    assert np.all(densities(small, P) > densities(big, P))


@settings(max_examples=30, deadline=None)
@given(
    p=st.sampled_from([1.5, 2.0, 4.0, 9.0]),
    x=st.floats(min_value=-0.6, max_value=0.6),
    y=st.floats(min_value=-0.6, max_value=0.6),
)
def test_density_positive_finite(p, x, y):
    dom = PBall(p)
    h = density(dom, (x, y))
    assert np.isfinite(h)
    assert h > 0.0


def test_unit_ball_area_disk_center():
    # Finsler unit ball at the disk center is the Euclidean unit disk
    assert unit_ball_area(unit_disk(), (0.0, 0.0)) == pytest.approx(math.pi, rel=1e-12)


def test_klein_ball_areas_closed_form():
    disk = unit_disk()
    for R in (0.5, 1.0, 2.0):
        est = ball_area(disk, (0.0, 0.0), R)
        exact = 4.0 * math.pi * math.sinh(R / 2.0) ** 2
        assert not est.diverged
        assert est.value == pytest.approx(exact, rel=1e-9)


def test_ball_area_isometry_invariant():
    # hyperbolic balls have the same area wherever they sit
    disk = unit_disk()
    a = ball_area(disk, (0.0, 0.0), 1.0).value
    b = ball_area(disk, (0.5, 0.0), 1.0).value
    c = ball_area(disk, (0.0, -0.7), 1.0).value
    assert b == pytest.approx(a, rel=1e-9)
    assert c == pytest.approx(a, rel=1e-9)


def test_ball_area_pball_sane():
    est = ball_area(PBall(4.0), (0.1, 0.0), 2.0)
    assert not est.diverged
    assert np.isfinite(est.value)
    assert est.value > 0.0


def test_region_area_additive_and_orientation_free():
    disk = unit_disk()
    T = np.array([[0.0, -0.3], [0.4, 0.2], [-0.35, 0.25]])
    whole = region_area(disk, T, tol=1e-4)
    mid = 0.5 * (T + np.roll(T, -1, axis=0))
    parts = [
        np.array([T[0], mid[0], mid[2]]),
        np.array([T[1], mid[1], mid[0]]),
        np.array([T[2], mid[2], mid[1]]),
        mid,
    ]
    total = sum(region_area(disk, p, tol=1e-4).value for p in parts)
    assert total == pytest.approx(whole.value, rel=1e-5)
    reversed_est = region_area(disk, T[::-1], tol=1e-4)
    assert reversed_est.value == pytest.approx(whole.value, rel=1e-9)


def test_region_area_error_bound_tracks_tolerance():
    disk = unit_disk()
    T = np.array([[0.0, -0.3], [0.4, 0.2], [-0.35, 0.25]])
    loose = region_area(disk, T, tol=1e-2)
    tight = region_area(disk, T, tol=1e-4)
    assert abs(tight.value - loose.value) <= max(loose.error_bound, 1e-12)


def test_region_area_rejects_outside_vertices():
    disk = unit_disk()
    with pytest.raises(RegionOutsideDomain):
        region_area(disk, np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 0.5]]))


def test_region_area_monotone_under_inclusion():
    small = PBall(2.0, scale=0.9)
    big = unit_disk()
    T = np.array([[0.0, -0.2], [0.3, 0.15], [-0.25, 0.2]])
    kw = dict(warp=False, uniform_depth=2, max_depth=2, n_dirs=32, tol=1.0)
    assert region_area(big, T, **kw).value <= region_area(small, T, **kw).value


def test_quadrature_estimate_roundtrip():
    est = QuadratureEstimate(value=1.5, error_bound=0.01, depth=3, diverged=False)
    blob = est.to_jsonable()
    back = QuadratureEstimate.from_jsonable(blob)
    assert back == est
