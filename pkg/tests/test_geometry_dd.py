"""Ray enumeration for polyhedral cones given by inequality rows."""

from fractions import Fraction

import pytest

from supcone.errors import SizingError
from supcone.geometry import dd
from supcone.geometry.vec import dot, vec


def rays_of(rows, dim, cap=dd.DEFAULT_ROW_CAP):
    return dd.cone_rays([vec(r) for r in rows], dim, cap)


def as_set(rays):
    return {tuple(r) for r in rays}


def test_quadrant() -> None:
    # {y : y1 <= 0, y2 <= 0} has extreme rays -e1, -e2.
    got = as_set(rays_of([(1, 0), (0, 1)], 2))
    assert got == {vec((-1, 0)), vec((0, -1))}


def test_halfplane_has_line() -> None:
    # {y : y2 <= 0} = span{e1} + cone{-e2}: the line shows as a ray pair.
    got = as_set(rays_of([(0, 1)], 2))
    assert vec((0, -1)) in got
    assert vec((1, 0)) in got and vec((-1, 0)) in got


def test_whole_plane() -> None:
    got = as_set(rays_of([], 2))
    # Generators span R^2: check the four axis directions are covered
    # by nonnegative combinations; here the generator set must contain
    # opposite pairs spanning both coordinates.
    assert any(r[0] > 0 for r in got) and any(r[0] < 0 for r in got)
    assert any(r[1] > 0 for r in got) and any(r[1] < 0 for r in got)


def test_origin_only_cone() -> None:
    got = rays_of([(1, 0), (-1, 0), (0, 1), (0, -1)], 2)
    assert got == []


def test_single_ray() -> None:
    # y1 <= 0 and -y1 <= 0 force y1 = 0; with y2 <= 0 the cone is cone{-e2}.
    got = as_set(rays_of([(1, 0), (-1, 0), (0, 1)], 2))
    assert got == {vec((0, -1))}


def test_octant_3d() -> None:
    rows = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    got = as_set(rays_of(rows, 3))
    assert got == {vec((-1, 0, 0)), vec((0, -1, 0)), vec((0, 0, -1))}


def test_rays_satisfy_all_rows() -> None:
    rows = [vec(r) for r in [(2, 1, 0), (-1, 3, 1), (0, 0, 1), (1, -1, 2)]]
    rays = dd.cone_rays(rows, 3)
    assert rays
    for r in rays:
        assert all(dot(row, r) <= 0 for row in rows)


def test_rays_are_primitive_integer() -> None:
    import math

    rows = [vec(r) for r in [("1/2", "1/3"), (0, 1)]]
    rays = dd.cone_rays(rows, 2)
    assert rays
    for r in rays:
        assert all(x.denominator == 1 for x in r)
        assert math.gcd(*(abs(x.numerator) for x in r)) == 1


def test_duplicate_rows_no_effect() -> None:
    a = as_set(rays_of([(1, 0), (0, 1)], 2))
    b = as_set(rays_of([(1, 0), (1, 0), (0, 1), (0, 1)], 2))
    assert a == b


def test_cap_raises_sizing_error() -> None:
    rows = [vec(r) for r in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]]
    with pytest.raises(SizingError):
        dd.cone_rays(rows, 2, cap=1)
