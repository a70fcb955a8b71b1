from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from eqpayoffs.core import Polytope, RectangleUnion
from eqpayoffs.geometry import (
    DistanceBound,
    Direction,
    GeometryError,
    affine_dimension,
    canonical_directions_2d,
    convex_hull,
    directed_distance,
    epsilon_close,
    extreme_points,
    halfspaces,
    hausdorff_distance,
    hull_2d,
    polygon_from_halfplanes,
    polytope_contains,
    polytope_equal,
    polytope_subset,
    rectangle_union_canonicalize,
    rectangle_union_equal,
    rectangle_union_subset,
    support_function,
)

coord = st.fractions(min_value=-6, max_value=6, max_denominator=4)
pt = st.tuples(coord, coord)


def test_hull_drops_interior_and_collinear_points():
    pts = [(0, 0), (2, 0), (1, 0), (2, 2), (0, 2), (1, 1)]
    assert sorted(hull_2d(pts)) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert extreme_points([(0, 0), (1, 1), (2, 2)]) == [(0, 0), (2, 2)]


def test_three_dimensional_hull():
    cube = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    p = convex_hull(cube + [(Fraction(1, 2),) * 3])
    assert len(p.vertices) == 8
    assert polytope_contains(p, (Fraction(1, 3), 1, 0))
    assert not polytope_contains(p, (2, 0, 0))
    with pytest.raises(GeometryError):
        convex_hull([(0, 0, 0, 0)])


def test_halfspaces_of_a_triangle():
    eqs, ineqs = halfspaces(Polytope(((0, 0), (1, 0), (0, 1))))
    assert eqs == ()
    assert len(ineqs) == 3
    for a, b in ineqs:
        assert all(a[0] * x + a[1] * y <= b for x, y in [(0, 0), (1, 0), (0, 1)])


def test_segment_has_an_equation():
    eqs, ineqs = halfspaces(Polytope(((1, 2), (3, 4))))
    assert len(eqs) == 1 and len(ineqs) == 2
    assert affine_dimension([(1, 2), (3, 4)]) == 1


def test_polygon_from_halfplanes():
    sq = polygon_from_halfplanes([((1, 0), 1), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)])
    assert sq.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))
    with pytest.raises(GeometryError):
        polygon_from_halfplanes([((1, 0), 1)])


def test_canonical_directions():
    dirs = canonical_directions_2d()
    assert len(dirs) == 16
    assert len({d.vector for d in dirs}) == 16
    assert Direction((-2, 1)).vector == (-1, Fraction(1, 2))
    assert Direction((0, -3)).vector == (0, -1)
    with pytest.raises(GeometryError):
        Direction((0, 0))


def test_polytope_relations():
    big = Polytope(((0, 0), (4, 0), (0, 4)))
    small = Polytope(((1, 1), (2, 1)))
    assert polytope_subset(small, big) and not polytope_subset(big, small)
    assert polytope_equal(big, Polytope(((4, 0), (0, 0), (0, 4), (1, 1))))


def test_rectangle_unions():
    u = RectangleUnion(((0, 2, 0, 2), (1, 1, 1, 1), (2, 3, 0, 1)))
    canon = rectangle_union_canonicalize(u)
    assert canon.rectangles == ((0, 2, 0, 2), (2, 3, 0, 1))
    # same set written differently
    split = RectangleUnion(((0, 1, 0, 2), (1, 2, 0, 2), (2, 3, 0, 1)))
    assert rectangle_union_equal(u, split)
    assert rectangle_union_subset(RectangleUnion(((Fraction(1, 2), 1, 0, 2),)), u)
    assert not rectangle_union_subset(RectangleUnion(((0, 3, 0, 2),)), u)


def test_hausdorff_examples():
    assert hausdorff_distance([(0, 0)], [(1, 0)]) == 1
    seg = Polytope(((0, 0), (2, 0)))
    assert hausdorff_distance(seg, [(1, 0)]) == 1
    assert directed_distance([(1, 0)], seg) == 0
    tri = Polytope(((0, 0), (4, 0), (0, 4)))
    assert hausdorff_distance(tri, tri) == 0
    u = RectangleUnion(((0, 1, 0, 1), (3, 4, 0, 1)))
    assert directed_distance(Polytope(((0, 0), (4, 0))), u) == 1
    assert directed_distance(u, Polytope(((0, 0), (4, 0)))) == 1


def test_epsilon_close_is_strict():
    assert not epsilon_close([(0, 0)], [(1, 0)], 1)
    assert epsilon_close([(0, 0)], [(1, 0)], Fraction(11, 10))


def test_distance_bound_shape():
    b = DistanceBound(Fraction(1), Fraction(2))
    assert b.lower <= b.upper


# -- oracles -----------------------------------------------------------------


def point_to_polygon(x, verts):
    """Max-norm distance from x to conv(verts) by edge breakpoints."""
    poly = Polytope(tuple(verts))
    if polytope_contains(poly, x):
        return Fraction(0)
    ring = hull_2d(poly.vertices)
    cand = list(ring)
    edges = list(zip(ring, ring[1:] + ring[:1])) if len(ring) > 1 else []
    for p, q in edges:
        dx, dy = q[0] - p[0], q[1] - p[1]
        # t where (p + t d - x) has a zero coordinate or equal |coordinates|
        eqs = []
        if dx:
            eqs.append((x[0] - p[0]) / dx)
        if dy:
            eqs.append((x[1] - p[1]) / dy)
        for s in (1, -1):
            den = dx - s * dy
            if den:
                eqs.append(((x[0] - p[0]) - s * (x[1] - p[1])) / den)
        for t in eqs:
            if 0 <= t <= 1:
                cand.append((p[0] + t * dx, p[1] + t * dy))
    return min(max(abs(x[0] - c[0]), abs(x[1] - c[1])) for c in cand)


@given(st.lists(pt, min_size=1, max_size=5), st.lists(pt, min_size=1, max_size=5))
def test_hausdorff_matches_breakpoint_oracle(a, b):
    pa, pb = Polytope(tuple(a)), Polytope(tuple(b))
    expected = max(max(point_to_polygon(v, pb.vertices) for v in pa.vertices),
                   max(point_to_polygon(v, pa.vertices) for v in pb.vertices))
    assert hausdorff_distance(pa, pb) == expected


@given(st.lists(pt, min_size=1, max_size=6))
def test_hull_contains_inputs_and_vertices_are_extreme(points):
    p = Polytope(tuple(points))
    assert all(polytope_contains(p, x) for x in points)
    for v in p.vertices:
        others = [w for w in p.vertices if w != v]
        if others:
            assert not polytope_contains(Polytope(tuple(others)), v)


@given(st.lists(pt, min_size=1, max_size=6), pt)
def test_support_function_is_max_over_vertices(points, d):
    assume(d != (0, 0))
    p = Polytope(tuple(points))
    assert support_function(p, d) == max(d[0] * x + d[1] * y for x, y in points)


@given(st.lists(st.tuples(coord, coord, coord, coord), min_size=1, max_size=3), pt)
def test_distance_to_rectangle_union_is_min_box_distance(rects, x):
    rects = [(min(a, b), max(a, b), min(c, d), max(c, d)) for a, b, c, d in rects]
    u = RectangleUnion(tuple(rects))
    expected = min(max(a - x[0], x[0] - b, c - x[1], x[1] - d, 0) for a, b, c, d in rects)
    assert directed_distance([x], u) == expected
