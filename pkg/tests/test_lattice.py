import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bakermodel.lattice import (
    LatticeError,
    compose_block,
    convex_hull,
    delta_of_beta,
    det,
    interior_lattice_count,
    inverse_unimodular,
    mat_mul,
    matrix_attached,
    newton_polygon,
)


def jarvis_hull(points):
    """Gift-wrapping hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    start = pts[0]
    hull, cur = [], start
    while True:
        hull.append(cur)
        cand = None
        for q in pts:
            if q == cur:
                continue
            if cand is None:
                cand = q
                continue
            cr = (cand[0] - cur[0]) * (q[1] - cur[1]) - (cand[1] - cur[1]) * (q[0] - cur[0])
            far = math.dist(cur, q) > math.dist(cur, cand)
            if cr < 0 or (cr == 0 and far):
                cand = q
        cur = cand
        if cur == start:
            break
    return hull


def brute_interior(points):
    hull = jarvis_hull(points)
    if len(hull) < 3:
        return 0
    xs, ys = [p[0] for p in hull], [p[1] for p in hull]
    count = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            inside = True
            for k in range(len(hull)):
                a, b = hull[k], hull[(k + 1) % len(hull)]
                if (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]) <= 0:
                    inside = False
                    break
            count += inside
    return count


def test_triangle_polygon():
    P = newton_polygon([(0, 0), (4, 0), (0, 3), (2, 0), (0, 1)])
    assert P.vertices == ((0, 0), (4, 0), (0, 3))
    assert [e.normal for e in P.edges] == [(0, 1), (-3, -4), (1, 0)]
    assert [e.lattice_length for e in P.edges] == [4, 1, 3]
    assert interior_lattice_count(P) == 3
    assert P.edges[0].lattice_points == tuple((i, 0) for i in range(5))


def test_edges_vanish_and_are_nonnegative():
    P = newton_polygon([(4, 0), (0, 2), (0, 3), (2, 1)])
    for e in P.edges:
        assert all(e.form(pt) == 0 for pt in e.lattice_points)
        assert all(e.form(v) >= 0 for v in P.vertices)
        a, b = e.normal
        assert math.gcd(a, b) == 1
    assert (1, 2) in [e.normal for e in P.edges]


def test_segment_and_point():
    S = newton_polygon([(0, 2), (2, 0)])
    assert S.dim == 1 and len(S.edges) == 2
    assert S.edges[0].normal == (-S.edges[1].normal[0], -S.edges[1].normal[1])
    assert interior_lattice_count(S) == 0
    pt = newton_polygon([(3, 4)])
    assert pt.dim == 0 and pt.edges == ()
    with pytest.raises(LatticeError):
        newton_polygon([])


def test_delta_examples():
    assert delta_of_beta((0, 1)) == (1, 0)
    assert delta_of_beta((1, 0)) == (0, -1)
    assert delta_of_beta((-3, -4)) == (2, 3)
    with pytest.raises(LatticeError):
        delta_of_beta((2, 4))
    assert delta_of_beta((1, 2), {(1, 2): (1, 1)}) == (1, 1)
    with pytest.raises(LatticeError):
        delta_of_beta((1, 2), {(1, 2): (1, 5)})


def test_matrix_attached_examples():
    assert matrix_attached((1, 0)) == ((0, -1), (1, 0))
    assert matrix_attached((0, 0, 1)) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for v in [(2, 3, 5), (0, 6, 35), (-4, 9, 0, 7)]:
        M = matrix_attached(v)
        assert det(M) == 1 and M[-1] == v
    with pytest.raises(LatticeError):
        matrix_attached((2, 4, 6))


def test_compose_block_example():
    assert compose_block(((1, 1), (1, 2)), ((1, 0, 0), (0, 1, 0), (0, 0, 1))) == (
        (1, 0, 0), (0, 1, 1), (0, 1, 2))
    with pytest.raises(LatticeError):
        compose_block(((1, 0), (0, 1)), ((1,),))


def test_inverse_unimodular():
    M = ((2, 3), (-3, -4))
    assert mat_mul(M, inverse_unimodular(M)) == ((1, 0), (0, 1))
    with pytest.raises(LatticeError):
        inverse_unimodular(((2, 0), (0, 1)))


_points = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=12)


@settings(max_examples=300, deadline=None)
@given(_points)
def test_pick_count_matches_enumeration(pts):
    P = newton_polygon(pts)
    assert interior_lattice_count(P) == brute_interior(pts)
    if P.dim == 2:
        assert list(P.vertices) == jarvis_hull(pts)
        assert list(convex_hull(pts)) == jarvis_hull(pts)


@settings(max_examples=300, deadline=None)
@given(_points)
def test_edge_walk_covers_boundary(pts):
    P = newton_polygon(pts)
    for e in P.edges:
        a, b = e.normal
        p0 = e.lattice_points[0]
        for r, pt in enumerate(e.lattice_points):
            assert pt == (p0[0] + r * b, p0[1] - r * a)
        assert e.lattice_points[-1] == e.endpoints[1]
        assert all(e.form(q) >= 0 for q in pts)


@settings(max_examples=300, deadline=None)
@given(st.tuples(st.integers(-30, 30), st.integers(-30, 30)).filter(lambda v: math.gcd(*v) == 1))
def test_delta_completes_beta(beta):
    d = delta_of_beta(beta)
    assert d[0] * beta[1] - d[1] * beta[0] == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=5).filter(lambda v: math.gcd(*v) == 1))
def test_matrix_attached_property(v):
    M = matrix_attached(tuple(v))
    assert det(M) == 1 and list(M[-1]) == v
