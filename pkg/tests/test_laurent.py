import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bakermodel.fields import build_field
from bakermodel.lattice import LatticeError, delta_of_beta, newton_polygon
from bakermodel.laurent import (
    LaurentError,
    MultiLaurent,
    ParseError,
    evaluate_y0,
    face_restriction,
    monomial_substitute,
    ord_v,
    parse_polynomial,
    render,
    shift_substitute,
)
from bakermodel.unipoly import UniPoly, roots_in_closure

F2, F3, F4, F5 = build_field(2, 1), build_field(3, 1), build_field(2, 2), build_field(5, 1)
XY = ("X", "Y")


def L(text, T, names=("x", "y")):
    return parse_polynomial(text, T, names)


def test_parse_and_render():
    f = L("(x^2+1)^2 + y - y^3", F3)
    assert render(f) == "x^4 + 2*x^2 + 2*y^3 + y + 1"
    assert L("2x y", F5) == L("2*x*y", F5)
    assert L("-x", F5) == L("4*x", F5)
    assert set(L("x^2*y^-1", F5).support()) == {(2, -1)}
    assert render(L("t*x + 1", F4)) == "t*x + 1"


@pytest.mark.parametrize("text,pos", [("x^2+*y", 4), ("(x+1", 4), ("x^", 2), ("x$y", 1), ("(x+y)^-1", 7)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        L(text, F5)
    assert info.value.position == pos
    assert f"position {pos}" in str(info.value)


def test_generator_symbol_needs_extension():
    with pytest.raises(ParseError):
        L("t*x", F5)


def test_ord_v_examples():
    f = L("x^4+1+y^2+y^3", F2)
    assert ord_v(f, (0, 1)) == 0
    assert ord_v(f, (-3, -4)) == -12
    assert ord_v(L("x^2*y^-1", F5), (3, 7)) == 6 - 7
    with pytest.raises(LaurentError):
        ord_v(MultiLaurent(F5, ("x", "y"), {}), (1, 1))


def test_face_restriction():
    f = L("x^4+1+y^2+y^3", F2)
    P = newton_polygon(f.support())
    bottom = next(e for e in P.edges if e.normal == (0, 1))
    assert face_restriction(f, bottom) == L("x^4+1", F2)
    assert face_restriction(f, (4, 0)) == L("x^4", F2)
    g = L("x+y+1", F5)
    for e in newton_polygon(g.support()).edges:
        assert len(face_restriction(g, e).terms) == 2


def test_monomial_substitute_examples():
    f = L("X^4+Y^2+Y^3", F2, XY)
    F, nX, nY = monomial_substitute(f, (0, 1), ((1, 1), (1, 2)), XY)
    assert (F, nX, nY) == (L("X^2+1+X*Y^2", F2, XY), 2, 4)
    g = L("X^2+(X+1)*Y^2", F2, XY)
    F, nX, nY = monomial_substitute(g, (0, 1), ((1, 0), (1, 1)), XY)
    assert (F, nX, nY) == (L("X^2+X*Y+1", F2, XY), 0, 2)
    h = L("X^3*Y+X*Y^2", F5, XY)
    F, nX, nY = monomial_substitute(h, (0, 1), ((1, 0), (0, 1)), XY)
    assert (F, nX, nY) == (L("X^2+Y", F5, XY), 1, 1)
    with pytest.raises(LatticeError):
        monomial_substitute(h, (0, 1), ((2, 0), (0, 1)), XY)


def test_shift_examples():
    f = L("X^4+1+Y^2+Y^3", F2, XY)
    assert shift_substitute(f, 0, F2.one(1)) == L("X^4+Y^2+Y^3", F2, XY)
    assert shift_substitute(f, 0, F2.zero(1)) == f
    g = L("(X^2+1)^2+Y-Y^3", F3, XY)
    i = next(x for x in F3.elements(2) if x * x == F3.from_int(-1))
    s = shift_substitute(g, 0, i)
    assert s.level == 2
    const = MultiLaurent(F3, XY, {e: c for e, c in s.terms.items() if e[0] == 0})
    assert const == L("Y-Y^3", F3, XY)
    with pytest.raises(LaurentError):
        shift_substitute(L("X^-1+Y", F3, XY), 0, F3.one(1))


def test_shift_with_correction():
    f = L("X-1", F3, XY) * L("X+Y", F3, XY)
    c = UniPoly(F3, 1, [0, 0, 1])  # c(Y) = Y^2
    s = shift_substitute(f, 0, F3.one(1), c, yvar=1)
    expect = L("(X - Y^2)*(X - Y^2 + 1 + Y)", F3, XY)
    assert s == expect


def test_evaluate_y0_examples():
    assert evaluate_y0(L("X^2+X*Y+1", F2, XY)) == UniPoly(F2, 1, [1, 0, 1])
    assert evaluate_y0(L("X^4+1+Y^2+Y^3", F2, XY)) == UniPoly(F2, 1, [1, 1]) ** 4
    assert evaluate_y0(L("Y+3", F5, XY)) == UniPoly(F5, 1, [3])
    with pytest.raises(LaurentError):
        evaluate_y0(L("X^-1+Y", F5, XY))


@st.composite
def laurent_polys(draw, T=F5, lo=-3, hi=4, max_terms=6):
    n = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(n):
        e = (draw(st.integers(lo, hi)), draw(st.integers(lo, hi)))
        terms[e] = T.from_int(draw(st.integers(1, T.p - 1)))
    return MultiLaurent(T, XY, terms)


_unimodular = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(
    lambda b: b != (0, 0) and __import__("math").gcd(*b) == 1).map(lambda b: (delta_of_beta(b), b))


@settings(max_examples=200, deadline=None)
@given(laurent_polys(), laurent_polys(), _unimodular)
def test_substitution_is_multiplicative(f, g, M):
    Ff, _, _ = monomial_substitute(f, (0, 1), M, XY)
    Fg, _, _ = monomial_substitute(g, (0, 1), M, XY)
    Ffg, _, _ = monomial_substitute(f * g, (0, 1), M, XY)
    assert Ffg == Ff * Fg


@settings(max_examples=200, deadline=None)
@given(laurent_polys(), _unimodular)
def test_ord_of_last_row_is_y_order(f, M):
    _, _, nY = monomial_substitute(f, (0, 1), M, XY)
    assert nY == ord_v(f, M[1])


@settings(max_examples=150, deadline=None)
@given(laurent_polys(lo=0), st.integers(0, 4))
def test_shift_round_trip(f, a):
    x = F5.from_int(a)
    assert shift_substitute(shift_substitute(f, 0, x), 0, -x) == f


@settings(max_examples=150, deadline=None)
@given(laurent_polys(), _unimodular, st.integers(-2, 2))
def test_restriction_roots_independent_of_delta(f, M, t):
    (d1, d2), (b1, b2) = M
    M2 = ((d1 + t * b1, d2 + t * b2), (b1, b2))
    A, _, _ = monomial_substitute(f, (0, 1), M, XY)
    B, _, _ = monomial_substitute(f, (0, 1), M2, XY)
    ra = roots_in_closure(evaluate_y0(A), nonzero_only=True)
    rb = roots_in_closure(evaluate_y0(B), nonzero_only=True)
    key = lambda rep: sorted((o.representative.key(), o.multiplicity) for o in rep.orbits)
    assert key(ra) == key(rb)
