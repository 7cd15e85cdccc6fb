"""Closed-form resolution data for y^s = h(x) with char(k) not dividing s.

The Newton polygon of y^s - h(x) has two slanted edges whose restrictions are
binomials, plus the bottom edge (normal (0, 1)) whose restriction is -h.  One
expansion at each nonzero multiple root r of h suffices: the child chart has
restriction X^* (1 - a_r X^gcd(m_r, s)), a_r = h_r(r), h_r = h / (x - r)^m_r.
"""

import math
from collections import Counter
from dataclasses import dataclass, field

from .fields import minimal_polynomial
from .lattice import delta_of_beta
from .laurent import MultiLaurent
from .resolution import points_at_infinity, run_resolution
from .unipoly import UniPoly, roots_in_closure


class SuperellipticError(ValueError):
    pass


@dataclass
class SuperellipticInput:
    s: int
    h: UniPoly

    def __post_init__(self):
        if self.s < 1:
            raise SuperellipticError("s must be a positive integer")
        if self.h.is_zero():
            raise SuperellipticError("h is zero")
        if self.h.level != 1:
            raise SuperellipticError("h must have coefficients in the base field")
        if self.s % self.h.tower.p == 0:
            raise SuperellipticError(f"the characteristic {self.h.tower.p} divides s = {self.s}")

    @property
    def m0(self):
        return self.h.ord0()

    @property
    def d(self):
        return self.h.degree

    def polynomial(self, names=("x", "y")):
        """f = y^s - h(x)."""
        tower = self.h.tower
        terms = {(0, self.s): tower.one(1)}
        for i, c in enumerate(self.h.coeffs):
            if not c.is_zero():
                terms[(i, 0)] = -c
        return MultiLaurent(tower, names, terms)


@dataclass
class PointRecord:
    """One Frobenius orbit of points at infinity."""

    source_level: int
    residue_degree: int
    path: tuple
    shift_minpoly: UniPoly
    point_minpoly: UniPoly

    def signature(self):
        shift = self.shift_minpoly.key() if self.shift_minpoly is not None else None
        return (self.source_level, self.residue_degree, self.path, shift, self.point_minpoly.key())


@dataclass
class ResolvedRoot:
    root: object
    orbit_size: int
    multiplicity: int
    a_r: object
    beta: tuple
    restriction: UniPoly


@dataclass
class SuperellipticReport:
    input: SuperellipticInput
    edge_points: list = field(default_factory=list)
    horizontal_points: list = field(default_factory=list)
    resolved_points: list = field(default_factory=list)
    resolved_roots: list = field(default_factory=list)
    outer_regular_level: int = 1

    def orbit_table(self):
        return self.edge_points + self.horizontal_points + self.resolved_points

    def total_points(self):
        """Number of points at infinity over the algebraic closure."""
        return sum(p.residue_degree for p in self.orbit_table())


def _primitive(v):
    g = math.gcd(*v)
    return tuple(x // g for x in v)


def _records(u, level, path, shift=None, base_size=1):
    out = []
    for o in roots_in_closure(u, nonzero_only=True).orbits:
        out.append(PointRecord(level, base_size * o.orbit_size, path,
                               shift, minimal_polynomial(o.representative)))
    return out


def analyze(inp):
    h, s = inp.h, inp.s
    tower = h.tower
    m0, d = inp.m0, inp.d
    rep = SuperellipticReport(inp)
    one = tower.one(1)
    c_m0, c_d = h.coeff(m0), h.coeff(d)
    # slanted edges: -c_m0 X^l + 1 and X^l - c_d
    l1, l2 = math.gcd(m0, s), math.gcd(d, s)
    u1 = UniPoly(tower, 1, [one] + [0] * (l1 - 1) + [-c_m0])
    u2 = UniPoly(tower, 1, [-c_d] + [0] * (l2 - 1) + [one])
    rep.edge_points += _records(u1, 1, (_primitive((s, m0)),))
    rep.edge_points += _records(u2, 1, (_primitive((-s, -d)),))
    if m0 == d:
        return rep
    bottom = (0, 1)
    report = roots_in_closure(h, nonzero_only=True)
    for o in report.simple():
        rep.horizontal_points.append(PointRecord(1, o.orbit_size, (bottom,), None,
                                                 minimal_polynomial(o.representative)))
    for o in report.multiple():
        r, m = o.representative, o.multiplicity
        h_r = h.embed(r.level)
        lin = UniPoly(tower, r.level, [-r, one])
        h_r = h_r.exact_div(lin ** m)
        a_r = h_r(r)
        s_r = math.gcd(m, s)
        beta = _primitive((s, m))
        u = UniPoly(tower, r.level, [one] + [0] * (s_r - 1) + [-a_r])
        rep.resolved_roots.append(ResolvedRoot(r, o.orbit_size, m, a_r, beta, u))
        rep.resolved_points += _records(u, 2, (bottom, beta), minimal_polynomial(r), r.level)
        rep.outer_regular_level = 2
    return rep


@dataclass
class DescentChart:
    """Chart over the base field gluing the charts of all conjugates of r."""

    g: UniPoly
    h_g: UniPoly
    m_r: int
    s_r: int
    beta: tuple
    delta: tuple
    generators: list


def chart_descent(inp, r):
    h, s = inp.h, inp.s
    tower = h.tower
    g = minimal_polynomial(r)
    m = 0
    rest = h
    while g.divides(rest):
        rest = rest.exact_div(g)
        m += 1
    if m < 2:
        raise SuperellipticError("r is not a multiple root of h")
    s_r = math.gcd(m, s)
    beta = _primitive((s, m))
    delta = delta_of_beta(beta)
    names = ("X1", "X2", "Y")

    def in_x1(u):
        return MultiLaurent(tower, names, {(i, 0, 0): c for i, c in enumerate(u.coeffs) if not c.is_zero()})

    binomial = MultiLaurent(tower, names, {(0, delta[0], beta[0]): tower.one(1)}) - in_x1(g)
    relation = MultiLaurent.constant(tower, names, tower.one(1)) - in_x1(rest).times_monomial((0, s_r, 0))
    return DescentChart(g, rest, m, s_r, beta, delta, [binomial, relation])


def generic_table(inp, forest=None):
    """Point records computed by the generic chart engine."""
    if forest is None:
        forest = run_resolution(inp.polynomial())
    index = forest._index()
    out = []
    for orbit in points_at_infinity(forest):
        node_id, root = orbit.members[0]
        node = index[node_id]
        path, shift, cur = [], None, node
        while cur is not None:
            path.append(cur.beta)
            if cur.parent is not None and shift is None:
                shift = minimal_polynomial(cur.root)
            cur = index[cur.parent] if cur.parent is not None else None
        out.append(PointRecord(node.level, orbit.residue_degree, tuple(reversed(path)), shift,
                               minimal_polynomial(root)))
    return out, forest


@dataclass
class CrossCheck:
    match: bool
    closed_form_level: int
    generic_level: int
    only_closed_form: list
    only_generic: list


def cross_check(inp):
    rep = analyze(inp)
    table, forest = generic_table(inp)
    generic_level = forest.max_level if forest.terminated else None
    a = Counter(p.signature() for p in rep.orbit_table())
    b = Counter(p.signature() for p in table)
    only_a = sorted((a - b).elements(), key=repr)
    only_b = sorted((b - a).elements(), key=repr)
    ok = not only_a and not only_b and generic_level == rep.outer_regular_level
    return CrossCheck(ok, rep.outer_regular_level, generic_level, only_a, only_b)
