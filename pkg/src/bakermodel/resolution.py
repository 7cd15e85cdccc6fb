"""Iterated Newton-polygon chart resolution of a torus curve f = 0.

Level-1 charts come from the edges of the Newton polygon.  A chart whose
restriction f|_chart (its defining polynomial at Y = 0) has a nonzero multiple
root a is expanded: shift X -> X + a, draw the Newton polygon of the shifted
polynomial and open one child chart per edge whose normal has both entries
positive.  All charts are expanded simultaneously, one level per iteration,
until no restriction has an unexpanded nonzero multiple root.

Conjugate roots are expanded separately with identical matrix choices, so the
q-power Frobenius permutes the charts; galois_orbits audits that property and
points_at_infinity groups the simple roots into Frobenius orbits.
"""

from dataclasses import dataclass, field

from .fields import lcm_levels
from .lattice import (
    check_attached,
    compose_block,
    delta_of_beta,
    interior_lattice_count,
    inverse_unimodular,
    mat_vec,
    newton_polygon,
)
from .laurent import (
    LaurentError,
    MultiLaurent,
    evaluate_y0,
    from_unipoly,
    monomial_substitute,
    shift_substitute,
)
from .unipoly import UniPoly, gcd, nonzero_root_multiplicity, roots_in_closure

DEFAULT_MAX_ITERATIONS = 64
MODES = ("algorithm1", "full-charts")


class ResolutionError(ValueError):
    pass


class PreconditionError(ResolutionError):
    pass


class GuardExceeded(ResolutionError):
    pass


# -- torus smoothness ---------------------------------------------------------------

def _as_polynomial(f):
    g, _ = f.strip_content()
    if g.is_monomial():
        raise LaurentError("a monomial defines the empty curve in the torus")
    return g


def _y_coeffs(P):
    """P in k[x, y] as a list over the y-degree of UniPolys in x."""
    dy = P.degree_in(1)
    dx = P.degree_in(0)
    z = P.tower.zero(P.level)
    rows = [[z] * (dx + 1) for _ in range(dy + 1)]
    for (i, j), c in P.terms.items():
        rows[j][i] = c
    return [UniPoly(P.tower, P.level, r) for r in rows]


def resultant_y(P, Q):
    """Res_y(P, Q) in k[x] through a fraction-free Sylvester determinant."""
    a, b = _y_coeffs(P), _y_coeffs(Q)
    m, n = len(a) - 1, len(b) - 1
    zero = UniPoly(P.tower, P.level, [])
    if m == 0 and n == 0:
        return UniPoly(P.tower, P.level, [1])
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(a)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(b)):
            row[i + k] = c
        rows.append(row)
    return _bareiss(rows, P.tower, P.level)


def _bareiss(A, tower, level):
    n = len(A)
    if n == 0:
        return UniPoly(tower, level, [1])
    A = [list(r) for r in A]
    sign = 1
    prev = UniPoly(tower, level, [1])
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return UniPoly(tower, level, [])
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    det = A[n - 1][n - 1]
    return det if sign > 0 else -det


@dataclass
class SmoothnessResult:
    smooth: bool
    witnesses: list = field(default_factory=list)


def _univariate_singular(u):
    """Torus points (x0, 1) where a polynomial in one variable has a multiple root."""
    return [o.representative for o in roots_in_closure(u, nonzero_only=True).multiple()]


def _witnesses_at(g, gx, gy, x0):
    polys = [P.specialize(1, {0: x0}) if not P.is_zero() else None for P in (g, gx, gy)]
    h = None
    for P in polys:
        if P is None:
            continue
        h = P if h is None else gcd(h, P)
    if h is None or h.is_zero():
        return [x0.tower.one(1)]
    if h.degree < 1:
        return []
    return [o.representative for o in roots_in_closure(h, nonzero_only=True).orbits]


def smoothness_check(f):
    """Common zeros of f, x f_x, y f_y in the torus, as orbit representatives."""
    g = _as_polynomial(f)
    tower = g.tower
    if g.degree_in(1) == 0:
        u = g.specialize(0, {1: tower.one(1)})
        return SmoothnessResult(False, [(x, tower.one(1)) for x in _univariate_singular(u)]) \
            if _univariate_singular(u) else SmoothnessResult(True)
    if g.degree_in(0) == 0:
        u = g.specialize(1, {0: tower.one(1)})
        ys = _univariate_singular(u)
        return SmoothnessResult(not ys, [(tower.one(1), y) for y in ys])
    swap = g.degree_in(0) < g.degree_in(1)
    if swap:
        # eliminate the variable of smaller degree
        g = g.map_exponents(lambda e: (e[1], e[0]), (g.names[1], g.names[0]))
    gx, gy = g.derivative(0), g.derivative(1)
    R = None
    for Q in (gx, gy):
        if not Q.is_zero():
            r = resultant_y(g, Q)
            if not r.is_zero():
                R = r if R is None else gcd(R, r)
    if R is None:
        for Q in _combined_partners(g, gx, gy):
            r = resultant_y(g, Q)
            if not r.is_zero():
                R = r
                break
    if R is None:
        # f shares a factor with both partials: singular along a curve
        witnesses = [_point_on_singular_component(g, gx, gy)]
    else:
        witnesses = []
        if R.degree >= 1:
            for o in roots_in_closure(R, nonzero_only=True).orbits:
                for y0 in _witnesses_at(g, gx, gy, o.representative):
                    witnesses.append((o.representative, y0))
    if swap:
        witnesses = [(y, x) for x, y in witnesses]
    return SmoothnessResult(not witnesses, witnesses)


def _combined_partners(g, gx, gy):
    """gx + c*gy for enough constants c to force a nonzero resultant unless
    f, f_x, f_y share a factor of positive y-degree."""
    if gx.is_zero() or gy.is_zero():
        return
    tower = g.tower
    count, need = 0, g.degree_in(1) + 2
    level = 1
    while count < need:
        for c in tower.elements(level):
            if c.is_zero() or (level > 1 and c.normalize().level < level):
                continue
            Q = gx + gy * c
            if not Q.is_zero():
                count += 1
                yield Q
            if count >= need:
                return
        level += 1


def _point_on_singular_component(g, gx, gy):
    tower = g.tower
    level = 1
    while level <= 12:
        for x0 in tower.elements(level):
            if x0.is_zero():
                continue
            ys = _witnesses_at(g, gx, gy, x0)
            if ys:
                return (x0.normalize(), ys[0])
        level += 1
    raise ResolutionError("no point found on the singular component")


# -- nondegeneracy ----------------------------------------------------------------

def edge_restriction(f, edge):
    """sum_r c_{p_r} X^r over the ordered lattice points of an edge."""
    z = f.tower.zero(f.level)
    return UniPoly(f.tower, f.level, [f.coeff(pt) if pt in f._t else z for pt in edge.lattice_points])


@dataclass
class NondegeneracyResult:
    nondegenerate: bool
    smooth: bool
    failing_faces: list = field(default_factory=list)


def nondegeneracy_check(f):
    sm = smoothness_check(f)
    failing = []
    if not sm.smooth:
        failing.append({"face": "interior", "witnesses": sm.witnesses})
    P = newton_polygon(f.support())
    for k, e in enumerate(P.edges):
        u = edge_restriction(f, e)
        if gcd(u, u.derivative()).degree >= 1:
            mult = [(o.representative, o.multiplicity) for o in roots_in_closure(u, True).multiple()]
            failing.append({"face": "edge", "index": k, "normal": e.normal, "multiple_roots": mult})
    return NondegeneracyResult(not failing, sm.smooth, failing)


# -- chart nodes --------------------------------------------------------------------

@dataclass
class ChartNode:
    id: str
    level: int
    parent: str = None
    edge_index: int = None
    root: object = None
    beta: tuple = None
    delta: tuple = None
    j: int = 1
    F: MultiLaurent = None
    f_restrict: UniPoly = None
    excluded: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    matrix: tuple = None
    generators: list = None
    correction: UniPoly = None
    shifted: MultiLaurent = None
    _roots: object = field(default=None, repr=False)

    def root_report(self):
        if self._roots is None:
            self._roots = roots_in_closure(self.f_restrict, nonzero_only=True)
        return self._roots

    @property
    def excluded_roots(self):
        return [r for r, _ in sorted(self.excluded.values(), key=lambda t: t[0].key())]

    def multiple_roots(self, upto_level=None):
        """Unexpanded nonzero multiple roots (all conjugates) with multiplicities."""
        out = []
        for o in self.root_report().multiple():
            for r in o.conjugates:
                ex = self.excluded.get(r.key())
                if ex is None or (upto_level is not None and ex[1] > upto_level):
                    out.append((r, o.multiplicity))
        return sorted(out, key=lambda t: t[0].key())

    def simple_roots(self):
        out = []
        for o in self.root_report().simple():
            out.extend(o.conjugates)
        return sorted(out, key=lambda r: r.key())


def _matrix_for(beta, delta_overrides, matrix_overrides):
    beta = tuple(beta)
    if matrix_overrides and beta in matrix_overrides:
        M = tuple(tuple(r) for r in matrix_overrides[beta])
        check_attached(M, beta)
        return M
    return (delta_of_beta(beta, delta_overrides), beta)


def _check_restriction(F_child, shifted, edge, M, nX):
    """f|_chart = X^d * sum_r c_r X^r with d = <delta, p_0> - nX."""
    restr = evaluate_y0(F_child)
    delta = M[0]
    p0 = edge.lattice_points[0]
    d = delta[0] * p0[0] + delta[1] * p0[1] - nX
    base = edge_restriction(shifted, edge)
    expect = UniPoly(base.tower, base.level, [0] * d + base.coeffs)
    if restr != expect:
        raise ResolutionError("restriction disagrees with the ordered edge coefficients")
    return restr


def _level_one_nodes(f, P, mode, delta_overrides, matrix_overrides):
    nodes = []
    for k, e in enumerate(P.edges):
        M = _matrix_for(e.normal, delta_overrides, matrix_overrides)
        F, nX, _ = monomial_substitute(f, (0, 1), M, ("X1", "Y"))
        restr = _check_restriction(F, f, e, M, nX)
        node = ChartNode(id=f"E{k + 1}", level=1, edge_index=k, beta=tuple(e.normal), delta=tuple(M[0]),
                         j=1, F=F, f_restrict=restr)
        if mode == "full-charts":
            node.matrix = M
            node.generators = []
        nodes.append(node)
    return nodes


def expand_node(node, a, mode="algorithm1", delta_overrides=None, matrix_overrides=None, level=None):
    """Children of `node` at the nonzero multiple root `a` of its restriction."""
    if a.is_zero():
        raise ResolutionError("expansion at the zero root")
    mult = nonzero_root_multiplicity(node.f_restrict, a)
    if mult < 2:
        raise ResolutionError("expansion root is not a multiple root")
    if a.key() in node.excluded:
        raise ResolutionError("expansion root was already expanded")
    a = a.normalize()
    F = node.F
    tower = F.tower
    # Choose G~ = X - a, or X - a + Y^(deg_Y F + 1) when X - a divides F.
    correction = None
    if F.specialize(1, {0: a}).is_zero():
        correction = UniPoly(tower, 1, [0] * (F.degree_in(1) + 1) + [1])
    shifted = shift_substitute(F, 0, a, correction, yvar=1)
    P = newton_polygon(shifted.support())
    edges = sorted((e for e in P.edges if e.normal[0] > 0 and e.normal[1] > 0), key=lambda e: e.normal)
    if not edges:
        raise ResolutionError("expansion produced no chart")  # excluded by the multiple-root precondition
    m = node.j
    child_level = (level if level is not None else node.level + 1)
    names = (f"X{m + 1}", "Y")
    children = []
    for e in edges:
        M = _matrix_for(e.normal, delta_overrides, matrix_overrides)
        Fc, nX, _ = monomial_substitute(shifted, (0, 1), M, names)
        restr = _check_restriction(Fc, shifted, e, M, nX)
        child = ChartNode(id=f"{node.id}.{len(node.children) + len(children) + 1}", level=child_level,
                          parent=node.id, root=a, beta=tuple(e.normal), delta=tuple(M[0]), j=m + 1,
                          F=Fc, f_restrict=restr, correction=correction, shifted=shifted)
        if mode == "full-charts":
            child.matrix, child.generators = _full_chart_data(node, a, correction, M)
        children.append(child)
    return children


def _full_chart_data(node, a, correction, M_beta):
    """Matrix M_gamma and ideal generators of a child chart."""
    m = node.j
    M_alpha = node.matrix
    tower = node.F.tower
    names = tuple(f"X{i + 1}" for i in range(m)) + ("Y",)
    # G~_p = X_m - a + c(Y) in the chart variables of the parent
    Gt = MultiLaurent.variable(tower, names, m - 1) - a
    if correction is not None:
        Gt = Gt + from_unipoly(correction, names, m)
    # g_p: G~_p written in the original torus variables, content removed
    M_inv = inverse_unimodular(M_alpha)
    us = [mat_vec(M_inv, e) for e in Gt.support()]
    s = [min(u[i] for u in us) for i in range(m + 1)]
    col = [-x for x in mat_vec(M_alpha, s)]   # (n_1, ..., n_m, ord_v(g_p))
    n = m + 2

    def old(i):
        return i if i < m else i - 1

    M_ap = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            if r == m:
                M_ap[r][c] = 1 if c == m else 0
            elif c == m:
                M_ap[r][c] = col[old(r)]
            else:
                M_ap[r][c] = M_alpha[old(r)][old(c)]
    M_ap = tuple(tuple(r) for r in M_ap)
    M_gamma = compose_block(M_beta, M_ap)
    beta = M_beta[1]
    v = M_alpha[-1]
    expect_last = tuple(x * beta[1] for x in v[:m]) + (beta[0] + col[-1] * beta[1], v[m] * beta[1])
    check_attached(M_gamma, expect_last)
    # generators: old ones and G~_p pushed through I_m (+) M_beta
    new_names = tuple(f"X{i + 1}" for i in range(m + 1)) + ("Y",)
    (d1, d2), (b1, b2) = M_beta

    def push(P):
        Q = P.insert_variable(m, "Xt")

        def fn(e):
            e = list(e)
            u, w = e[m], e[m + 1]
            e[m], e[m + 1] = d1 * u + d2 * w, b1 * u + b2 * w
            return e

        return Q.map_exponents(fn, new_names)

    gens = [push(G) for G in node.generators]
    lead = [0] * (m + 2)
    lead[m], lead[m + 1] = d1, b1
    gens.append(MultiLaurent(tower, new_names, {tuple(lead): 1}) - push(Gt))
    return M_gamma, gens


# -- the forest -----------------------------------------------------------------------

@dataclass
class ResolutionForest:
    tower: object
    input: MultiLaurent
    polygon: object
    mode: str
    nodes: list
    iterations: int = 0
    terminated: bool = False
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    delta_overrides: dict = None
    matrix_overrides: dict = None

    def node(self, node_id):
        return self._index()[node_id]

    def _index(self):
        return {n.id: n for n in self.nodes}

    @property
    def max_level(self):
        return 1 + self.iterations

    def levels(self):
        out = {}
        for n in self.nodes:
            out.setdefault(n.level, []).append(n.id)
        return out

    def pending(self):
        return [(n, r) for n in self.nodes for r, _ in n.multiple_roots()]

    def step(self):
        """Expand every chart at each unexpanded nonzero multiple root, simultaneously."""
        todo = self.pending()
        if not todo:
            self.terminated = True
            return False
        new_level = self.max_level + 1
        created = []
        for node, a in todo:
            kids = expand_node(node, a, self.mode, self.delta_overrides, self.matrix_overrides, new_level)
            node.children.extend(k.id for k in kids)
            node.excluded[a.key()] = (a, new_level)
            created.extend(kids)
        self.nodes.extend(created)
        self.iterations += 1
        self.terminated = not self.pending()
        return True


def build_sigma1(f, mode="algorithm1", delta_overrides=None, matrix_overrides=None,
                 max_iterations=DEFAULT_MAX_ITERATIONS):
    if mode not in MODES:
        raise PreconditionError(f"unknown mode {mode!r}")
    P = newton_polygon(f.support())
    nodes = _level_one_nodes(f, P, mode, delta_overrides, matrix_overrides)
    forest = ResolutionForest(f.tower, f, P, mode, nodes, 0, False, max_iterations,
                              dict(delta_overrides or {}), dict(matrix_overrides or {}))
    forest.terminated = not forest.pending()
    return forest


def run_resolution(f, mode="algorithm1", max_iterations=DEFAULT_MAX_ITERATIONS, delta_overrides=None,
                   matrix_overrides=None, check_smooth=True):
    if check_smooth:
        sm = smoothness_check(f)
        if not sm.smooth:
            raise PreconditionError("the curve is singular in the torus")
    forest = build_sigma1(f, mode, delta_overrides, matrix_overrides, max_iterations)
    while not forest.terminated and forest.iterations < max_iterations:
        forest.step()
    return forest


# -- Galois action ----------------------------------------------------------------------

@dataclass
class GaloisAudit:
    sigma: dict
    orbits: list
    ok: bool
    failures: list


def galois_orbits(forest):
    index = forest._index()
    by_key = {}
    for n in forest.nodes:
        if n.parent is not None:
            by_key[(n.parent, n.root.key(), n.beta)] = n.id
    sigma, failures = {}, []
    for n in forest.nodes:
        if n.parent is None:
            sigma[n.id] = n.id
            continue
        img = by_key.get((sigma[n.parent], n.root.frobenius().key(), n.beta))
        if img is None:
            failures.append((n.id, "no conjugate chart"))
            sigma[n.id] = n.id
            continue
        sigma[n.id] = img
    for n in forest.nodes:
        other = index[sigma[n.id]]
        if n.F.frobenius() != other.F.rename(n.F.names):
            failures.append((n.id, "defining polynomial is not the Frobenius image"))
    seen, orbits = set(), []
    for n in forest.nodes:
        if n.id in seen:
            continue
        orbit, cur = [], n.id
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = sigma[cur]
        orbits.append(orbit)
    return GaloisAudit(sigma, orbits, not failures, failures)


@dataclass
class PointOrbit:
    members: list
    residue_degree: int
    absolute_degree: int
    source_level: int


def points_at_infinity(forest, require_terminated=True):
    if require_terminated and not forest.terminated:
        raise ResolutionError("forest has not reached outer regularity")
    audit = galois_orbits(forest)
    if not audit.ok:
        raise ResolutionError(f"Galois audit failed: {audit.failures}")
    pairs = {}
    order = []
    for n in forest.nodes:
        for r in n.simple_roots():
            k = (n.id, r.key())
            pairs[k] = (n, r)
            order.append(k)
    seen, out = set(), []
    for k in order:
        if k in seen:
            continue
        members, cur = [], k
        while cur not in seen:
            seen.add(cur)
            n, r = pairs[cur]
            members.append((n.id, r))
            cur = (audit.sigma[n.id], r.frobenius().key())
            if cur not in pairs:
                raise ResolutionError("Frobenius image of a point is missing")
        level = pairs[k][0].level
        out.append(PointOrbit(members, len(members), len(members) * forest.tower.n, level))
    return out


# -- regularity and genus --------------------------------------------------------------------

def point_regularity(node, a):
    F = node.F
    zero = a.tower.zero(1)
    if not F.evaluate([a, zero]).is_zero():
        raise ResolutionError("point is not on the chart boundary")
    dx = F.derivative(0).evaluate([a, zero])
    dy = F.derivative(1).evaluate([a, zero])
    return not (dx.is_zero() and dy.is_zero())


@dataclass
class RegularityReport:
    level: int
    outer_regular: bool
    curve_regular: bool
    witnesses: list


def regularity_report(forest, level):
    if level < 1 or level > forest.max_level:
        raise ResolutionError(f"level {level} has not been computed")
    witnesses = []
    for n in forest.nodes:
        if n.level > level:
            continue
        for r, mult in n.multiple_roots(upto_level=level):
            witnesses.append({"node": n.id, "root": r, "multiplicity": mult,
                              "regular": point_regularity(n, r)})
    return RegularityReport(level, not witnesses, all(w["regular"] for w in witnesses), witnesses)


def node_status(node):
    mult = node.root_report().multiple()
    if not mult:
        return "outer-regular"
    roots = [r for o in mult for r in o.conjugates]
    if all(point_regularity(node, r) for r in roots):
        return "outer-singular-regular-point"
    return "outer-singular-singular-point"


@dataclass
class GenusReport:
    interior_count: int
    pa_C1: int
    curve_regular_C1: bool
    exact_genus: int = None
    step_bound_note: str = ""


def genus_report(f, forest, assert_connected=False):
    count = interior_lattice_count(forest.polygon)
    reg = regularity_report(forest, 1).curve_regular
    if reg and assert_connected:
        return GenusReport(count, count, True, count,
                           f"C1 is regular and declared connected: genus = {count}")
    if reg:
        note = (f"C1 is regular with arithmetic genus {count}; "
                "exact genus withheld without a connectedness assertion")
    else:
        note = (f"C1 is singular; its arithmetic genus {count} bounds the genus, "
                f"and at most {count} resolution steps reach a regular model")
    return GenusReport(count, count, reg, None, note)


def curve_regular_iterations(forest):
    """Number of expansion iterations after which the model is regular, or None."""
    for lv in range(1, forest.max_level + 1):
        if regularity_report(forest, lv).curve_regular:
            return lv - 1
    return None


def common_level(*elems):
    return lcm_levels(*[e.level for e in elems])
