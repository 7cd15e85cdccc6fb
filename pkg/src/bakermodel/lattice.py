"""Integer lattice geometry: Newton polygons, edge normals, unimodular matrices."""

import math
from dataclasses import dataclass
from fractions import Fraction


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    """An edge with primitive inward normal (a, b) and offset c.

    The affine form a*i + b*j + c vanishes on the edge and is non-negative on
    the polygon.  Lattice points run counterclockwise:
    lattice_points[r] = lattice_points[0] + r * (b, -a).
    """

    endpoints: tuple
    normal: tuple
    offset: int
    lattice_points: tuple

    @property
    def lattice_length(self):
        return len(self.lattice_points) - 1

    def form(self, pt):
        a, b = self.normal
        return a * pt[0] + b * pt[1] + self.offset


@dataclass(frozen=True)
class LatticePolygon:
    vertices: tuple
    dim: int
    edges: tuple

    def boundary_count(self):
        if self.dim == 2:
            return sum(e.lattice_length for e in self.edges)
        if self.dim == 1:
            return self.edges[0].lattice_length + 1
        return 1

    def twice_area(self):
        if self.dim < 2:
            return 0
        v = self.vertices
        s = 0
        for k in range(len(v)):
            x0, y0 = v[k]
            x1, y1 = v[(k + 1) % len(v)]
            s += x0 * y1 - x1 * y0
        return s

    def contains(self, pt):
        if self.dim == 0:
            return tuple(pt) == self.vertices[0]
        return all(e.form(pt) >= 0 for e in self.edges) and (
            self.dim == 2 or _on_segment(self.vertices, pt))


def _on_segment(verts, pt):
    (x0, y0), (x1, y1) = verts
    if (x1 - x0) * (pt[1] - y0) != (y1 - y0) * (pt[0] - x0):
        return False
    return min(x0, x1) <= pt[0] <= max(x0, x1) and min(y0, y1) <= pt[1] <= max(y0, y1)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Andrew's monotone chain; counterclockwise, without collinear vertices."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 1:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _edge(p0, p1):
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    g = math.gcd(dx, dy)
    sx, sy = dx // g, dy // g
    a, b = -sy, sx
    c = -(a * p0[0] + b * p0[1])
    pts = tuple((p0[0] + r * sx, p0[1] + r * sy) for r in range(g + 1))
    return Edge((tuple(p0), tuple(p1)), (a, b), c, pts)


def newton_polygon(support):
    pts = [tuple(p) for p in support]
    if not pts:
        raise LatticeError("Newton polygon of an empty support")
    hull = convex_hull(pts)
    if len(hull) == 1:
        return LatticePolygon(tuple(hull), 0, ())
    if len(hull) == 2:
        a, b = hull
        return LatticePolygon(tuple(hull), 1, (_edge(a, b), _edge(b, a)))
    edges = tuple(_edge(hull[k], hull[(k + 1) % len(hull)]) for k in range(len(hull)))
    return LatticePolygon(tuple(hull), 2, edges)


def interior_lattice_count(P):
    """Number of interior lattice points, by Pick's formula."""
    if P.dim < 2:
        return 0
    return (P.twice_area() - P.boundary_count() + 2) // 2


def is_primitive(v):
    return math.gcd(*v) == 1 if len(v) > 1 else abs(v[0]) == 1


def delta_of_beta(beta, overrides=None):
    """Canonical delta with delta1*beta2 - delta2*beta1 = 1.

    beta1 = 0 gives (beta2, 0); otherwise delta1 is the unique choice with
    0 <= delta1 < |beta1|.  An override table keyed by beta wins if present.
    """
    b1, b2 = beta
    if math.gcd(b1, b2) != 1:
        raise LatticeError(f"{beta} is not primitive")
    if overrides and tuple(beta) in overrides:
        d = tuple(overrides[tuple(beta)])
        if d[0] * b2 - d[1] * b1 != 1:
            raise LatticeError(f"override {d} does not complete {beta}")
        return d
    if b1 == 0:
        return (b2, 0)
    m = abs(b1)
    d1 = pow(b2, -1, m) if m > 1 else 0
    d2 = (d1 * b2 - 1) // b1
    return (d1, d2)


def det(M):
    """Exact integer determinant (Bareiss)."""
    A = [list(r) for r in M]
    n = len(A)
    if any(len(r) != n for r in A):
        raise LatticeError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def mat_mul(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0])))
                 for i in range(len(A)))


def mat_vec(M, v):
    return tuple(sum(M[i][k] * v[k] for k in range(len(v))) for i in range(len(M)))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def inverse_unimodular(M):
    """Inverse of an integer matrix with determinant +-1, by exact elimination."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise LatticeError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = []
    for row in A:
        vals = row[n:]
        if any(x.denominator != 1 for x in vals):
            raise LatticeError("matrix is not unimodular")
        out.append(tuple(int(x) for x in vals))
    return tuple(out)


def check_attached(M, v=None):
    if det(M) != 1:
        raise LatticeError("matrix does not have determinant 1")
    if v is not None and tuple(M[-1]) != tuple(v):
        raise LatticeError(f"last row {tuple(M[-1])} differs from {tuple(v)}")
    return M


def matrix_attached(v, overrides=None):
    """A determinant-1 integer matrix whose last row is v.

    Size 2 uses the canonical delta as first row.  Larger sizes reduce v to the
    last unit vector by extended-gcd column operations W (v*W = e_last) and
    return W^{-1}.
    """
    v = tuple(int(x) for x in v)
    if not is_primitive(v):
        raise LatticeError(f"{v} is not primitive")
    if len(v) == 2:
        return (delta_of_beta(v, overrides), v)
    n = len(v)
    W = [list(r) for r in identity(n)]
    row = list(v)

    def colop(i, j, a, b, c, d):
        # columns (i, j) <- (a*col_i + c*col_j, b*col_i + d*col_j)
        for r in range(n):
            x, y = W[r][i], W[r][j]
            W[r][i], W[r][j] = a * x + c * y, b * x + d * y
        x, y = row[i], row[j]
        row[i], row[j] = a * x + c * y, b * x + d * y

    last = n - 1
    for i in range(n - 1):
        if row[i] == 0:
            continue
        x, y = row[i], row[last]
        g, s, t = _ext_gcd(x, y)
        # [x y] * [[y/g, s], [-x/g, t]] = [0, g], determinant (s*x + t*y)/g = 1
        colop(i, last, y // g, s, -x // g, t)
    if row[last] == -1:
        colop(0, last, -1, 0, 0, -1)
    if row[last] != 1:
        raise LatticeError("reduction failed")  # unreachable for primitive v
    M = inverse_unimodular(W)
    return check_attached(M, v)


def _ext_gcd(a, b):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def block_diag_identity(m, B):
    """I_m (+) B."""
    k = len(B)
    n = m + k
    return tuple(tuple((1 if i == j else 0) if i < m and j < m else
                       (B[i - m][j - m] if i >= m and j >= m else 0)
                       for j in range(n)) for i in range(n))


def compose_block(M_beta, M_parent):
    """(I_m (+) M_beta) * M_parent."""
    n = len(M_parent)
    if len(M_beta) != 2 or any(len(r) != 2 for r in M_beta) or any(len(r) != n for r in M_parent) or n < 2:
        raise LatticeError("shape mismatch in block composition")
    return mat_mul(block_diag_identity(n - 2, M_beta), M_parent)
