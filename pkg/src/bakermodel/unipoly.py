"""Dense univariate polynomials over one level of a FieldTower.

Coefficients are kept as coordinate tuples of their level; the public API
hands out FqElem values.  Factorization is squarefree decomposition followed
by distinct-degree and Cantor-Zassenhaus equal-degree splitting, driven by a
seeded random stream so that every run makes the same choices.
"""

import os
import random
import zlib
from dataclasses import dataclass, field

from .fields import FieldError, FqElem, lcm_levels


class PolyError(ValueError):
    pass


def _trimmed(c, zero):
    c = list(c)
    while c and c[-1] == zero:
        c.pop()
    return c


class UniPoly:
    __slots__ = ("tower", "level", "_c")

    def __init__(self, tower, level, coeffs):
        lvl = tower._level(level)
        raw = []
        for c in coeffs:
            if isinstance(c, int):
                raw.append(tower.from_int(c, level).coords)
            elif isinstance(c, FqElem):
                if c.level != level:
                    if level % c.level:
                        raise FieldError(f"coefficient at level {c.level} does not fit level {level}")
                    c = c.embed(level)
                raw.append(c.coords)
            else:
                raw.append(tuple(c))
        self.tower = tower
        self.level = level
        self._c = tuple(_trimmed(raw, lvl.zero))

    @classmethod
    def _raw(cls, tower, level, raw):
        obj = cls.__new__(cls)
        obj.tower = tower
        obj.level = level
        obj._c = tuple(_trimmed(raw, tower._level(level).zero))
        return obj

    @classmethod
    def x(cls, tower, level=1):
        return cls(tower, level, [0, 1])

    @classmethod
    def constant(cls, tower, c, level=1):
        return cls(tower, level, [c])

    @property
    def _lvl(self):
        return self.tower._level(self.level)

    @property
    def coeffs(self):
        return [FqElem(self.tower, self.level, c) for c in self._c]

    def coeff(self, i):
        if 0 <= i < len(self._c):
            return FqElem(self.tower, self.level, self._c[i])
        return self.tower.zero(self.level)

    @property
    def degree(self):
        return len(self._c) - 1

    def is_zero(self):
        return not self._c

    def lc(self):
        if not self._c:
            raise PolyError("zero polynomial has no leading coefficient")
        return FqElem(self.tower, self.level, self._c[-1])

    def is_one(self):
        return len(self._c) == 1 and self._c[0] == self._lvl.one

    def embed(self, e):
        if e == self.level:
            return self
        return UniPoly(self.tower, e, [c.embed(e) for c in self.coeffs])

    def _common(self, other):
        if isinstance(other, int):
            other = UniPoly(self.tower, self.level, [other])
        elif isinstance(other, FqElem):
            other = UniPoly(self.tower, other.level, [other])
        if other.level == self.level:
            return self, other
        e = lcm_levels(self.level, other.level)
        return self.embed(e), other.embed(e)

    def __add__(self, other):
        a, b = self._common(other)
        return UniPoly._raw(a.tower, a.level, _add(a._lvl, a._c, b._c))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._common(other)
        return UniPoly._raw(a.tower, a.level, _sub(a._lvl, a._c, b._c))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        lvl = self._lvl
        return UniPoly._raw(self.tower, self.level, [lvl.neg(c) for c in self._c])

    def __mul__(self, other):
        a, b = self._common(other)
        return UniPoly._raw(a.tower, a.level, _mul(a._lvl, a._c, b._c))

    __rmul__ = __mul__

    def __pow__(self, e):
        result = UniPoly._raw(self.tower, self.level, [self._lvl.one])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        a, b = self._common(other)
        if b.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = _divmod(a._lvl, a._c, b._c)
        return UniPoly._raw(a.tower, a.level, q), UniPoly._raw(a.tower, a.level, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise PolyError("division is not exact")
        return q

    def divides(self, other):
        return (other % self).is_zero()

    def monic(self):
        if self.is_zero():
            return self
        lvl = self._lvl
        inv = lvl.inv(self._c[-1])
        return UniPoly._raw(self.tower, self.level, [lvl.mul(c, inv) for c in self._c])

    def derivative(self):
        lvl = self._lvl
        return UniPoly._raw(self.tower, self.level, [lvl.scale(c, i % self.tower.p) for i, c in enumerate(self._c)][1:])

    def __call__(self, x):
        if isinstance(x, int):
            x = self.tower.from_int(x, self.level)
        e = lcm_levels(self.level, x.level)
        f = self.embed(e)
        x = x.embed(e)
        lvl = f._lvl
        acc = lvl.zero
        for c in reversed(f._c):
            acc = lvl.add(lvl.mul(acc, x.coords), c)
        return FqElem(self.tower, e, acc)

    def shift(self, a):
        """f(X + a)."""
        a_poly = UniPoly(self.tower, a.level, [a, self.tower.one(a.level)])
        f, a_poly = self._common(a_poly)
        result = UniPoly._raw(f.tower, f.level, [])
        for c in reversed(f.coeffs):
            result = result * a_poly + UniPoly(f.tower, f.level, [c])
        return result

    def frobenius(self, k=1):
        return UniPoly(self.tower, self.level, [c.frobenius(k) for c in self.coeffs])

    def ord0(self):
        """Multiplicity of X as a factor (order at zero)."""
        for i, c in enumerate(self._c):
            if any(c):
                return i
        raise PolyError("zero polynomial")

    def key(self):
        """Encoding used for deterministic ordering."""
        return (self.degree, tuple(FqElem(self.tower, self.level, c).key() for c in self._c))

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.level == other.level:
            return self._c == other._c
        a, b = self._common(other)
        return a._c == b._c

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"UniPoly(level={self.level}, {render_unipoly(self)})"


# -- raw coefficient-list kernels ---------------------------------------------

def _add(lvl, a, b):
    n = max(len(a), len(b))
    z = lvl.zero
    return [lvl.add(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)]


def _sub(lvl, a, b):
    n = max(len(a), len(b))
    z = lvl.zero
    return [lvl.sub(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)]


def _mul(lvl, a, b):
    if not a or not b:
        return []
    out = [lvl.zero] * (len(a) + len(b) - 1)
    z = lvl.zero
    for i, x in enumerate(a):
        if x == z:
            continue
        for j, y in enumerate(b):
            if y != z:
                out[i + j] = lvl.add(out[i + j], lvl.mul(x, y))
    return out


def _divmod(lvl, a, b):
    b = _trimmed(b, lvl.zero)
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], _trimmed(rem, lvl.zero)
    inv = lvl.inv(b[-1])
    q = [lvl.zero] * (len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == lvl.zero:
            continue
        c = lvl.mul(c, inv)
        q[i - db] = c
        for k in range(db + 1):
            rem[i - db + k] = lvl.sub(rem[i - db + k], lvl.mul(c, b[k]))
    return q, _trimmed(rem[:db], lvl.zero)


def _mod(lvl, a, b):
    return _divmod(lvl, a, b)[1]


def _monic(lvl, a):
    inv = lvl.inv(a[-1])
    return [lvl.mul(c, inv) for c in a]


def _gcd(lvl, a, b):
    a = _trimmed(a, lvl.zero)
    b = _trimmed(b, lvl.zero)
    while b:
        a, b = b, _mod(lvl, a, b)
    return _monic(lvl, a) if a else a


def _powmod(lvl, base, e, m):
    result = [lvl.one]
    base = _mod(lvl, base, m)
    while e:
        if e & 1:
            result = _mod(lvl, _mul(lvl, result, base), m)
        e >>= 1
        if e:
            base = _mod(lvl, _mul(lvl, base, base), m)
    return result


def gcd(f, g):
    a, b = f._common(g)
    return UniPoly._raw(a.tower, a.level, _gcd(a._lvl, a._c, b._c))


# -- squarefree decomposition and factorization -------------------------------

def _pth_root(f):
    """p-th root of a polynomial whose derivative vanishes."""
    p = f.tower.p
    lvl = f._lvl
    out = []
    for i in range(0, len(f._c), p):
        c = f._c[i]
        # c^{1/p} = c^{p^{N-1}} in a field with p^N elements
        for _ in range(lvl.N - 1):
            c = lvl.frobenius_p(c)
        out.append(c)
    return UniPoly._raw(f.tower, f.level, out)


def _sqf(f):
    out = []
    c = gcd(f, f.derivative())
    w = f.exact_div(c)
    i = 1
    while not w.is_one():
        y = gcd(w, c)
        z = w.exact_div(y)
        if not z.is_one():
            out.append((z.monic(), i))
        w = y
        c = c.exact_div(y)
        i += 1
    if not c.is_one():
        root = _pth_root(c.monic())
        for g, m in _sqf(root):
            out.append((g, m * f.tower.p))
    return out


def squarefree_decomposition(f):
    """Pairwise coprime monic squarefree g_i with f = lc(f) * prod g_i^{m_i}."""
    if f.is_zero():
        raise PolyError("squarefree decomposition of the zero polynomial")
    if f.degree == 0:
        return []
    parts = _sqf(f.monic())
    return sorted(parts, key=lambda t: (t[1], t[0].key()))


def _seed_for(f):
    env = os.environ.get("BAKER_SEED")
    if env is not None and env.strip():
        return int(env)
    return zlib.crc32(repr((f.tower.p, f.tower.n, f.level, f._c)).encode())


def _distinct_degree(f):
    lvl = f._lvl
    Q = lvl.size
    out = []
    rest = list(f._c)
    x = [lvl.zero, lvl.one]
    h = x
    i = 0
    while len(rest) - 1 >= 2 * (i + 1):
        i += 1
        h = _powmod(lvl, h, Q, rest)
        g = _gcd(lvl, rest, _sub(lvl, h, x))
        if len(g) > 1:
            out.append((g, i))
            rest = _divmod(lvl, rest, g)[0]
            h = _mod(lvl, h, rest)
    if len(rest) > 1:
        out.append((_monic(lvl, rest), len(rest) - 1))
    return out


def _equal_degree(lvl, g, e, rng, p):
    """Split a monic squarefree g whose irreducible factors all have degree e."""
    if len(g) - 1 == e:
        return [g]
    Q = lvl.size
    n = len(g) - 1
    while True:
        r = [tuple(rng.randrange(p) for _ in range(lvl.N)) for _ in range(n)]
        r = _trimmed(r, lvl.zero)
        if len(r) < 2:
            continue
        if p == 2:
            k = lvl.N * e
            t = list(r)
            acc = list(r)
            for _ in range(k - 1):
                t = _mod(lvl, _mul(lvl, t, t), g)
                acc = _add(lvl, acc, t)
            cand = _trimmed(acc, lvl.zero)
        else:
            t = _powmod(lvl, r, (Q**e - 1) // 2, g)
            cand = _sub(lvl, t, [lvl.one])
        d = _gcd(lvl, g, cand)
        if 1 < len(d) < len(g):
            other = _monic(lvl, _divmod(lvl, g, d)[0])
            return _equal_degree(lvl, d, e, rng, p) + _equal_degree(lvl, other, e, rng, p)


def _factor_squarefree(f, rng):
    lvl = f._lvl
    out = []
    for g, e in _distinct_degree(f):
        for piece in _equal_degree(lvl, g, e, rng, f.tower.p):
            out.append(UniPoly._raw(f.tower, f.level, piece))
    return out


def factor(f):
    """Monic irreducible factors with multiplicities, sorted by (degree, encoding)."""
    if f.is_zero() or f.degree < 1:
        raise PolyError("factor expects a nonconstant polynomial")
    rng = random.Random(_seed_for(f))
    out = []
    for g, m in squarefree_decomposition(f):
        for h in _factor_squarefree(g, rng):
            out.append((h, m))
    return sorted(out, key=lambda t: (t[0].key(), t[1]))


def _linear_roots(f):
    """All roots of f lying in the coefficient level, sorted by coordinates."""
    lvl = f._lvl
    Q = lvl.size
    fm = _monic(lvl, f._c)
    if len(fm) < 2:
        return []
    x = [lvl.zero, lvl.one]
    roots = []
    if fm[0] == lvl.zero:
        roots.append(lvl.zero)
        while fm[0] == lvl.zero:
            fm = fm[1:]
    if len(fm) > 1:
        h = _powmod(lvl, x, Q - 1, fm)
        g = _gcd(lvl, fm, _sub(lvl, h, [lvl.one]))
        if len(g) > 1:
            rng = random.Random(zlib.crc32(repr((f.tower.p, f.level, g)).encode()))
            for piece in _equal_degree(lvl, g, 1, rng, f.tower.p):
                roots.append(lvl.neg(piece[0]))
    return [FqElem(f.tower, f.level, c) for c in sorted(roots)]


# -- roots in the algebraic closure -------------------------------------------

@dataclass
class RootOrbit:
    """Roots of one irreducible factor: conjugates under x -> x^{Q}, Q = |coefficient field|."""

    representative: FqElem
    orbit_size: int
    multiplicity: int
    is_zero: bool
    conjugates: tuple = field(default=(), repr=False)
    factor: UniPoly = field(default=None, repr=False)


@dataclass
class RootReport:
    orbits: list

    def all_roots(self):
        """Every root (all conjugates) with its multiplicity."""
        out = []
        for o in self.orbits:
            for r in o.conjugates:
                out.append((r, o.multiplicity))
        return out

    def multiple(self):
        return [o for o in self.orbits if o.multiplicity > 1]

    def simple(self):
        return [o for o in self.orbits if o.multiplicity == 1]

    def root_count(self):
        return sum(o.orbit_size * o.multiplicity for o in self.orbits)


def _factor_roots(g):
    """Conjugate roots of an irreducible g, at their minimal levels, sorted by key."""
    e = g.degree
    big = g.embed(g.level * e)
    found = _linear_roots(big)
    roots = sorted({r.normalize() for r in found}, key=lambda r: r.key())
    return roots


def roots_in_closure(f, nonzero_only=False):
    if f.is_zero():
        raise PolyError("roots of the zero polynomial")
    if f.degree < 1:
        return RootReport([])
    orbits = []
    for g, m in factor(f):
        if g.degree == 1 and g._c[0] == g._lvl.zero:
            if not nonzero_only:
                z = f.tower.zero(1)
                orbits.append(RootOrbit(z, 1, m, True, (z,), g))
            continue
        roots = _factor_roots(g)
        orbits.append(RootOrbit(roots[0], g.degree, m, False, tuple(roots), g))
    return RootReport(orbits)


def nonzero_root_multiplicity(f, a):
    """Multiplicity of a (nonzero) as a root of f."""
    m = 0
    e = lcm_levels(f.level, a.level)
    g = f.embed(e)
    lin = UniPoly(f.tower, e, [-a.embed(e), 1])
    while True:
        q, r = divmod(g, lin)
        if not r.is_zero():
            return m
        g = q
        m += 1


# -- rendering ------------------------------------------------------------------

def render_coeff(c):
    """Canonical text for a field element: an integer residue for prime-field
    values, otherwise a polynomial in the level generator (t for the base field,
    z<d> for level d)."""
    c = c.normalize()
    tower = c.tower
    if c.level == 1 and tower.n == 1:
        return str(c.coords[0])
    sym = "t" if c.level == 1 else f"z{c.level}"
    parts = []
    for i in range(len(c.coords) - 1, -1, -1):
        v = c.coords[i]
        if not v:
            continue
        if i == 0:
            parts.append(str(v))
        else:
            mono = sym if i == 1 else f"{sym}^{i}"
            parts.append(mono if v == 1 else f"{v}*{mono}")
    if not parts:
        return "0"
    return parts[0] if len(parts) == 1 else "(" + "+".join(parts) + ")"


def render_unipoly(f, var="X"):
    if f.is_zero():
        return "0"
    terms = []
    for i in range(f.degree, -1, -1):
        c = f.coeff(i)
        if c.is_zero():
            continue
        cs = render_coeff(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(cs)
        elif cs == "1":
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return " + ".join(terms)


def render_factored(f, var="X"):
    if f.is_zero():
        return "0"
    if f.degree < 1:
        return render_unipoly(f, var)
    pieces = []
    lc = f.lc()
    if not lc.is_one():
        pieces.append(render_coeff(lc))
    for g, m in factor(f):
        s = f"({render_unipoly(g, var)})"
        pieces.append(s if m == 1 else f"{s}^{m}")
    return "*".join(pieces)

