"""Sparse multivariate Laurent polynomials over a FieldTower.

Besides ring arithmetic this module provides the three transformations the
resolution engine is built from: the valuation ord_v, unimodular monomial
substitution with content stripping, and the additive shift x -> x + a - c(y).
It also owns the text grammar used for input and canonical rendering.
"""

from .fields import FqElem, lcm_levels
from .lattice import LatticeError, det
from .unipoly import UniPoly, render_coeff

EXPONENT_BOUND = 2**31


class LaurentError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"parse error at position {position}: {message}")
        self.position = position


def _check_exp(e):
    for x in e:
        if abs(x) > EXPONENT_BOUND:
            raise LaurentError(f"exponent {x} exceeds the bound 2^31")
    return e


class MultiLaurent:
    __slots__ = ("tower", "names", "level", "_t")

    def __init__(self, tower, names, terms, level=None):
        names = tuple(names)
        lv = [c.level for c in terms.values() if isinstance(c, FqElem)]
        level = lcm_levels(level or 1, *lv)
        lvl = tower._level(level)
        t = {}
        for e, c in terms.items():
            e = _check_exp(tuple(int(x) for x in e))
            if len(e) != len(names):
                raise LaurentError("exponent length does not match the variable count")
            if isinstance(c, int):
                c = tower.from_int(c, level)
            elif c.level != level:
                c = c.embed(level)
            if c.coords != lvl.zero:
                if e in t:
                    t[e] = lvl.add(t[e], c.coords)
                    if t[e] == lvl.zero:
                        del t[e]
                else:
                    t[e] = c.coords
        self.tower = tower
        self.names = names
        self.level = level
        self._t = t

    @classmethod
    def _raw(cls, tower, names, level, t):
        obj = cls.__new__(cls)
        obj.tower = tower
        obj.names = tuple(names)
        obj.level = level
        obj._t = t
        return obj

    @classmethod
    def constant(cls, tower, names, c, level=1):
        return cls(tower, names, {(0,) * len(names): c}, level)

    @classmethod
    def variable(cls, tower, names, i, level=1):
        e = [0] * len(names)
        e[i] = 1
        return cls(tower, names, {tuple(e): 1}, level)

    @property
    def _lvl(self):
        return self.tower._level(self.level)

    @property
    def nvars(self):
        return len(self.names)

    @property
    def terms(self):
        return {e: FqElem(self.tower, self.level, c) for e, c in self._t.items()}

    def support(self):
        return sorted(self._t)

    def coeff(self, e):
        c = self._t.get(tuple(e))
        return FqElem(self.tower, self.level, c if c is not None else self._lvl.zero)

    def is_zero(self):
        return not self._t

    def is_monomial(self):
        return len(self._t) == 1

    def embed(self, e):
        if e == self.level:
            return self
        return MultiLaurent(self.tower, self.names, self.terms, e)

    def _common(self, other):
        if isinstance(other, (int, FqElem)):
            other = MultiLaurent.constant(self.tower, self.names, other,
                                          other.level if isinstance(other, FqElem) else 1)
        if other.names != self.names:
            raise LaurentError(f"variable mismatch {self.names} vs {other.names}")
        if other.level == self.level:
            return self, other
        e = lcm_levels(self.level, other.level)
        return self.embed(e), other.embed(e)

    def __add__(self, other):
        a, b = self._common(other)
        lvl = a._lvl
        t = dict(a._t)
        for e, c in b._t.items():
            if e in t:
                s = lvl.add(t[e], c)
                if s == lvl.zero:
                    del t[e]
                else:
                    t[e] = s
            else:
                t[e] = c
        return MultiLaurent._raw(a.tower, a.names, a.level, t)

    __radd__ = __add__

    def __neg__(self):
        lvl = self._lvl
        return MultiLaurent._raw(self.tower, self.names, self.level, {e: lvl.neg(c) for e, c in self._t.items()})

    def __sub__(self, other):
        a, b = self._common(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        lvl = a._lvl
        t = {}
        for e1, c1 in a._t.items():
            for e2, c2 in b._t.items():
                e = _check_exp(tuple(x + y for x, y in zip(e1, e2)))
                v = lvl.mul(c1, c2)
                if e in t:
                    v = lvl.add(t[e], v)
                t[e] = v
        t = {e: c for e, c in t.items() if c != lvl.zero}
        return MultiLaurent._raw(a.tower, a.names, a.level, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if not self.is_monomial():
                raise LaurentError("negative power of a non-monomial")
            (e, c), = self._t.items()
            lvl = self._lvl
            return MultiLaurent._raw(self.tower, self.names, self.level,
                                     {_check_exp(tuple(x * k for x in e)): lvl.pow(c, k)})
        result = MultiLaurent.constant(self.tower, self.names, 1, self.level)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiLaurent):
            return NotImplemented
        if self.names != other.names:
            return False
        if self.level == other.level:
            return self._t == other._t
        a, b = self._common(other)
        return a._t == b._t

    def __hash__(self):
        return hash((self.names, tuple(sorted((e, FqElem(self.tower, self.level, c).key()) for e, c in self._t.items()))))

    def __repr__(self):
        return f"MultiLaurent({render(self)})"

    def __str__(self):
        return render(self)

    # -- structure ---------------------------------------------------------

    def ord_var(self, i):
        if not self._t:
            raise LaurentError("order of the zero polynomial")
        return min(e[i] for e in self._t)

    def degree_in(self, i):
        if not self._t:
            raise LaurentError("degree of the zero polynomial")
        return max(e[i] for e in self._t)

    def map_exponents(self, fn, names=None):
        lvl = self._lvl
        t = {}
        for e, c in self._t.items():
            e2 = _check_exp(tuple(fn(e)))
            if e2 in t:
                s = lvl.add(t[e2], c)
                if s == lvl.zero:
                    del t[e2]
                else:
                    t[e2] = s
            else:
                t[e2] = c
        return MultiLaurent._raw(self.tower, names or self.names, self.level, t)

    def times_monomial(self, e):
        return self.map_exponents(lambda x: [a + b for a, b in zip(x, e)])

    def strip_content(self, indices=None):
        """Divide by the largest monomial in the given variables; returns (g, shifts)."""
        if indices is None:
            indices = range(self.nvars)
        shift = [0] * self.nvars
        for i in indices:
            shift[i] = self.ord_var(i)
        return self.times_monomial([-s for s in shift]), tuple(shift[i] for i in indices)

    def derivative(self, i):
        p = self.tower.p
        lvl = self._lvl
        t = {}
        for e, c in self._t.items():
            k = e[i] % p
            if k:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = lvl.scale(c, k)
        return MultiLaurent._raw(self.tower, self.names, self.level, t)

    def evaluate(self, point):
        """Value at a point of the torus (a list of FqElem, one per variable)."""
        e = lcm_levels(self.level, *[x.level for x in point])
        pts = [x.embed(e) for x in point]
        acc = self.tower.zero(e)
        for exp, c in self._t.items():
            term = FqElem(self.tower, self.level, c).embed(e)
            for x, k in zip(pts, exp):
                if k:
                    term = term * (x ** k)
            acc = acc + term
        return acc

    def specialize(self, var, values):
        """Univariate polynomial in `var` after substituting values for the others.

        `values` maps variable index to FqElem.  The result is a UniPoly in the
        remaining variable after clearing its (possibly negative) order.
        """
        e = lcm_levels(self.level, *[x.level for x in values.values()])
        vals = {i: x.embed(e) for i, x in values.items()}
        low = self.ord_var(var)
        coeffs = {}
        for exp, c in self._t.items():
            term = FqElem(self.tower, self.level, c).embed(e)
            for i, x in vals.items():
                if exp[i]:
                    term = term * (x ** exp[i])
            k = exp[var] - low
            coeffs[k] = coeffs.get(k, self.tower.zero(e)) + term
        top = max(coeffs) if coeffs else 0
        return UniPoly(self.tower, e, [coeffs.get(k, self.tower.zero(e)) for k in range(top + 1)])

    def frobenius(self, k=1):
        return MultiLaurent(self.tower, self.names, {e: c.frobenius(k) for e, c in self.terms.items()}, self.level)

    def rename(self, names):
        return MultiLaurent._raw(self.tower, names, self.level, dict(self._t))

    def insert_variable(self, pos, name):
        names = list(self.names)
        names.insert(pos, name)
        return self.map_exponents(lambda e: list(e[:pos]) + [0] + list(e[pos:]), names)

    def is_polynomial(self):
        return all(x >= 0 for e in self._t for x in e)


def ord_v(f, v):
    if f.is_zero():
        raise LaurentError("ord_v of the zero polynomial")
    return min(sum(a * b for a, b in zip(v, e)) for e in f._t)


def face_restriction(f, face):
    """Sub-sum of f on an edge (an Edge record) or a vertex (a point)."""
    if hasattr(face, "lattice_points"):
        pts = set(face.lattice_points)
        on = [e for e in f._t if face.form(e) == 0]
        if any(e not in pts for e in on) or face.endpoints[0] not in f._t or face.endpoints[1] not in f._t:
            raise LaurentError("edge is not a face of the Newton polygon")
        if any(face.form(e) < 0 for e in f._t):
            raise LaurentError("edge is not a face of the Newton polygon")
    else:
        pts = {tuple(face)}
        if tuple(face) not in f._t:
            raise LaurentError("vertex is not in the support")
    t = {e: c for e, c in f._t.items() if e in pts}
    return MultiLaurent._raw(f.tower, f.names, f.level, t)


def apply_matrix(f, M, names=None):
    """Change of variables old = new . M, i.e. exponent e -> M e."""
    n = f.nvars
    if len(M) != n:
        raise LaurentError("matrix size does not match the variable count")
    return f.map_exponents(lambda e: [sum(M[i][k] * e[k] for k in range(n)) for i in range(n)], names)


def monomial_substitute(f, var_pair, M, names=None):
    """x = X^d1 Y^b1, y = X^d2 Y^b2 with M = ((d1, d2), (b1, b2)).

    Exponent (i, j) of the chosen pair goes to (d1*i + d2*j, b1*i + b2*j); the
    result is then divided by X^nX Y^nY so both orders vanish.  Returns
    (F, nX, nY).
    """
    if f.is_zero():
        raise LaurentError("substitution into the zero polynomial")
    M = tuple(tuple(r) for r in M)
    if len(M) != 2 or det(M) != 1:
        raise LatticeError("substitution matrix is not unimodular")
    ix, iy = var_pair
    (d1, d2), (b1, b2) = M

    def fn(e):
        e = list(e)
        i, j = e[ix], e[iy]
        e[ix], e[iy] = d1 * i + d2 * j, b1 * i + b2 * j
        return e

    g = f.map_exponents(fn, names)
    F, (nX, nY) = g.strip_content([ix, iy])
    return F, nX, nY


def shift_substitute(f, var, a, correction=None, yvar=None):
    """Replace variable `var` by var + a - c(y), c a UniPoly in variable `yvar`."""
    if any(e[var] < 0 for e in f._t):
        raise LaurentError("shift of a variable with negative exponents")
    if yvar is None:
        yvar = f.nvars - 1
    tower = f.tower
    level = lcm_levels(f.level, a.level, correction.level if correction is not None else 1)
    f = f.embed(level)
    n = f.nvars
    unit = [0] * n
    unit[var] = 1
    L = MultiLaurent(tower, f.names, {tuple(unit): 1, (0,) * n: a}, level)
    if correction is not None:
        for k, c in enumerate(correction.coeffs):
            if not c.is_zero():
                ey = [0] * n
                ey[yvar] = k
                L = L - MultiLaurent(tower, f.names, {tuple(ey): c}, level)
    groups = {}
    for e, c in f._t.items():
        k = e[var]
        rest = list(e)
        rest[var] = 0
        groups.setdefault(k, {})[tuple(rest)] = c
    result = MultiLaurent._raw(tower, f.names, level, {})
    power = MultiLaurent.constant(tower, f.names, 1, level)
    for k in range(max(groups) + 1 if groups else 0):
        if k in groups:
            result = result + MultiLaurent._raw(tower, f.names, level, groups[k]) * power
        power = power * L
    return result


def evaluate_y0(f, xvar=0, yvar=1):
    """The restriction F(X, 0) as a UniPoly in X."""
    if any(x < 0 for e in f._t for x in e):
        raise LaurentError("evaluate_y0 needs non-negative exponents")
    coeffs = {}
    for e, c in f._t.items():
        if e[yvar] == 0:
            if any(e[i] for i in range(f.nvars) if i not in (xvar, yvar)):
                raise LaurentError("evaluate_y0 expects a polynomial in two variables")
            coeffs[e[xvar]] = c
    top = max(coeffs) if coeffs else -1
    z = f._lvl.zero
    return UniPoly(f.tower, f.level, [coeffs.get(k, z) for k in range(top + 1)])


def from_unipoly(g, names, var):
    """Embed a UniPoly as a MultiLaurent in variable `var`."""
    n = len(names)
    t = {}
    for k, c in enumerate(g.coeffs):
        if not c.is_zero():
            e = [0] * n
            e[var] = k
            t[tuple(e)] = c
    return MultiLaurent(g.tower, names, t, g.level)


# -- text rendering -------------------------------------------------------------

def _mono_text(names, e):
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def render(f):
    """Deterministic text: terms by decreasing exponent vector, canonical coefficients."""
    if f.is_zero():
        return "0"
    out = []
    for e in sorted(f._t, reverse=True):
        cs = render_coeff(FqElem(f.tower, f.level, f._t[e]))
        mono = _mono_text(f.names, e)
        if not mono:
            out.append(cs)
        elif cs == "1":
            out.append(mono)
        else:
            out.append(f"{cs}*{mono}")
    return " + ".join(out)


# -- parsing --------------------------------------------------------------------

class _Parser:
    def __init__(self, text, tower, names):
        self.text = text
        self.tower = tower
        self.names = tuple(names)
        self.symbols = sorted(set(self.names) | {"t"}, key=len, reverse=True)
        self.toks = self._lex()
        self.i = 0

    def _lex(self):
        s = self.text
        toks = []
        k = 0
        while k < len(s):
            ch = s[k]
            if ch.isspace():
                k += 1
            elif ch.isdigit():
                j = k
                while j < len(s) and s[j].isdigit():
                    j += 1
                toks.append(("num", int(s[k:j]), k))
                k = j
            elif ch in "+-*^()":
                toks.append((ch, ch, k))
                k += 1
            elif ch.isalpha() or ch == "_":
                for sym in self.symbols:
                    if s.startswith(sym, k):
                        toks.append(("sym", sym, k))
                        k += len(sym)
                        break
                else:
                    raise ParseError(f"unknown symbol {ch!r}", k)
            else:
                raise ParseError(f"unexpected character {ch!r}", k)
        toks.append(("end", None, len(s)))
        return toks

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}" if tok[0] != "end" else f"expected {kind!r} before end of input", tok[2])
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty polynomial", 0)
        val = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return val

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        val = self.term()
        if sign < 0:
            val = -val
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                val = val * self.factor()
            elif kind in ("num", "sym", "("):
                val = val * self.factor()
            else:
                return val

    def factor(self):
        base = self.primary()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            tok = self.take("num")
            k = -tok[1] if neg else tok[1]
            if k < 0 and not base.is_monomial():
                raise ParseError("negative exponent of a non-monomial", tok[2])
            if abs(k) > EXPONENT_BOUND:
                raise ParseError("exponent too large", tok[2])
            base = base ** k
        return base

    def primary(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return MultiLaurent.constant(self.tower, self.names, tok[1])
        if tok[0] == "sym":
            self.take()
            if tok[1] in self.names:
                return MultiLaurent.variable(self.tower, self.names, self.names.index(tok[1]))
            if self.tower.n == 1:
                raise ParseError("the symbol t needs an extension base field", tok[2])
            return MultiLaurent.constant(self.tower, self.names, self.tower.gen(1))
        if tok[0] == "(":
            self.take()
            val = self.expr()
            self.take(")")
            return val
        if tok[0] == "end":
            raise ParseError("unexpected end of input", tok[2])
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])


def parse_polynomial(text, tower, names=("x", "y")):
    return _Parser(text, tower, names).parse()

