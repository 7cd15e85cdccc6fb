"""Finite fields F_{q^d} over a base field F_q, q = p^n, built as a lazy tower.

Every level d is realised as F_p[t]/(m_d) with m_d the lexicographically
smallest monic irreducible polynomial of degree n*d over F_p, comparing
coefficient vectors (c0, c1, ...) with c0 most significant.  Level d embeds
into level e (d | e) by sending t to a root of m_d; the root is the one with
the smallest coordinate vector among those compatible with the embeddings
already fixed for the divisors of d.
"""

import itertools
import math
import threading
from functools import reduce

from sympy import isprime

DEFAULT_MAX_SIZE = 2**64


class FieldError(ValueError):
    pass


class FieldSizeError(FieldError):
    pass


class FieldSpecError(FieldError):
    """Malformed field specification text."""


# -- dense polynomials over F_p, lists lowest degree first -------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv % p
        if c:
            for k in range(dm + 1):
                a[i - dm + k] = (a[i - dm + k] - c * m[k]) % p
    return _trim(a[:dm])


def _pmulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod([c % p for c in out], m, p)


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_fp(m, p):
    """Rabin's test for a monic polynomial m (coefficient list) over F_p."""
    m = _trim([c % p for c in m])
    N = len(m) - 1
    if N < 1:
        return False
    if N == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**N, m, p), x, p):
        return False
    for r in _prime_factors(N):
        h = _psub(_ppowmod(x, p ** (N // r), m, p), x, p)
        if len(_pgcd(m, h, p)) != 1:
            return False
    return True


def smallest_irreducible(p, N):
    """Smallest monic irreducible of degree N over F_p, constant term most significant."""
    if N == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=N):
        if low[0] == 0:
            continue
        cand = list(low) + [1]
        if is_irreducible_fp(cand, p):
            return tuple(cand)
    raise FieldError("no irreducible polynomial found")  # unreachable


def _solve_mod_p(columns, target, p):
    """Solve sum_k a_k * columns[k] = target over F_p; None if inconsistent."""
    rows = len(target)
    ncols = len(columns)
    aug = [[columns[k][r] % p for k in range(ncols)] + [target[r] % p] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [v * inv % p for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(v - f * w) % p for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if aug[i][-1]:
            return None
    sol = [0] * ncols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    return sol


class _Level:
    """Arithmetic on coordinate tuples for one level of the tower."""

    def __init__(self, p, degree, modulus):
        self.p = p
        self.N = degree
        self.modulus = tuple(modulus)
        self.size = p**degree
        self._red = [(-c) % p for c in modulus[:-1]]
        self.zero = (0,) * degree
        self.one = (1,) + (0,) * (degree - 1)
        self._frob = None

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def scale(self, a, c):
        p = self.p
        return tuple(x * c % p for x in a)

    def mul(self, a, b):
        p, N = self.p, self.N
        if N == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * N - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        red = self._red
        for i in range(2 * N - 2, N - 1, -1):
            c = prod[i] % p
            if c:
                base = i - N
                for k in range(N):
                    if red[k]:
                        prod[base + k] += c * red[k]
        return tuple(c % p for c in prod[:N])

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero in a finite field")
        p = self.p
        if self.N == 1:
            return (pow(a[0], -1, p),)
        # extended Euclid on F_p[t]
        r0, r1 = list(self.modulus), _trim(list(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            inv_lc = pow(r1[-1], -1, p)
            q = [0] * (len(r0) - len(r1) + 1)
            rem = list(r0)
            for i in range(len(rem) - len(r1), -1, -1):
                c = rem[i + len(r1) - 1] * inv_lc % p
                q[i] = c
                if c:
                    for k, v in enumerate(r1):
                        rem[i + k] = (rem[i + k] - c * v) % p
            rem = _trim(rem)
            qs1 = [0] * (len(q) + len(s1))
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs1[i + j] += x * y
            s0, s1 = s1, _psub(s0, [c % p for c in qs1], p)
            r0, r1 = r1, rem
        c = pow(r1[0], -1, p)
        out = [v * c % p for v in s1] + [0] * self.N
        return tuple(out[: self.N])

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def frobenius_p(self, a):
        """a -> a^p through a precomputed F_p-linear table."""
        if self._frob is None:
            t = (0, 1) + (0,) * (self.N - 2) if self.N > 1 else self.one
            tp = self.pow(t, self.p)
            cols, cur = [], self.one
            for _ in range(self.N):
                cols.append(cur)
                cur = self.mul(cur, tp)
            self._frob = cols
        p = self.p
        out = [0] * self.N
        for x, col in zip(a, self._frob):
            if x:
                for k, v in enumerate(col):
                    out[k] += x * v
        return tuple(c % p for c in out)


class FieldTower:
    """The base field k = F_{p^n} together with lazily built extensions F_{q^d}."""

    def __init__(self, p, n=1, modulus=None, max_size=DEFAULT_MAX_SIZE):
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if n < 1:
            raise FieldError("base degree must be positive")
        self.p = p
        self.n = n
        self.q = p**n
        self.max_size = max_size
        if self.q > max_size:
            raise FieldSizeError(f"field of size {p}^{n} exceeds the size bound")
        if modulus is not None:
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != n + 1 or modulus[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {n}")
            if not is_irreducible_fp(list(modulus), p):
                raise FieldError("modulus is not irreducible")
        self._base_modulus = modulus
        self._levels = {}
        self._embeddings = {}
        self._normal_cache = {}
        self._lock = threading.RLock()

    # -- construction -----------------------------------------------------

    def _level(self, d):
        lvl = self._levels.get(d)
        if lvl is not None:
            return lvl
        with self._lock:
            lvl = self._levels.get(d)
            if lvl is None:
                if d < 1:
                    raise FieldError("level must be positive")
                N = self.n * d
                if self.p**N > self.max_size:
                    raise FieldSizeError(f"level {d} has {self.p}^{N} elements, above the size bound")
                if d == 1 and self._base_modulus is not None:
                    mod = self._base_modulus
                else:
                    mod = smallest_irreducible(self.p, N)
                lvl = _Level(self.p, N, mod)
                self._levels[d] = lvl
        return lvl

    def modulus(self, d=1):
        return self._level(d).modulus

    def level_size(self, d=1):
        return self._level(d).size

    def built_levels(self):
        return sorted(self._levels)

    def embedding(self, d, e):
        """Images of t^0, ..., t^{N_d - 1} of level d inside level e (coordinate tuples)."""
        if e % d:
            raise FieldError(f"level {d} does not divide level {e}")
        key = (d, e)
        table = self._embeddings.get(key)
        if table is not None:
            return table
        with self._lock:
            table = self._embeddings.get(key)
            if table is None:
                table = self._build_embedding(d, e)
                self._embeddings[key] = table
        return table

    def _build_embedding(self, d, e):
        src, dst = self._level(d), self._level(e)
        if d == e:
            return tuple(tuple(1 if i == k else 0 for i in range(src.N)) for k in range(src.N))
        if src.N == 1:
            return (dst.one,)
        from .unipoly import UniPoly, _linear_roots

        mpoly = UniPoly(self, e, [self.from_int(c, e) for c in src.modulus])
        roots = sorted(r.coords for r in _linear_roots(mpoly))
        constraints = []
        for d2 in range(1, d):
            if d % d2 == 0 and self._level(d2).N > 1:
                gen_in_d = self.embedding(d2, d)[1]
                constraints.append((gen_in_d, self.embedding(d2, e)[1]))
        for theta in roots:
            table = [dst.one]
            for _ in range(src.N - 1):
                table.append(dst.mul(table[-1], theta))
            ok = all(self._apply_table(table, dst, img_d) == img_e for img_d, img_e in constraints)
            if ok:
                return tuple(table)
        raise FieldError("no compatible embedding found")  # unreachable by Galois theory

    @staticmethod
    def _apply_table(table, dst, coords):
        p = dst.p
        out = [0] * dst.N
        for x, col in zip(coords, table):
            if x:
                for k, v in enumerate(col):
                    out[k] += x * v
        return tuple(c % p for c in out)

    # -- element factories ------------------------------------------------

    def element(self, coords, d=1):
        lvl = self._level(d)
        coords = tuple(int(c) % self.p for c in coords)
        if len(coords) < lvl.N:
            coords += (0,) * (lvl.N - len(coords))
        if len(coords) != lvl.N:
            raise FieldError(f"level {d} expects {lvl.N} coordinates")
        return FqElem(self, d, coords)

    def from_int(self, c, d=1):
        lvl = self._level(d)
        return FqElem(self, d, ((int(c) % self.p),) + (0,) * (lvl.N - 1))

    def zero(self, d=1):
        return FqElem(self, d, self._level(d).zero)

    def one(self, d=1):
        return FqElem(self, d, self._level(d).one)

    def gen(self, d=1):
        """The class of t at level d (for the prime field this is 0 by convention)."""
        lvl = self._level(d)
        if lvl.N == 1:
            return FqElem(self, d, ((-lvl.modulus[0]) % self.p,))
        return FqElem(self, d, (0, 1) + (0,) * (lvl.N - 2))

    def elements(self, d=1):
        lvl = self._level(d)
        for c in itertools.product(range(self.p), repeat=lvl.N):
            yield FqElem(self, d, tuple(reversed(c)))

    def random_element(self, rng, d=1, nonzero=False):
        lvl = self._level(d)
        while True:
            c = tuple(rng.randrange(self.p) for _ in range(lvl.N))
            if not nonzero or any(c):
                return FqElem(self, d, c)

    # -- normalization ----------------------------------------------------

    def minimal_level(self, x):
        for d2 in range(1, x.level + 1):
            if x.level % d2 == 0 and x.frobenius(d2) == x:
                return d2
        return x.level  # unreachable: x^{q^level} = x

    def normalize(self, x):
        key = (x.level, x.coords)
        hit = self._normal_cache.get(key)
        if hit is not None:
            return hit
        d2 = self.minimal_level(x)
        if d2 == x.level:
            out = x
        else:
            sol = _solve_mod_p(self.embedding(d2, x.level), x.coords, self.p)
            out = FqElem(self, d2, tuple(sol))
        self._normal_cache[key] = out
        return out

    def spec(self):
        if self._base_modulus is not None:
            return f"{self.p}^{self.n}:" + ",".join(str(c) for c in self._base_modulus)
        return str(self.p) if self.n == 1 else f"{self.p}^{self.n}"

    def __eq__(self, other):
        return isinstance(other, FieldTower) and (self.p, self.n, self.modulus(1)) == (
            other.p, other.n, other.modulus(1))

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"FieldTower({self.spec()})"


class FqElem:
    """An element of level `level` of a FieldTower, stored by F_p coordinates."""

    __slots__ = ("tower", "level", "coords")

    def __init__(self, tower, level, coords):
        self.tower = tower
        self.level = level
        self.coords = coords

    @property
    def _lvl(self):
        return self.tower._level(self.level)

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.level == self.level:
                return self, other
            e = self.level * other.level // math.gcd(self.level, other.level)
            return self.embed(e), other.embed(e)
        if isinstance(other, int):
            return self, self.tower.from_int(other, self.level)
        return None, None

    def is_zero(self):
        return not any(self.coords)

    def is_one(self):
        return self.coords == self._lvl.one

    def __bool__(self):
        return any(self.coords)

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return FqElem(a.tower, a.level, a._lvl.add(a.coords, b.coords))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return FqElem(a.tower, a.level, a._lvl.sub(a.coords, b.coords))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FqElem(self.tower, self.level, self._lvl.neg(self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            return FqElem(self.tower, self.level, self._lvl.scale(self.coords, other % self.tower.p))
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return FqElem(a.tower, a.level, a._lvl.mul(a.coords, b.coords))

    __rmul__ = __mul__

    def inverse(self):
        return FqElem(self.tower, self.level, self._lvl.inv(self.coords))

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        return FqElem(self.tower, self.level, self._lvl.pow(self.coords, e))

    def frobenius(self, k=1):
        """x -> x^{q^k}, q the size of the base field."""
        lvl = self._lvl
        c = self.coords
        for _ in range((k * self.tower.n) % lvl.N if lvl.N > 1 else 0):
            c = lvl.frobenius_p(c)
        return FqElem(self.tower, self.level, c)

    def embed(self, e):
        return embed(self, e)

    def normalize(self):
        return self.tower.normalize(self)

    def key(self):
        """Canonical sort/hash key: (minimal level, coordinates there)."""
        x = self.tower.normalize(self)
        return (x.level, x.coords)

    def to_int(self):
        x = self.tower.normalize(self)
        if x.level != 1 or any(x.coords[1:]):
            raise FieldError("element is not in the prime field")
        return x.coords[0]

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.tower.from_int(other, self.level)
        if not isinstance(other, FqElem):
            return NotImplemented
        if other.level == self.level:
            return self.coords == other.coords
        a, b = self._coerce(other)
        return a.coords == b.coords

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FqElem(level={self.level}, coords={self.coords})"


def build_field(p, n=1, max_size=DEFAULT_MAX_SIZE):
    return FieldTower(p, n, max_size=max_size)


def parse_field_spec(spec, max_size=DEFAULT_MAX_SIZE):
    """Parse "p", "p^n", "q" (a prime power) or "p^n:c0,c1,...,1"."""
    text = spec.strip()
    modulus = None
    if ":" in text:
        text, mod_text = text.split(":", 1)
        try:
            modulus = [int(c) for c in mod_text.split(",")]
        except ValueError:
            raise FieldSpecError(f"bad modulus list {mod_text!r}") from None
    try:
        if "^" in text:
            base, exp = text.split("^", 1)
            p, n, q = int(base), int(exp), None
        else:
            q = int(text)
    except ValueError:
        raise FieldSpecError(f"bad field spec {spec!r}") from None
    if q is not None:
        p, n = _prime_power(q)
    return FieldTower(p, n, modulus=modulus, max_size=max_size)


def _prime_power(q):
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    facs = _prime_factors(q) if q < 10**12 else [q]
    if len(facs) != 1:
        raise FieldError(f"{q} is not a prime power")
    p = facs[0]
    n = round(math.log(q, p))
    if p**n != q:
        raise FieldError(f"{q} is not a prime power")
    return p, n


def embed(x, d_target):
    if d_target % x.level:
        raise FieldError(f"level {x.level} does not divide {d_target}")
    if d_target == x.level:
        return x
    tower = x.tower
    table = tower.embedding(x.level, d_target)
    return FqElem(tower, d_target, tower._apply_table(table, tower._level(d_target), x.coords))


def frobenius_orbit(x):
    orbit = [x]
    cur = x.frobenius()
    while cur != x:
        orbit.append(cur)
        cur = cur.frobenius()
    return orbit


def minimal_polynomial(x):
    """Monic minimal polynomial of x over the base field, as a level-1 UniPoly."""
    from .unipoly import UniPoly

    tower = x.tower
    poly = [tower.one(x.level)]
    for r in frobenius_orbit(x):
        # multiply by (T - r)
        nxt = [tower.zero(x.level)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * r
        poly = nxt
    coeffs = []
    for c in poly:
        c1 = tower.normalize(c)
        if c1.level != 1:
            raise FieldError("minimal polynomial coefficient outside the base field")
        coeffs.append(c1)
    return UniPoly(tower, 1, coeffs)


def lcm_levels(*levels):
    return reduce(lambda a, b: a * b // math.gcd(a, b), levels, 1)

