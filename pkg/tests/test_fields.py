import itertools
import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bakermodel.fields import (
    FieldError,
    FieldSizeError,
    FieldSpecError,
    FieldTower,
    build_field,
    embed,
    frobenius_orbit,
    is_irreducible_fp,
    minimal_polynomial,
    parse_field_spec,
    smallest_irreducible,
)
from bakermodel.unipoly import UniPoly


def _has_root_mod_p(coeffs, p):
    return any(sum(c * pow(x, i, p) for i, c in enumerate(coeffs)) % p == 0 for x in range(p))


def test_prime_field_modulus_is_the_variable():
    T = build_field(2, 1)
    assert T.modulus(1) == (0, 1)
    assert T.level_size(1) == 2


def test_f3_moduli():
    T = build_field(3, 1)
    assert T.modulus(2) == (1, 0, 1)
    assert T.modulus(3) == (1, 0, 2, 1)


def test_f5_quadratic_modulus_matches_brute_force_scan():
    # scan monic quadratics X^2 + c1 X + c0, constant term most significant
    expected = None
    for c0, c1 in itertools.product(range(5), repeat=2):
        if not _has_root_mod_p((c0, c1, 1), 5):
            expected = (c0, c1, 1)
            break
    T = build_field(5, 1)
    assert T.modulus(2) == expected == (1, 1, 1)


@pytest.mark.parametrize("p,N", [(2, 3), (2, 4), (3, 2), (3, 4), (5, 3), (7, 2)])
def test_smallest_irreducible_is_minimal(p, N):
    m = smallest_irreducible(p, N)
    assert is_irreducible_fp(m, p) and len(m) == N + 1 and m[-1] == 1
    # no lexicographically smaller monic polynomial is irreducible
    for c in itertools.product(range(p), repeat=N):
        cand = tuple(c) + (1,)
        if cand >= m:
            break
        assert not is_irreducible_fp(list(cand), p)


def test_rejects_non_prime_and_oversize():
    with pytest.raises(FieldError):
        build_field(6, 1)
    with pytest.raises(FieldSizeError):
        FieldTower(2, 1, max_size=2**8)._level(16)


def test_field_spec_parsing():
    assert parse_field_spec("3").p == 3
    T = parse_field_spec("4")
    assert (T.p, T.n) == (2, 2)
    T = parse_field_spec("2^2")
    assert (T.p, T.n, T.modulus(1)) == (2, 2, (1, 1, 1))
    T = parse_field_spec("3^2:2,2,1")
    assert T.modulus(1) == (2, 2, 1)
    with pytest.raises(FieldSpecError):
        parse_field_spec("3^x")
    with pytest.raises(FieldError):
        parse_field_spec("3^2:1,1,1")  # X^2 + X + 1 = (X - 1)^2 over F_3
    with pytest.raises(FieldError):
        parse_field_spec("12")


def test_square_root_of_minus_one_in_f9():
    T = build_field(3, 1)
    i = next(x for x in T.elements(2) if x * x == T.from_int(-1))
    assert [y.key() for y in frobenius_orbit(i)] == [i.key(), (-i).key()]
    assert minimal_polynomial(i) == UniPoly(T, 1, [1, 0, 1])


def test_orbit_of_cubic_root_has_size_three():
    T = build_field(3, 1)
    f = UniPoly(T, 1, [-1, 0, 1, 1])  # X^3 + X^2 - 1
    root = next(x for x in T.elements(3) if f(x).is_zero())
    assert len(frobenius_orbit(root)) == 3
    assert minimal_polynomial(root) == f


def test_base_elements_are_fixed():
    T = build_field(3, 1)
    one = T.one(1)
    assert frobenius_orbit(one) == [one]
    assert embed(one, 2) == one
    x = T.from_int(2)
    assert minimal_polynomial(T.from_int(2, 1)).coeffs == UniPoly(T, 1, [-2, 1]).coeffs
    assert embed(x, 1) is x


def test_embedding_picks_smallest_root():
    # generator of F_9 into F_81: a root of the level-2 modulus, smallest coordinates
    T = build_field(3, 1)
    m2 = UniPoly(T, 4, [T.from_int(c, 4) for c in T.modulus(2)])
    roots = sorted(x.coords for x in T.elements(4) if m2(x).is_zero())
    img = embed(T.gen(2), 4)
    assert img.coords == roots[0]


def test_embeddings_compose():
    T = build_field(2, 1)
    for d, e, f in [(1, 2, 4), (2, 4, 8), (3, 6, 12), (2, 6, 12)]:
        x = T.gen(d)
        assert embed(embed(x, e), f).coords == embed(x, f).coords


def test_embed_rejects_non_divisible_target():
    T = build_field(2, 1)
    with pytest.raises(FieldError):
        embed(T.gen(2), 3)


def test_normalization_round_trip():
    T = build_field(5, 1)
    x = T.gen(2)
    y = embed(x, 4)
    assert y.normalize().level == 2 and y == x
    assert y.normalize().coords == x.coords


def test_extension_base_field():
    T = build_field(2, 2)
    t = T.gen(1)
    assert t * t + t + 1 == T.zero(1)
    assert len(frobenius_orbit(t)) == 1  # t lies in the base field F_4
    z = T.gen(2)
    assert len(frobenius_orbit(z)) == 2
    assert minimal_polynomial(z).degree == 2


def test_determinism_across_instances():
    a, b = build_field(3, 1), build_field(3, 1)
    for d in (2, 3, 4, 6):
        assert a.modulus(d) == b.modulus(d)
    assert a.embedding(2, 6) == b.embedding(2, 6)
    assert a.embedding(3, 6) == b.embedding(3, 6)


def test_concurrent_level_construction():
    T = build_field(2, 1)
    results = []

    def work():
        results.append((T.modulus(10), T.embedding(5, 10)))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert len(set(results)) == 1


_towers = {(p, n): build_field(p, n) for p, n in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)]}
_levels = st.sampled_from([(2, 1, 1), (2, 1, 3), (2, 1, 4), (3, 1, 2), (3, 1, 3), (5, 1, 2),
                           (7, 1, 2), (2, 2, 2), (3, 2, 1), (3, 2, 2)])


@settings(max_examples=200, deadline=None)
@given(_levels, st.randoms(use_true_random=False))
def test_field_axioms(spec, rnd):
    p, n, d = spec
    T = _towers[(p, n)]
    a, b, c = (T.random_element(rnd, d) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a - a == T.zero(d)
    if not a.is_zero():
        assert a * a.inverse() == T.one(d)


@settings(max_examples=200, deadline=None)
@given(_levels, st.randoms(use_true_random=False))
def test_frobenius_order_and_minimal_polynomial(spec, rnd):
    p, n, d = spec
    T = _towers[(p, n)]
    x = T.random_element(rnd, d)
    assert x ** (T.q ** d) == x
    assert x.frobenius(d) == x
    orbit = frobenius_orbit(x)
    assert d % len(orbit) == 0
    g = minimal_polynomial(x)
    assert g.degree == len(orbit)
    assert g(x).is_zero()
    prod = UniPoly(T, d, [1])
    for y in orbit:
        prod = prod * UniPoly(T, d, [-y, T.one(d)])
    assert prod == g


def test_inverse_of_zero_raises():
    T = build_field(3, 1)
    with pytest.raises(ZeroDivisionError):
        T.zero(2).inverse()


def test_random_element_nonzero():
    T = build_field(2, 1)
    rng = random.Random(0)
    assert all(not T.random_element(rng, 1, nonzero=True).is_zero() for _ in range(20))
