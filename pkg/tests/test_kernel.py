import random
from fractions import Fraction

import pytest

from gerbeflow.kernel import (ArtinRing, Permutation, Poly, QQ, Scalar, StructuralError, all_permutations,
                              format_rational, koszul_sign, koszul_sign_images, monomials, parse_rational,
                              poly_mul, poly_partial, sort_sign)

x, y = Poly.var(0, 2), Poly.var(1, 2)


def test_difference_of_squares():
    assert poly_mul(x + y, x - y) == x * x - y * y


def test_truncation_kills_h_squared():
    R = ArtinRing(order=2)
    h = Poly.hbar(1, R)
    one = Poly.const(1, 1, R)
    assert (one + h) * (one - h) == one


def test_rational_cancellation():
    a = x.scale(Fraction(2, 3))
    b = x.scale(Fraction(3, 2))
    assert a * b == x * x


def test_partials():
    assert poly_partial(x * x * y, 0) == (x * y).scale(2)
    assert poly_partial(x * x, 1) == Poly.zero(2)
    R = ArtinRing(order=3)
    hx = Poly.hbar(1, R) * Poly.var(0, 1, R)
    assert poly_partial(hx, 0) == Poly.hbar(1, R)


def test_partial_index_out_of_range():
    with pytest.raises(IndexError):
        poly_partial(x, 5)


def test_mismatched_charts_raise():
    with pytest.raises(StructuralError):
        poly_mul(x, Poly.var(0, 3))
    with pytest.raises(StructuralError):
        poly_mul(Poly.var(0, 1), Poly.var(0, 1, ArtinRing(order=2)))


def test_no_stored_zeros():
    p = x + y - y
    assert list(p.flat_terms) == [(1, 0, 0)]
    assert not (x - x)


def test_scalar_arithmetic():
    R = ArtinRing(order=3)
    h = Scalar.hbar(R)
    s = (Scalar.const(1, R) + h) * (Scalar.const(1, R) - h)
    assert s == Scalar({0: 1, 2: -1}, R)
    assert h * h * h == Scalar({}, R)
    assert s.valuation() == 0 and (h * h).valuation() == 2


def _rand(rng, n=2, D=2, R=QQ):
    ms = monomials(n, D)
    return Poly(n, {m + (rng.randrange(R.order),): rng.randint(-3, 3) for m in rng.sample(ms, 3)}, R)


def test_ring_axioms_random():
    rng = random.Random(3)
    R = ArtinRing(order=3)
    for _ in range(50):
        a, b, c = (_rand(rng, R=R) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        for i in range(2):
            assert (a * b).partial(i) == a.partial(i) * b + a * b.partial(i)


def test_degree_of_product():
    rng = random.Random(4)
    for _ in range(30):
        a, b = _rand(rng), _rand(rng)
        if a and b:
            assert (a * b).degree() == a.degree() + b.degree()


def test_rational_io():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-4") == -4
    assert format_rational(parse_rational("6/4")) == "3/2"
    assert format_rational(5) == "5/1"
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


def test_poly_json_round_trip():
    R = ArtinRing(order=3)
    p = Poly(2, {(1, 0, 0): Fraction(1, 3), (0, 2, 1): -2, (0, 0, 2): 5}, R)
    assert Poly.from_json(p.to_json(), R) == p


def test_koszul_examples():
    swap = Permutation.transposition(2, 0, 1)
    assert koszul_sign(swap, [1, 1]) == -1
    assert koszul_sign(swap, [2, 2]) == 1
    assert koszul_sign(Permutation.identity(4), [1, 3, 2, 5]) == 1


def test_koszul_fast_path_agrees():
    rng = random.Random(0)
    for s in all_permutations(4):
        d = [rng.randint(0, 3) for _ in range(4)]
        assert koszul_sign(s, d) == koszul_sign_images(s.images, d)


def test_koszul_size_mismatch():
    with pytest.raises(ValueError):
        koszul_sign(Permutation.identity(3), [1, 1])


def test_koszul_ungraded_is_sign_for_odd_degrees():
    for s in all_permutations(4):
        assert koszul_sign(s, [1, 1, 1, 1]) == s.sign()
        assert koszul_sign(s, [0, 2, 0, 2]) == 1


def test_sort_sign():
    assert sort_sign((1, 0)) == (-1, (0, 1))
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((0, 0))[0] == 0


def test_permutation_composition_convention():
    s = Permutation((1, 2, 0))
    t = Permutation((0, 2, 1))
    assert (s * t).images == tuple(s.images[t.images[i]] for i in range(3))
    assert (s * s.inverse()) == Permutation.identity(3)
