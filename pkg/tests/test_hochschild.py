import random
from fractions import Fraction

import pytest

from gerbeflow.cartan import MultiVector
from gerbeflow.hochschild import (MultiDiffOp, brace, cup, gerst_compose, gerst_compose_i,
                                  gerstenhaber_bracket, hkr, hkr_ia_discrepancy, hochschild_delta,
                                  hochschild_delta_standard, i_a_cochain, mdo_eval)
from gerbeflow.kernel import Poly
from gerbeflow.oracles import compose_pointwise_check
from gerbeflow.randgen import rand_mdo, rand_multivector, rand_poly

n = 2
x, y = Poly.var(0, n), Poly.var(1, n)
one = Poly.const(1, n)
Dx = MultiDiffOp.from_partials(n, [(1, 0)])
Dy = MultiDiffOp.from_partials(n, [(0, 1)])
M = MultiDiffOp.multiplication(n)


def elt(f):
    return MultiDiffOp.element(f)


def sg(e):
    return -1 if e % 2 else 1


def test_eval_examples():
    assert Dx(x * x * y) == (x * y).scale(2)
    assert M(x, y) == x * y
    op = MultiDiffOp.from_partials(n, [(1, 0), (0, 2)], y)
    assert op(x * x, y * y * y) == (x * y * y).scale(12)
    with pytest.raises(ValueError):
        mdo_eval(M, [x])


def test_partial_compositions():
    a, b = x * x * y, x + y * y
    assert gerst_compose_i(Dx, M, 1)(a, b) == Dx(a * b)
    assert gerst_compose_i(M, Dx, 1)(a, b) == Dx(a) * b
    assert gerst_compose_i(M, Dx, 2)(a, b) == a * Dx(b)
    Dxx = MultiDiffOp.from_partials(n, [(2, 0)])
    assert gerst_compose_i(Dxx, M, 1)(x * x, x) == x.scale(6)
    with pytest.raises(IndexError):
        gerst_compose_i(Dx, M, 2)


def test_insert_element():
    c = gerst_compose_i(M, elt(x), 2)
    assert c.arity == 1 and c(y) == x * y


def test_bracket_examples():
    assert gerstenhaber_bracket(Dx, elt(x)) == elt(one)
    assert not gerstenhaber_bracket(M, M)
    assert not gerstenhaber_bracket(Dx, Dy)
    xDy = MultiDiffOp.derivation([Poly.zero(n), x])
    # Lie bracket of vector fields
    assert gerstenhaber_bracket(Dx, xDy) == Dy
    with pytest.raises(ValueError):
        gerstenhaber_bracket(elt(x), elt(y))


def test_delta_examples():
    # derivations are cocycles
    assert not hochschild_delta(Dx)
    assert not hochschild_delta(MultiDiffOp.derivation([x * y, y]))
    # delta of an element is its inner derivation, which is zero for a commutative algebra
    assert not hochschild_delta(elt(x * y))
    Dxx = MultiDiffOp.from_partials(n, [(2, 0)])
    # d^2 fails Leibniz by 2 dx(a) dx(b)
    assert hochschild_delta(Dxx) == MultiDiffOp.from_partials(n, [(1, 0), (1, 0)], -2)


def test_delta_matches_standard_formula():
    rng = random.Random(3)
    ops = [MultiDiffOp.from_partials(n, [(1, 0), (0, 1)]),
           MultiDiffOp.from_partials(n, [(2, 0), (0, 0)], x)]
    ops += [rand_mdo(rng, n, rng.randint(0, 3), 2) for _ in range(6)]
    for D in ops:
        dD = hochschild_delta(D)
        for _ in range(5):
            args = [rand_poly(rng, n, 2) for _ in range(D.arity + 1)]
            assert dD(*args) == hochschild_delta_standard(D, args)


def test_cup_examples():
    c = cup(Dx, Dy)
    assert c.arity == 2
    assert c(x * y, x * y) == x * y
    assert cup(elt(x), M) == M.scale(x)


def test_brace_reductions():
    rng = random.Random(4)
    D, E, F = (rand_mdo(rng, n, 2, 2) for _ in range(3))
    assert brace(D, []) == D
    assert brace(D, [E]) == gerst_compose(D, E)
    # pre-Lie relation for the two-argument brace
    lhs = brace(brace(D, [E]), [F]) - brace(D, [brace(E, [F])])
    rhs = brace(D, [E, F]) + brace(D, [F, E]).scale(sg((E.arity - 1) * (F.arity - 1)))
    assert lhs == rhs
    with pytest.raises(ValueError):
        brace(Dx, [E, F])


def test_multiplication_brace_is_cup_up_to_sign():
    rng = random.Random(5)
    for _ in range(10):
        D, E = rand_mdo(rng, n, rng.randint(1, 2), 2), rand_mdo(rng, n, rng.randint(1, 2), 2)
        assert brace(M, [D, E]) == cup(D, E).scale(sg(D.arity - 1))


def test_ia_examples():
    xy = MultiDiffOp.from_partials(n, [(1, 0), (0, 1)])
    assert i_a_cochain(x, xy) == Dy
    assert not i_a_cochain(x * y, M)
    assert i_a_cochain(x, Dx) == elt(one)
    with pytest.raises(ValueError):
        i_a_cochain(x, elt(y))


def test_hkr_examples():
    bv = MultiVector.basis((0, 1), n)
    H = hkr(bv)
    assert H(x, y) == Poly.const(Fraction(1, 2), n)
    assert H(y, x) == Poly.const(Fraction(-1, 2), n)
    assert hkr(MultiVector.function(x)) == elt(x)
    assert hkr(MultiVector.basis((0,), n, y)) == MultiDiffOp.derivation([y, Poly.zero(n)])


def test_hkr_ia_discrepancy_reports_ratio():
    bv = MultiVector.basis((0, 1), n)
    rep = hkr_ia_discrepancy(x, bv)
    assert set(rep) == {"equal", "ratio", "lhs", "rhs"}
    if not rep["equal"]:
        assert rep["lhs"] == rep["rhs"].scale(rep["ratio"])


def test_invariants_random():
    rng = random.Random(6)
    br = gerstenhaber_bracket
    for _ in range(15):
        p, q, s = (rng.randint(1, 2) for _ in range(3))
        D, E = rand_mdo(rng, n, p, 2), rand_mdo(rng, n, q, 2)
        F = rand_mdo(rng, n, s, 2, terms=1)
        a = rand_poly(rng, n, 2)
        e = sg((p - 1) * (q - 1))
        assert not hochschild_delta(hochschild_delta(D))
        assert br(D, E) == br(E, D).scale(-e)
        assert br(D, br(E, F)) == br(br(D, E), F) + br(E, br(D, F)).scale(e)
        assert hochschild_delta(br(D, E)) == br(hochschild_delta(D), E) + br(D, hochschild_delta(E)).scale(sg(p - 1))
        ia = lambda X: i_a_cochain(a, X)
        assert not hochschild_delta(ia(D)) + ia(hochschild_delta(D))
        assert ia(br(D, E)) == br(ia(D), E) + br(D, ia(E)).scale(sg(p - 1))
        assert ia(cup(D, E)) == cup(ia(D), E) + cup(D, ia(E)).scale(sg(p))


def test_hkr_lands_in_cocycles():
    rng = random.Random(7)
    for k in range(3):
        for _ in range(5):
            P = rand_multivector(rng, n, k, 2)
            assert not hochschild_delta(hkr(P))


def test_compose_against_nested_evaluation():
    rng = random.Random(8)
    for _ in range(4):
        p = rng.randint(1, 2)
        D, E = rand_mdo(rng, 2, p, 2), rand_mdo(rng, 2, rng.randint(0, 2), 2)
        cases, bad = compose_pointwise_check(D, E, max_total=3)
        assert cases > 0 and not bad


def test_json_round_trip():
    rng = random.Random(9)
    for arity in range(4):
        D = rand_mdo(rng, 3, arity, 2)
        assert MultiDiffOp.from_json(D.to_json()) == D


def test_linear_structure():
    assert Dx + 0 == Dx
    assert not Dx - Dx
    assert Dx.scale(x)(x * x) == (x * x).scale(2)
    with pytest.raises(ValueError):
        Dx + M
