import itertools
import random

import pytest

from gerbeflow.cartan import (DiffForm, MultiVector, apply_vector_field, contract, contract_iterated,
                              de_rham_d, form_wedge, mv_wedge, one_form, schouten, vector_field)
from gerbeflow.kernel import ArtinRing, Poly, StructuralError, monomials

n = 3
x, y, z = (Poly.var(i, n) for i in range(n))
one = Poly.const(1, n)
dx, dy, dz = (MultiVector.basis((i,), n) for i in range(n))
Dx, Dy, Dz = (DiffForm.basis((i,), n) for i in range(n))


def fn(p):
    return MultiVector.function(p)


def rpoly(rng, D=2):
    ms = monomials(n, D)
    return Poly(n, {m + (0,): rng.choice([-3, -2, -1, 1, 2, 3]) for m in rng.sample(ms, 2)})


def rmv(rng, k):
    combs = list(itertools.combinations(range(n), k))
    return MultiVector(n, {c: rpoly(rng) for c in rng.sample(combs, min(2, len(combs)))})


def sg(e):
    return -1 if e % 2 else 1


def test_wedge_examples():
    assert mv_wedge(dx, dy) == MultiVector.basis((0, 1), n)
    assert not mv_wedge(dx, dx)
    assert mv_wedge(dx.scale(x), dy.scale(y)) == MultiVector.basis((0, 1), n, x * y)
    assert form_wedge(Dx, Dy) == DiffForm.basis((0, 1), n)
    assert not form_wedge(Dx, Dx)
    assert form_wedge(Dy.scale(x), Dz) == DiffForm.basis((1, 2), n, x)


def test_wedge_graded_commutative():
    rng = random.Random(1)
    for _ in range(40):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        P, Q = rmv(rng, p), rmv(rng, q)
        assert mv_wedge(P, Q) == mv_wedge(Q, P).scale(sg(p * q))


def test_de_rham_examples():
    assert de_rham_d(Dy.scale(x)) == DiffForm.basis((0, 1), n)
    assert not de_rham_d(DiffForm.basis((0, 1), n))
    assert de_rham_d(Dz.scale(x * y)) == DiffForm(n, {(0, 2): y, (1, 2): x})


def test_d_squared_and_leibniz():
    rng = random.Random(2)
    for _ in range(40):
        k, l = rng.randint(0, 2), rng.randint(0, 2)
        a = DiffForm(n, {c: rpoly(rng) for c in itertools.combinations(range(n), k)})
        b = DiffForm(n, {c: rpoly(rng) for c in itertools.combinations(range(n), l)})
        assert not de_rham_d(de_rham_d(a))
        assert de_rham_d(form_wedge(a, b)) == form_wedge(de_rham_d(a), b) + form_wedge(a, de_rham_d(b)).scale(sg(k))


def test_contract_examples():
    assert contract(Dx, dx) == fn(one)
    assert contract(Dx, MultiVector.basis((0, 1), n)) == dy
    assert contract(Dy, MultiVector.basis((0, 1), n)) == -dx


def test_contract_rejects_non_one_form():
    with pytest.raises(ValueError):
        contract(DiffForm.basis((0, 1), n), dx)


def test_contract_iterated_examples():
    bv = MultiVector.basis((0, 1), n)
    assert contract_iterated([Dy, Dx], bv) == fn(one)
    assert not contract_iterated([Dx, Dx], MultiVector.basis((0, 1, 2), n))
    assert contract_iterated([], bv) == bv


def test_contract_is_odd_derivation():
    rng = random.Random(5)
    for _ in range(40):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        P, Q = rmv(rng, p), rmv(rng, q)
        a = one_form([rpoly(rng) for _ in range(n)])
        assert contract(a, mv_wedge(P, Q)) == mv_wedge(contract(a, P), Q) + mv_wedge(P, contract(a, Q)).scale(sg(p))


def test_schouten_examples():
    assert schouten(dx, fn(x * x)) == fn(x.scale(2))
    # sign follows the invariant-consistent convention (see README)
    assert schouten(MultiVector.basis((0, 1), n), fn(x * y)) == dx.scale(x) - dy.scale(y)
    assert not schouten(dx, dy)
    assert not schouten(fn(x), fn(y))


def test_schouten_lie_bracket_of_vector_fields():
    rng = random.Random(6)
    for _ in range(30):
        X = vector_field([rpoly(rng) for _ in range(n)])
        Y = vector_field([rpoly(rng) for _ in range(n)])
        f = rpoly(rng)
        br = schouten(X, Y)
        lhs = apply_vector_field(br, f)
        rhs = apply_vector_field(X, apply_vector_field(Y, f)) - apply_vector_field(Y, apply_vector_field(X, f))
        assert lhs == rhs


def test_schouten_invariants():
    rng = random.Random(7)
    for _ in range(100):
        p, q, s = (rng.randint(0, 3) for _ in range(3))
        P, Q, S = rmv(rng, p), rmv(rng, q), rmv(rng, s)
        e = sg((p - 1) * (q - 1))
        assert schouten(P, Q) == schouten(Q, P).scale(-e)
        assert schouten(P, schouten(Q, S)) == schouten(schouten(P, Q), S) + schouten(Q, schouten(P, S)).scale(e)
        assert schouten(P, mv_wedge(Q, S)) == (mv_wedge(schouten(P, Q), S)
                                               + mv_wedge(Q, schouten(P, S)).scale(sg((p - 1) * q)))


def test_schouten_degree():
    rng = random.Random(8)
    for _ in range(30):
        p, q = rng.randint(1, 3), rng.randint(0, 3)
        v = schouten(rmv(rng, p), rmv(rng, q))
        if v:
            assert v.degrees() == [p + q - 1]


def test_chart_mismatch():
    with pytest.raises(StructuralError):
        schouten(dx, MultiVector.basis((0,), 2))


def test_canonical_form_and_json():
    R = ArtinRing(order=2)
    v = MultiVector(n, {(1, 0): x.with_ring(R), (0, 1): y.with_ring(R)}, R)
    assert list(v.terms) == [(0, 1)]
    assert v.coefficient((0, 1)) == (y - x).with_ring(R)
    assert MultiVector.from_json(v.to_json(), R) == v
    w = DiffForm(n, {(2, 0): x, (1,): one})
    assert DiffForm.from_json(w.to_json()) == w
    assert "covs" in w.to_json()["terms"][0]
