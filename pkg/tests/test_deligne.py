import random
from fractions import Fraction

import pytest

from gerbeflow.cartan import MultiVector, schouten
from gerbeflow.deligne import (NilpotentDGLA, ad_exp, bch, bch_inverse, dynkin_series, gauge_action, is_mc,
                               twisted_differential, two_cell_target)
from gerbeflow.kernel import ArtinRing, Poly
from gerbeflow.randgen import rand_multivector, rand_poly


def setup(n, N):
    R = ArtinRing(order=N)
    h = Poly.hbar(n, R)
    xs = [Poly.var(i, n, R) for i in range(n)]
    return R, h, xs


# free truncated associative algebra on a, b: {word: Fraction}
def _mul(p, q, L):
    out = {}
    for u, c in p.items():
        for v, d in q.items():
            if len(u) + len(v) <= L:
                out[u + v] = out.get(u + v, 0) + c * d
    return {w: c for w, c in out.items() if c}


def _exp(p, L):
    out, term = {"": Fraction(1)}, {"": Fraction(1)}
    for k in range(1, L + 1):
        term = {w: c / k for w, c in _mul(term, p, L).items()}
        for w, c in term.items():
            out[w] = out.get(w, 0) + c
    return {w: c for w, c in out.items() if c}


def _log(p, L):
    u = {w: c for w, c in p.items() if w}
    out, power = {}, {"": Fraction(1)}
    for k in range(1, L + 1):
        power = _mul(power, u, L)
        for w, c in power.items():
            out[w] = out.get(w, 0) + c * Fraction((-1) ** (k + 1), k)
    return {w: c for w, c in out.items() if c}


def _expand(word):
    # right-nested commutator as a sum of words
    if len(word) == 1:
        return {word: Fraction(1)}
    inner = _expand(word[1:])
    out = {}
    for w, c in inner.items():
        out[word[0] + w] = out.get(word[0] + w, 0) + c
        out[w + word[0]] = out.get(w + word[0], 0) - c
    return out


def test_dynkin_matches_free_algebra():
    L = 5
    a, b = {"a": Fraction(1)}, {"b": Fraction(1)}
    ref = _log(_mul(_exp(a, L), _exp(b, L), L), L)
    got = {}
    for coef, word in dynkin_series(L):
        for w, c in _expand(word).items():
            got[w] = got.get(w, 0) + Fraction(int(coef.numerator), int(coef.denominator)) * c
    assert {w: c for w, c in got.items() if c} == ref


def test_dynkin_low_order_terms():
    terms = {w: c for c, w in dynkin_series(3)}
    assert terms["a"] == 1 and terms["b"] == 1
    # words are not reduced to a basis, so [a, b] collects from "ab" and "ba"
    assert terms["ab"] - terms["ba"] == Fraction(1, 2)


def test_is_mc_examples():
    n = 2
    R, h, (x, y) = setup(n, 3)
    g = NilpotentDGLA(n, R)
    assert not is_mc(g, MultiVector.basis((0, 1), n, h * x, R))
    g2 = NilpotentDGLA.poisson_twisted(MultiVector.basis((0, 1), n, 1, R))
    # [dx^dy, f dx^dy] = 0 in two dimensions
    assert not is_mc(g2, MultiVector.basis((0, 1), n, h * x * y, R))
    n = 3
    R, h, (x, y, z) = setup(n, 3)
    g3 = NilpotentDGLA(n, R)
    pi = MultiVector.basis((0, 1), n, h * y, R) + MultiVector.basis((1, 2), n, h, R)
    assert is_mc(g3, pi) == schouten(pi, pi).scale(Fraction(1, 2))
    assert is_mc(g3, pi)


def test_gauge_example():
    n = 2
    R, h, (x, y) = setup(n, 3)
    g = NilpotentDGLA(n, R)
    lam = MultiVector.basis((0,), n, h * x, R)
    gamma = MultiVector.basis((0, 1), n, h, R)
    assert gauge_action(g, lam, gamma) == MultiVector.basis((0, 1), n, h - h * h, R)


def test_gauge_with_differential_moves_zero():
    n = 2
    R, h, (x, y) = setup(n, 2)
    pi0 = MultiVector.basis((0, 1), n, 1, R)
    g = NilpotentDGLA.poisson_twisted(pi0)
    lam = MultiVector.basis((0,), n, h * x, R)
    # exp(lam) . 0 = -d(lam) modulo h^2
    assert gauge_action(g, lam, g.zero()) == schouten(pi0, lam).scale(-1)
    assert not is_mc(g, gauge_action(g, lam, g.zero()))


def test_bch_examples():
    n = 2
    R, h, (x, y) = setup(n, 3)
    g = NilpotentDGLA(n, R)
    a = MultiVector.basis((0,), n, h * x, R)
    b = MultiVector.basis((1,), n, h * x, R)
    expect = MultiVector.basis((0,), n, h * x, R) + MultiVector.basis((1,), n, h * x + (h * h * x).scale(Fraction(1, 2)), R)
    assert bch(g, a, b) == expect
    R2, h2, (x2, _) = setup(n, 2)
    g2 = NilpotentDGLA(n, R2)
    a2 = MultiVector.basis((0,), n, h2 * x2, R2)
    b2 = MultiVector.basis((1,), n, h2 * x2, R2)
    # modulo h^2 the product is plain addition
    assert bch(g2, a2, b2) == a2 + b2


def test_bch_group_laws():
    rng = random.Random(2)
    for _ in range(10):
        n, N = rng.choice([2, 3]), rng.randint(2, 4)
        R = ArtinRing(order=N)
        g = NilpotentDGLA(n, R)
        a, b, c = (rand_multivector(rng, n, 1, 2, R, hmin=1) for _ in range(3))
        assert bch(g, a, bch(g, b, c)) == bch(g, bch(g, a, b), c)
        assert not bch(g, a, bch_inverse(g, a))
        assert bch(g, a, g.zero()) == a


def test_action_law_and_curvature():
    rng = random.Random(3)
    for _ in range(10):
        n, N = rng.choice([2, 3]), rng.randint(2, 4)
        R = ArtinRing(order=N)
        g = NilpotentDGLA.poisson_twisted(MultiVector.basis((0, 1), n, 1, R))
        f = rand_poly(rng, n, 2, R, hmin=1)
        gamma = gauge_action(g, rand_multivector(rng, n, 1, 1, R, hmin=1), MultiVector.basis((0, 1), n, f, R))
        assert not is_mc(g, gamma)
        lam, b = (rand_multivector(rng, n, 1, 2, R, hmin=1) for _ in range(2))
        assert gauge_action(g, bch(g, lam, b), gamma) == gauge_action(g, lam, gauge_action(g, b, gamma))
        rho = rand_multivector(rng, n, 2, 2, R, hmin=1)
        assert is_mc(g, gauge_action(g, lam, rho)) == ad_exp(g, lam, is_mc(g, rho))


def test_two_cell_examples():
    n = 2
    R, h, (x, y) = setup(n, 3)
    g = NilpotentDGLA(n, R)
    lam = MultiVector.basis((0,), n, h * y, R)
    gamma = MultiVector.basis((0, 1), n, h, R)
    assert two_cell_target(g, lam, g.zero(), gamma) == lam
    a = MultiVector.function(h * x * y)
    t = two_cell_target(g, g.zero(), a, gamma)
    assert t == MultiVector.basis((0,), n, h * h * x, R) - MultiVector.basis((1,), n, h * h * y, R)
    assert twisted_differential(g, gamma, a) == t


def test_check_element_errors():
    n = 2
    R, h, (x, y) = setup(n, 3)
    g = NilpotentDGLA(n, R)
    with pytest.raises(ValueError):
        is_mc(g, MultiVector.basis((0,), n, h, R))
    with pytest.raises(ValueError):
        is_mc(g, MultiVector.basis((0, 1), n, x, R))
    with pytest.raises(ValueError):
        bch(g, MultiVector.basis((0,), 3, Poly.hbar(3, R), R), g.zero())
    with pytest.raises(ValueError):
        NilpotentDGLA.poisson_twisted(MultiVector.basis((0, 1), 3, Poly.var(1, 3, R), R)
                                      + MultiVector.basis((1, 2), 3, 1, R))
