"""Deligne groupoid operations for a nilpotent DGLA of multivectors.

Degrees are shifted by one: functions sit in degree -1, vector fields in
degree 0, bivectors in degree 1 and trivectors in degree 2.  Nilpotency
comes from the coefficient ring Q[h]/(h^N): every element used here has
coefficients divisible by h, so brackets of length N vanish.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Callable, Optional

from gmpy2 import mpq

from .cartan import MultiVector, schouten
from .kernel import QQ, ArtinRing

Bracket = Callable[[MultiVector, MultiVector], MultiVector]


class NilpotentDGLA:
    """A bracket/differential pair on multivectors over an Artin ring.

    Parameters
    ----------
    num_vars : int
    ring : ArtinRing
        Nilpotency order is ``ring.order``.
    bracket : callable, optional
        Graded Lie bracket; the Schouten bracket by default.
    differential : callable, optional
        Degree +1 derivation squaring to zero; ``None`` means ``d = 0``.
    """

    def __init__(self, num_vars: int, ring: ArtinRing = QQ, bracket: Optional[Bracket] = None,
                 differential: Optional[Callable[[MultiVector], MultiVector]] = None):
        self.num_vars = num_vars
        self.ring = ring
        self.bracket = bracket or schouten
        self._d = differential

    @classmethod
    def schouten(cls, num_vars: int, ring: ArtinRing) -> "NilpotentDGLA":
        return cls(num_vars, ring)

    @classmethod
    def poisson_twisted(cls, pi0: MultiVector) -> "NilpotentDGLA":
        """Schouten bracket with ``d = [pi0, -]`` for a Poisson bivector ``pi0``."""
        if schouten(pi0, pi0):
            raise ValueError("pi0 is not Poisson, so [pi0, -] does not square to zero")
        return cls(pi0.num_vars, pi0.ring, differential=lambda x: schouten(pi0, x))

    @property
    def order(self) -> int:
        return self.ring.order

    def zero(self) -> MultiVector:
        return MultiVector.zero(self.num_vars, self.ring)

    def d(self, x: MultiVector) -> MultiVector:
        if self._d is None or not x:
            return self.zero()
        return self._d(x)

    def br(self, a: MultiVector, b: MultiVector) -> MultiVector:
        if not a or not b:
            return self.zero()
        return self.bracket(a, b)

    def check_element(self, x: MultiVector, degree: int, what: str = "element") -> None:
        """Check the shifted degree and that every coefficient carries a power of h."""
        if not x:
            return
        if x.num_vars != self.num_vars or x.ring != self.ring:
            raise ValueError(f"{what} lives on another chart or ring")
        if x.degrees() != [degree + 1]:
            raise ValueError(f"{what} must have degree {degree}")
        if x.h_valuation() < 1:
            raise ValueError(f"{what} must have coefficients in the maximal ideal")


def is_mc(g: NilpotentDGLA, gamma: MultiVector) -> MultiVector:
    """Curvature d(gamma) + 1/2 [gamma, gamma]; zero iff gamma is Maurer-Cartan."""
    g.check_element(gamma, 1, "gamma")
    return g.d(gamma) + g.br(gamma, gamma).scale(mpq(1, 2))


def ad_exp(g: NilpotentDGLA, lam: MultiVector, x: MultiVector) -> MultiVector:
    """exp(ad_lam)(x), summed until the terms vanish."""
    out, term, k = x, x, 1
    while term:
        term = g.br(lam, term).scale(mpq(1, k))
        out = out + term
        k += 1
    return out


def gauge_action(g: NilpotentDGLA, lam: MultiVector, gamma: MultiVector) -> MultiVector:
    """exp(lam) . gamma = gamma + sum_k ad_lam^k / (k+1)! ([lam, gamma] - d lam)."""
    g.check_element(lam, 0, "lambda")
    g.check_element(gamma, 1, "gamma")
    seed = g.br(lam, gamma) - g.d(lam)
    out, term, k = gamma, seed, 1
    # term_k = ad^k(seed) / (k+1)!
    while term:
        out = out + term
        term = g.br(lam, term).scale(mpq(1, k + 1))
        k += 1
    return out


@lru_cache(maxsize=None)
def dynkin_series(max_len: int) -> tuple:
    """Dynkin coefficients of log(e^a e^b) up to word length ``max_len``.

    Returns ``((coef, word), ...)`` where ``word`` is a string over
    ``"ab"`` standing for the right-nested bracket ``[w1, [w2, .. [w_{m-1}, w_m]..]]``.
    """
    acc: dict[str, mpq] = {}

    def blocks(remaining: int):
        # sequences of (r, s) pairs with r + s >= 1 and total length <= remaining
        if remaining == 0:
            yield ()
            return
        yield ()
        for r in range(remaining + 1):
            for s in range(remaining + 1 - r):
                if r + s == 0:
                    continue
                for rest in blocks(remaining - r - s):
                    yield ((r, s),) + rest

    for seq in blocks(max_len):
        if not seq:
            continue
        k = len(seq)
        total = sum(r + s for r, s in seq)
        denom = total
        for r, s in seq:
            denom *= factorial(r) * factorial(s)
        coef = mpq(-1 if (k - 1) % 2 else 1, k * denom)
        word = "".join("a" * r + "b" * s for r, s in seq)
        # the innermost bracket vanishes when the last two letters agree
        if len(word) > 1 and word[-1] == word[-2]:
            continue
        acc[word] = acc.get(word, 0) + coef
    return tuple((c, w) for w, c in sorted(acc.items(), key=lambda t: (len(t[0]), t[0])) if c)


def _nested(g: NilpotentDGLA, word: str, a: MultiVector, b: MultiVector, memo: dict) -> MultiVector:
    if word in memo:
        return memo[word]
    tail = _nested(g, word[1:], a, b, memo)
    val = g.br(a if word[0] == "a" else b, tail)
    memo[word] = val
    return val


def bch(g: NilpotentDGLA, a: MultiVector, b: MultiVector) -> MultiVector:
    """Baker-Campbell-Hausdorff product, truncated at bracket length N - 1."""
    g.check_element(a, 0, "a")
    g.check_element(b, 0, "b")
    memo = {"a": a, "b": b}
    out = g.zero()
    for coef, word in dynkin_series(max(g.order - 1, 1)):
        v = _nested(g, word, a, b, memo)
        if v:
            out = out + v.scale(coef)
    return out


def bch_inverse(g: NilpotentDGLA, a: MultiVector) -> MultiVector:
    return -a


def twisted_differential(g: NilpotentDGLA, gamma: MultiVector, a: MultiVector) -> MultiVector:
    """d_gamma a = da + [gamma, a]."""
    return g.d(a) + g.br(gamma, a)


def two_cell_target(g: NilpotentDGLA, lam: MultiVector, a: MultiVector, gamma: MultiVector) -> MultiVector:
    """The 1-morphism reached from ``lam`` through the 2-morphism ``a`` at ``gamma``."""
    g.check_element(a, -1, "a")
    g.check_element(gamma, 1, "gamma")
    return bch(g, lam, twisted_differential(g, gamma, a))
