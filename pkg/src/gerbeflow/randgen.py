"""Seeded random generators for the property suites.

Every trial gets its own ``random.Random`` seeded from a string, so
results depend only on (suite, seed, trial index) and not on the order
in which trials run.  Coefficients are integers in [-3, 3].
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Optional

from .cartan import DiffForm, MultiVector, de_rham_d
from .hochschild import MultiDiffOp
from .kernel import QQ, ArtinRing, Poly, monomials

GENERATOR_NAME = "random.Random/mt19937-v1"
COEFFS = (-3, -2, -1, 1, 2, 3)


def trial_rng(suite: str, seed: int, trial: int) -> random.Random:
    return random.Random(f"gerbeflow:{suite}:{seed}:{trial}")


def rand_poly(rng: random.Random, n: int, max_deg: int, ring: ArtinRing = QQ,
              terms: int = 2, hmin: int = 0) -> Poly:
    """A sum of ``terms`` random monomials with nonzero integer coefficients.

    h-exponents are drawn from ``[hmin, ring.order)``.
    """
    if hmin >= ring.order:
        return Poly.zero(n, ring)
    ms = monomials(n, max_deg)
    picked = rng.sample(ms, min(terms, len(ms)))
    flat = {m + (rng.randint(hmin, ring.order - 1),): rng.choice(COEFFS) for m in picked}
    return Poly(n, flat, ring)


def _rand_graded(cls, rng, n, k, max_deg, ring, terms, hmin):
    combs = list(combinations(range(n), k))
    if not combs:
        return cls.zero(n, ring)
    picked = rng.sample(combs, min(terms, len(combs)))
    return cls(n, {c: rand_poly(rng, n, max_deg, ring, hmin=hmin) for c in picked}, ring)


def rand_multivector(rng, n: int, k: int, max_deg: int, ring: ArtinRing = QQ,
                     terms: int = 2, hmin: int = 0) -> MultiVector:
    return _rand_graded(MultiVector, rng, n, k, max_deg, ring, terms, hmin)


def rand_form(rng, n: int, k: int, max_deg: int, ring: ArtinRing = QQ,
              terms: int = 2, hmin: int = 0) -> DiffForm:
    return _rand_graded(DiffForm, rng, n, k, max_deg, ring, terms, hmin)


def rand_nonzero(make, rng, tries: int = 20):
    """Call ``make(rng)`` until it returns something nonzero."""
    for _ in range(tries):
        x = make(rng)
        if x:
            return x
    return x


def rand_closed_3form(rng, n: int, ring: ArtinRing = QQ, linear: Optional[bool] = None) -> DiffForm:
    """Closed 3-form with constant or linear coefficients.

    A random constant 3-form plus, for linear coefficients, d of a
    2-form with coefficients of degree <= 2.
    """
    if linear is None:
        linear = rng.random() < 0.5
    H = rand_form(rng, n, 3, 0, ring, terms=2)
    if linear:
        B = rand_form(rng, n, 2, 2, ring, terms=2)
        H = H + de_rham_d(B)
    return H


def rand_mdo(rng, n: int, arity: int, order: int, ring: ArtinRing = QQ, terms: int = 2,
             coef_deg: int = 2) -> MultiDiffOp:
    """Random multidifferential operator with ``terms`` (betas, coefficient) pairs."""
    ms = monomials(n, order)
    out = MultiDiffOp.zero(n, arity, ring)
    for _ in range(terms):
        betas = tuple(rng.choice(ms) for _ in range(arity))
        out = out + MultiDiffOp(n, arity, {betas: rand_poly(rng, n, coef_deg, ring)}, ring)
    return out
