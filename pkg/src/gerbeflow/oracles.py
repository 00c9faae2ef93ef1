"""Exhaustive cross-checks against independent brute-force computations."""

from __future__ import annotations

import random
from itertools import product

from .hochschild import MultiDiffOp, gerst_compose_i, mdo_eval
from .kernel import Permutation, Poly, all_permutations, koszul_sign, koszul_sign_images, monomials
from .randgen import rand_mdo


def _wedge_sign_bruteforce(images, degrees) -> int:
    """Sign of reordering a graded word by selection sort (independent of the bubble sort)."""
    word = [(i, degrees[i]) for i in images]
    sign = 1
    for target in range(len(word)):
        j = next(k for k in range(target, len(word)) if word[k][0] == target)
        # move word[j] left past word[target..j-1]
        d = word[j][1]
        for k in range(target, j):
            if d * word[k][1] % 2:
                sign = -sign
        word.insert(target, word.pop(j))
    return sign


def koszul_exhaustive(m: int = 5, seed: int = 0, vectors_per_pair: int = 1) -> tuple[int, list]:
    """Check the cocycle law and agreement with a selection-sort oracle on all of S_m x S_m.

    For every pair (s, t) and sampled degree vectors d in {0..3}^m:
    ``eps(t*s, d) == eps(s, t.d) * eps(t, d)`` and both implementations
    agree with :func:`_wedge_sign_bruteforce`.  Returns (cases, failures).
    """
    rng = random.Random(f"koszul:{seed}")
    perms = list(all_permutations(m))
    cases, bad = 0, []
    for s in perms:
        for t in perms:
            for _ in range(vectors_per_pair):
                d = [rng.randint(0, 3) for _ in range(m)]
                lhs = koszul_sign(t * s, d)
                rhs = koszul_sign(s, t.permute(d)) * koszul_sign(t, d)
                ref = _wedge_sign_bruteforce((t * s).images, d)
                fast = koszul_sign_images((t * s).images, d)
                cases += 1
                if not lhs == rhs == ref == fast:
                    bad.append((s.images, t.images, tuple(d)))
    return cases, bad


def _monomial_tuples(n: int, arity: int, max_total: int):
    """All tuples of monomials whose degrees add up to at most ``max_total``."""
    by_deg = {}
    for e in monomials(n, max_total):
        by_deg.setdefault(sum(e), []).append(e)

    def rec(k, budget):
        if k == 0:
            yield ()
            return
        for d in range(budget + 1):
            for e in by_deg.get(d, []):
                for rest in rec(k - 1, budget - d):
                    yield (e,) + rest

    yield from rec(arity, max_total)


def compose_pointwise_check(D: MultiDiffOp, E: MultiDiffOp, max_total: int = 4) -> tuple[int, list]:
    """Compare the closed-form ``D o_i E`` with nested evaluation on monomial tuples."""
    n, ring = D.num_vars, D.ring
    p, q = D.arity, E.arity
    cases, bad = 0, []
    for i in range(1, p + 1):
        C = gerst_compose_i(D, E, i)
        for exps in _monomial_tuples(n, p + q - 1, max_total):
            args = [Poly.monomial(e, 1, ring) for e in exps]
            inner = mdo_eval(E, args[i - 1:i - 1 + q])
            direct = mdo_eval(D, args[:i - 1] + [inner] + args[i - 1 + q:])
            cases += 1
            if mdo_eval(C, args) != direct:
                bad.append((i, exps))
    return cases, bad


def compose_pointwise_suite(pairs: int = 30, n: int = 3, seed: int = 0, max_total: int = 4):
    """Run :func:`compose_pointwise_check` on seeded operators (arity <= 3, order <= 2)."""
    rng = random.Random(f"compose:{seed}")
    cases, bad = 0, []
    for _ in range(pairs):
        p = rng.randint(1, 3)
        q = rng.randint(0, 4 - p)
        D = rand_mdo(rng, n, p, 2)
        E = rand_mdo(rng, n, q, 2)
        c, b = compose_pointwise_check(D, E, max_total)
        cases += c
        bad.extend(b)
    return cases, bad
