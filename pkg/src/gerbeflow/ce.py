"""Chevalley-Eilenberg cochains on the shifted Schouten algebra.

A cochain is an evaluator handle: a multilinear, graded-symmetric map
from ``arity`` multivectors to a multivector, together with its degree
(``sign_degree``) in the shifted CE complex.  Composites are built by the
insertion formula

    (phi o psi)(p_1..p_n) = 1/(k!(l-1)!) sum_s eps(s) phi(psi(p_s1..p_sk), p_s(k+1)..)

with ``k = psi.arity``, ``l = phi.arity`` and ``eps`` the Koszul sign of the
polyvector degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from gmpy2 import mpq
from itertools import combinations, combinations_with_replacement, permutations, product
from math import factorial
from typing import Callable, Iterable, Sequence

from .cartan import DiffForm, MultiVector, contract_basis, mv_wedge, schouten
from .kernel import QQ, ArtinRing, Poly, koszul_sign_images, monomials


class DomainError(ValueError):
    """Composition is undefined for the given arities."""


Evaluator = Callable[[tuple, tuple], MultiVector]


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


@dataclass(frozen=True)
class CochainHandle:
    """Multilinear graded-symmetric operator on multivectors.

    ``evaluator(args, degs)`` receives homogeneous, nonzero multivectors and
    their polyvector degrees.  Calling the handle extends it multilinearly
    to arbitrary (mixed-degree or zero) arguments.
    """

    arity: int
    sign_degree: int
    evaluator: Evaluator = field(repr=False, compare=False)
    num_vars: int
    ring: ArtinRing = QQ
    tag: str = "composite"

    def zero_value(self) -> MultiVector:
        return MultiVector.zero(self.num_vars, self.ring)

    def __call__(self, *args: MultiVector) -> MultiVector:
        if len(args) != self.arity:
            raise ValueError(f"{self.tag} expects {self.arity} arguments, got {len(args)}")
        parts = []
        for a in args:
            if a.num_vars != self.num_vars or a.ring != self.ring:
                raise ValueError("argument lives on a different chart or ring")
            hp = a.homogeneous_parts()
            if not hp:
                return self.zero_value()
            parts.append(hp)
        if all(len(p) == 1 for p in parts):
            return self.evaluator(tuple(p[0] for p in parts),
                                  tuple(len(next(iter(p[0].terms))) for p in parts))
        out = self.zero_value()
        for combo in product(*parts):
            degs = tuple(len(next(iter(c.terms))) for c in combo)
            out = out + self.evaluator(combo, degs)
        return out


def _degree(a: MultiVector) -> int:
    return len(next(iter(a.terms)))


# ---------------------------------------------------------------------------
# the distinguished cochain m and the morphism Phi


def m_cochain(num_vars: int, ring: ArtinRing = QQ) -> CochainHandle:
    """m(pi, rho) = (-1)^|pi| [pi, rho]."""

    def ev(args, degs):
        v = schouten(args[0], args[1])
        return -v if degs[0] % 2 else v

    return CochainHandle(2, 1, ev, num_vars, ring, tag="m")


def _alternating_wedge(rows: Sequence[Sequence[MultiVector]], num_vars: int,
                       ring: ArtinRing) -> MultiVector:
    """sum_s sgn(s) rows[s(0)][0] ^ rows[s(1)][1] ^ ... (a graded determinant)."""
    k = len(rows)
    one = MultiVector.basis((), num_vars, 1, ring)

    # expand slot by slot, memoising on the set of used rows
    memo: dict[tuple[int, frozenset], MultiVector] = {}

    def tail(t: int, used: frozenset) -> MultiVector:
        if t == k:
            return one
        key = (t, used)
        if key in memo:
            return memo[key]
        acc = MultiVector.zero(num_vars, ring)
        for r in range(k):
            if r in used:
                continue
            head = rows[r][t]
            if not head:
                continue
            rest = tail(t + 1, used | {r})
            if not rest:
                continue
            # sign of the row permutation: rows smaller than r still unused
            # after r is placed contribute one inversion each
            inv = sum(1 for u in range(r) if u not in used)
            term = mv_wedge(head, rest)
            acc = acc + (-term if inv % 2 else term)
        memo[key] = acc
        return acc

    return tail(0, frozenset())


def phi_homogeneous(omega: DiffForm) -> CochainHandle:
    """Phi of a form of pure degree k as an arity-k handle of degree k-2."""
    degs = omega.degrees()
    if len(degs) > 1:
        raise ValueError("phi_homogeneous needs a form of pure degree")
    n, ring = omega.num_vars, omega.ring
    k = degs[0] if degs else 0
    if k == 0:
        f = omega.coefficient(())

        def ev0(args, _degs):
            return MultiVector.function(f)

        return CochainHandle(0, -2, ev0, n, ring, tag="phi-of-form")

    terms = list(omega.terms.items())
    needed = sorted({j for I, _ in terms for j in I})

    def ev(args, adegs):
        e = sum((k - i) * (adegs[i - 1] - 1) for i in range(1, k))
        cb = {j: [contract_basis(j, a) for a in args] for j in needed}
        out = MultiVector.zero(n, ring)
        for I, coef in terms:
            rows = [cb[j] for j in I]
            val = _alternating_wedge(rows, n, ring)
            if val:
                out = out + val.scale(coef)
        return -out if e % 2 else out

    return CochainHandle(k, k - 2, ev, n, ring, tag="phi-of-form")


def phi_of_form(omega: DiffForm) -> list[CochainHandle]:
    """One handle per homogeneous component of ``omega`` (ascending degree)."""
    return [phi_homogeneous(part) for part in omega.homogeneous_parts()]


# ---------------------------------------------------------------------------
# composition, bracket and differential


def _unshuffles(n: int, k: int) -> Iterable[tuple[int, ...]]:
    for head in combinations(range(n), k):
        hs = set(head)
        yield head + tuple(i for i in range(n) if i not in hs)


def ce_compose(phi: CochainHandle, psi: CochainHandle, *, strategy: str = "shuffle") -> CochainHandle:
    """Insertion composite ``phi o psi``.

    ``strategy="full"`` sums over all of S_{k+l-1} with the 1/(k!(l-1)!)
    prefactor.  ``strategy="shuffle"`` sums over (k, l-1)-unshuffles only;
    the two agree whenever both inputs are graded-symmetric.
    """
    if phi.arity == 0:
        raise DomainError("cannot insert into an arity-0 cochain")
    if (phi.num_vars, phi.ring) != (psi.num_vars, psi.ring):
        raise ValueError("cochains live on different charts")
    if strategy not in ("full", "shuffle"):
        raise ValueError(f"unknown strategy {strategy!r}")
    k, l = psi.arity, phi.arity
    n = k + l - 1
    pref = mpq(1, factorial(k) * factorial(l - 1))

    def ev(args, degs):
        inner_cache: dict[tuple[int, ...], MultiVector] = {}
        out = phi.zero_value()
        if strategy == "full":
            sigmas = permutations(range(n))
        else:
            sigmas = _unshuffles(n, k)
        for images in sigmas:
            eps = koszul_sign_images(images, degs)
            head = images[:k]
            inner = inner_cache.get(head)
            if inner is None:
                inner = psi(*(args[i] for i in head))
                inner_cache[head] = inner
            if not inner:
                continue
            val = phi(inner, *(args[i] for i in images[k:]))
            if val:
                out = out + (val if eps > 0 else -val)
        return out.scale(pref) if strategy == "full" else out

    return CochainHandle(n, phi.sign_degree + psi.sign_degree, ev, phi.num_vars, phi.ring,
                         tag=f"({phi.tag} o {psi.tag})")


def trace_compose(phi: CochainHandle, psi: CochainHandle, args: Sequence[MultiVector],
                  emit: Callable[[str], None] = print) -> MultiVector:
    """Evaluate ``phi o psi`` by the full sum, emitting one line per sigma-term."""
    k, l = psi.arity, phi.arity
    n = k + l - 1
    if len(args) != n:
        raise ValueError(f"expected {n} arguments")
    degs = tuple(_degree(a) for a in args)
    pref = mpq(1, factorial(k) * factorial(l - 1))
    out = phi.zero_value()
    for images in permutations(range(n)):
        eps = koszul_sign_images(images, degs)
        val = phi(psi(*(args[i] for i in images[:k])), *(args[i] for i in images[k:]))
        emit(f"sigma={list(images)} eps={eps:+d} term={val.to_str()}")
        out = out + (val if eps > 0 else -val)
    out = out.scale(pref)
    emit(f"prefactor={pref} total={out.to_str()}")
    return out


def zero_cochain(arity: int, sign_degree: int, num_vars: int, ring: ArtinRing = QQ) -> CochainHandle:
    def ev(args, degs):
        return MultiVector.zero(num_vars, ring)

    return CochainHandle(arity, sign_degree, ev, num_vars, ring, tag="0")


def linear_combination(pairs: Sequence[tuple[int | mpq, CochainHandle]]) -> CochainHandle:
    """Pointwise sum of handles of equal arity and degree."""
    first = pairs[0][1]
    for _, h in pairs:
        if h.arity != first.arity:
            raise ValueError("arity mismatch in linear combination")

    def ev(args, degs):
        out = first.zero_value()
        for c, h in pairs:
            v = h.evaluator(args, degs)
            if v:
                out = out + v.scale(c)
        return out

    tag = " + ".join(f"{c}*{h.tag}" for c, h in pairs)
    return CochainHandle(first.arity, first.sign_degree, ev, first.num_vars, first.ring, tag=tag)


def ce_bracket(phi: CochainHandle, psi: CochainHandle, *, strategy: str = "shuffle") -> CochainHandle:
    """[phi, psi] = phi o psi - (-1)^(|phi||psi|) psi o phi.

    A composite into an arity-0 cochain is zero (nothing to insert into).
    """
    n = phi.arity + psi.arity - 1
    if n < 0:
        raise DomainError("bracket of two arity-0 cochains")
    deg = phi.sign_degree + psi.sign_degree
    pairs = []
    if phi.arity > 0:
        pairs.append((1, ce_compose(phi, psi, strategy=strategy)))
    if psi.arity > 0:
        pairs.append((-_sgn(phi.sign_degree * psi.sign_degree),
                      ce_compose(psi, phi, strategy=strategy)))
    out = linear_combination(pairs)
    return CochainHandle(n, deg, out.evaluator, phi.num_vars, phi.ring,
                         tag=f"[{phi.tag}, {psi.tag}]")


def ce_differential(phi: CochainHandle, *, strategy: str = "shuffle") -> CochainHandle:
    """Differential of the CE complex, d phi = [phi, m] = -(-1)^|phi| [m, phi].

    The right adjoint action is the normalisation under which Phi(alpha)
    is a chain map for every form degree; the left action [m, phi] agrees
    with it for odd |phi| and differs by a sign for even |phi|.
    """
    out = ce_bracket(phi, m_cochain(phi.num_vars, phi.ring), strategy=strategy)
    return CochainHandle(out.arity, out.sign_degree, out.evaluator, out.num_vars, out.ring,
                         tag=f"d({phi.tag})")


# ---------------------------------------------------------------------------
# equality of handles


def spanning_family(num_vars: int, poly_degree: int, max_mv_degree: int,
                    ring: ArtinRing = QQ) -> list[MultiVector]:
    """All monomial multivectors x^a d_I with |a| <= poly_degree, |I| <= max_mv_degree."""
    fam = []
    for k in range(max_mv_degree + 1):
        for dirs in combinations(range(num_vars), k):
            for exp in monomials(num_vars, poly_degree):
                fam.append(MultiVector.basis(dirs, num_vars, Poly.monomial(exp, 1, ring), ring))
    return fam


def first_disagreement(a: CochainHandle, b: CochainHandle,
                       tuples: Iterable[Sequence[MultiVector]]):
    """The first argument tuple on which the handles differ, or ``None``."""
    if a.arity != b.arity:
        raise ValueError("arity mismatch")
    for t in tuples:
        va, vb = a(*t), b(*t)
        if va != vb:
            return tuple(t), va, vb
    return None


def agree_on_family(a: CochainHandle, b: CochainHandle, family: Sequence[MultiVector]) -> bool:
    """Compare two graded-symmetric handles on every multiset drawn from ``family``."""
    tuples = combinations_with_replacement(family, a.arity)
    return first_disagreement(a, b, tuples) is None


def symmetry_defect(h: CochainHandle, args: Sequence[MultiVector], i: int):
    """h(.., p_{i+1}, p_i, ..) - eps * h(.., p_i, p_{i+1}, ..) on homogeneous args."""
    degs = [_degree(a) for a in args]
    swapped = list(args)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    eps = -1 if (degs[i] % 2 and degs[i + 1] % 2) else 1
    return h(*swapped) - h(*args).scale(eps)


__all__ = [
    "CochainHandle", "DomainError", "m_cochain", "phi_homogeneous", "phi_of_form", "ce_compose",
    "ce_bracket", "ce_differential", "trace_compose", "zero_cochain", "linear_combination",
    "spanning_family", "first_disagreement", "agree_on_family", "symmetry_defect",
]
