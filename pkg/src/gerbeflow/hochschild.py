"""Hochschild cochains of A = Q[x_1..x_n] as multidifferential operators.

A p-cochain is a finite sum of terms ``coef * d^{b_1}(a_1) ... d^{b_p}(a_p)``
stored as ``{(b_1, ..., b_p): coef}``.  Insertions are computed in closed
form by the multinomial Leibniz rule, so equality is syntactic.

Sign conventions: the total insertion is

    D o E = sum_i (-1)^((q-1)(p-i)) D o_i E

which makes ``[m, D]`` the standard coboundary
``a_1 D(..) - D(a_1 a_2, ..) + ... + (-1)^(p+1) D(..) a_{p+1}`` and turns the
explicit insertion operator ``i_a`` into a derivation of the bracket that
anticommutes with the differential.
"""

from __future__ import annotations

from gmpy2 import mpq
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Mapping, Sequence

from .cartan import MultiVector
from .kernel import QQ, ArtinRing, Permutation, Poly, StructuralError

Beta = tuple[int, ...]
BetaTuple = tuple[Beta, ...]


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


class MultiDiffOp:
    """A multidifferential operator of arity ``p`` with polynomial coefficients."""

    __slots__ = ("num_vars", "arity", "ring", "_terms", "_hash")

    def __init__(self, num_vars: int, arity: int, terms: Mapping[BetaTuple, Poly] | None = None,
                 ring: ArtinRing = QQ, *, _trusted: bool = False):
        if arity < 0:
            raise ValueError("arity must be >= 0")
        self.num_vars = num_vars
        self.arity = arity
        self.ring = ring
        if _trusted:
            self._terms = terms
        else:
            clean: dict[BetaTuple, Poly] = {}
            for betas, coef in (terms or {}).items():
                betas = tuple(tuple(int(e) for e in b) for b in betas)
                if len(betas) != arity or any(len(b) != num_vars for b in betas):
                    raise StructuralError(f"bad multi-index tuple {betas} for arity {arity}")
                if not isinstance(coef, Poly):
                    coef = Poly.const(coef, num_vars, ring)
                if coef.num_vars != num_vars or coef.ring != ring:
                    raise StructuralError("coefficient on a different chart or ring")
                clean[betas] = clean[betas] + coef if betas in clean else coef
            self._terms = {b: c for b, c in clean.items() if c}
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, arity: int, ring: ArtinRing = QQ) -> "MultiDiffOp":
        return cls(num_vars, arity, {}, ring, _trusted=True)

    @classmethod
    def element(cls, f: Poly) -> "MultiDiffOp":
        """An element of A viewed as a 0-cochain."""
        return cls(f.num_vars, 0, {(): f}, f.ring)

    @classmethod
    def multiplication(cls, num_vars: int, ring: ArtinRing = QQ) -> "MultiDiffOp":
        z = (0,) * num_vars
        return cls(num_vars, 2, {(z, z): Poly.const(1, num_vars, ring)}, ring)

    @classmethod
    def identity(cls, num_vars: int, ring: ArtinRing = QQ) -> "MultiDiffOp":
        return cls(num_vars, 1, {((0,) * num_vars,): Poly.const(1, num_vars, ring)}, ring)

    @classmethod
    def derivation(cls, components: Sequence[Poly]) -> "MultiDiffOp":
        """The 1-cochain sum_i c_i d_i."""
        n = len(components)
        ring = components[0].ring
        terms = {}
        for i, c in enumerate(components):
            beta = tuple(1 if j == i else 0 for j in range(n))
            terms[(beta,)] = c
        return cls(n, 1, terms, ring)

    @classmethod
    def from_partials(cls, num_vars: int, betas: Sequence[Sequence[int]], coef=1,
                      ring: ArtinRing = QQ) -> "MultiDiffOp":
        if not isinstance(coef, Poly):
            coef = Poly.const(coef, num_vars, ring)
        return cls(num_vars, len(betas), {tuple(tuple(b) for b in betas): coef}, ring)

    # accessors ------------------------------------------------------------
    @property
    def terms(self) -> dict[BetaTuple, Poly]:
        return self._terms

    @property
    def shifted_degree(self) -> int:
        return self.arity - 1

    def order(self) -> int:
        """Largest total derivative order in any slot."""
        return max((sum(b) for betas in self._terms for b in betas), default=0)

    def _same(self, other: "MultiDiffOp") -> None:
        if self.num_vars != other.num_vars or self.ring != other.ring:
            raise StructuralError("cochains live on different charts or rings")

    # linear structure -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._same(other)
        if self.arity != other.arity:
            raise ValueError(f"cannot add arities {self.arity} and {other.arity}")
        out = dict(self._terms)
        for b, c in other._terms.items():
            if b in out:
                s = out[b] + c
                if s:
                    out[b] = s
                else:
                    del out[b]
            else:
                out[b] = c
        return MultiDiffOp(self.num_vars, self.arity, out, self.ring, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiDiffOp(self.num_vars, self.arity, {b: -c for b, c in self._terms.items()},
                           self.ring, _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MultiDiffOp":
        if isinstance(c, Poly):
            out = {b: v * c for b, v in self._terms.items()}
        else:
            out = {b: v.scale(c) for b, v in self._terms.items()}
        return MultiDiffOp(self.num_vars, self.arity, {b: v for b, v in out.items() if v},
                           self.ring, _trusted=True)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, MultiDiffOp):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.arity == other.arity
                and self.ring == other.ring and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, self.arity, self.ring, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __call__(self, *args: Poly) -> Poly:
        return mdo_eval(self, args)

    def __repr__(self):
        parts = []
        for betas in sorted(self._terms):
            parts.append(f"({self._terms[betas].to_str()})*{list(map(list, betas))}")
        return f"MultiDiffOp(arity={self.arity}: " + (" + ".join(parts) or "0") + ")"

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "arity": self.arity,
            "terms": [{"coef": self._terms[b].to_json(), "betas": [list(x) for x in b]}
                      for b in sorted(self._terms)],
        }

    @classmethod
    def from_json(cls, data: Mapping, ring: ArtinRing = QQ) -> "MultiDiffOp":
        n, p = int(data["vars"]), int(data["arity"])
        terms: dict[BetaTuple, Poly] = {}
        for t in data["terms"]:
            betas = tuple(tuple(int(e) for e in b) for b in t["betas"])
            coef = Poly.from_json(t["coef"], ring)
            terms[betas] = terms[betas] + coef if betas in terms else coef
        return cls(n, p, terms, ring)


def mdo_eval(D: MultiDiffOp, args: Sequence[Poly]) -> Poly:
    """D(a_1, ..., a_p) = sum coef * d^{b_1} a_1 ... d^{b_p} a_p."""
    if len(args) != D.arity:
        raise ValueError(f"arity mismatch: operator takes {D.arity}, got {len(args)}")
    out = Poly.zero(D.num_vars, D.ring)
    for betas, coef in D._terms.items():
        val = coef
        for b, a in zip(betas, args):
            val = val * a.partial_multi(b)
            if not val:
                break
        out = out + val
    return out


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(total: int, parts: Sequence[int]) -> int:
    out = factorial(total)
    for k in parts:
        out //= factorial(k)
    return out


@lru_cache(maxsize=None)
def _leibniz_splits(beta: Beta, parts: int) -> tuple:
    """Splittings of d^beta across ``parts`` factors with their multinomial weights.

    Returns a tuple of ``(weight, (delta_0, ..., delta_{parts-1}))``.
    """
    per_var = [list(_compositions(b, parts)) for b in beta]
    out = []
    for choice in product(*per_var):
        weight = 1
        for b, comp in zip(beta, choice):
            weight *= _multinomial(b, comp)
        deltas = tuple(tuple(choice[v][t] for v in range(len(beta))) for t in range(parts))
        out.append((weight, deltas))
    return tuple(out)


def gerst_compose_i(D: MultiDiffOp, E: MultiDiffOp, i: int) -> MultiDiffOp:
    """D o_i E: feed E(a_i, ..., a_{i+q-1}) into slot i (1-based) of D."""
    D._same(E)
    p, q = D.arity, E.arity
    if not 1 <= i <= p:
        raise IndexError(f"slot {i} out of range for arity {p}")
    n = D.num_vars
    order = D.ring.order
    # flat accumulator: betas -> {extended exponent: rational}
    acc: dict[BetaTuple, dict] = {}
    dcache: dict = {}
    for dbetas, dcoef in D._terms.items():
        b = dbetas[i - 1]
        before, after = dbetas[:i - 1], dbetas[i:]
        dterms = dcoef._terms.items()
        for ebetas, ecoef in E._terms.items():
            for weight, deltas in _leibniz_splits(b, q + 1):
                ck = (ebetas, deltas[0])
                c = dcache.get(ck)
                if c is None:
                    c = dcache[ck] = ecoef.partial_multi(deltas[0])._terms
                if not c:
                    continue
                mid = tuple(tuple(g[v] + dl[v] for v in range(n)) for g, dl in zip(ebetas, deltas[1:]))
                bucket = acc.setdefault(before + mid + after, {})
                for k1, c1 in dterms:
                    w1 = c1 * weight
                    h1 = k1[-1]
                    for k2, c2 in c.items():
                        if h1 + k2[-1] >= order:
                            continue
                        k = tuple(a + b2 for a, b2 in zip(k1, k2))
                        v = bucket.get(k)
                        bucket[k] = w1 * c2 if v is None else v + w1 * c2
    out: dict[BetaTuple, Poly] = {}
    for key, bucket in acc.items():
        terms = {k: v for k, v in bucket.items() if v}
        if terms:
            out[key] = Poly(n, terms, D.ring, _trusted=True)
    return MultiDiffOp(n, p + q - 1, out, D.ring, _trusted=True)


def gerst_compose(D: MultiDiffOp, E: MultiDiffOp) -> MultiDiffOp:
    """Total insertion D o E = sum_i (-1)^((q-1)(p-i)) D o_i E."""
    p, q = D.arity, E.arity
    out = MultiDiffOp.zero(D.num_vars, max(p + q - 1, 0), D.ring)
    if p == 0:
        return MultiDiffOp.zero(D.num_vars, q - 1, D.ring) if q >= 1 else out
    for i in range(1, p + 1):
        term = gerst_compose_i(D, E, i)
        out = out + (term if (q - 1) * (p - i) % 2 == 0 else -term)
    return out


def gerstenhaber_bracket(D: MultiDiffOp, E: MultiDiffOp) -> MultiDiffOp:
    """[D, E] = D o E - (-1)^((p-1)(q-1)) E o D."""
    p, q = D.arity, E.arity
    if p + q - 1 < 0:
        raise ValueError("bracket of two 0-cochains is undefined (degree -3)")
    a = gerst_compose(D, E)
    b = gerst_compose(E, D)
    return a - b if (p - 1) * (q - 1) % 2 == 0 else a + b


def hochschild_delta(D: MultiDiffOp) -> MultiDiffOp:
    """delta D = [m_A, D]."""
    return gerstenhaber_bracket(MultiDiffOp.multiplication(D.num_vars, D.ring), D)


def hochschild_delta_standard(D: MultiDiffOp, args: Sequence[Poly]) -> Poly:
    """Pointwise coboundary a_1 D(a_2..) + sum (-1)^i D(.., a_i a_{i+1}, ..) + (-1)^(p+1) D(..) a_{p+1}."""
    p = D.arity
    if len(args) != p + 1:
        raise ValueError("expected p+1 arguments")
    out = args[0] * D(*args[1:])
    for i in range(1, p + 1):
        merged = list(args[:i - 1]) + [args[i - 1] * args[i]] + list(args[i + 1:])
        v = D(*merged)
        out = out + (v if i % 2 == 0 else -v)
    last = D(*args[:p]) * args[p]
    return out + (last if (p + 1) % 2 == 0 else -last)


def cup(D: MultiDiffOp, E: MultiDiffOp) -> MultiDiffOp:
    """(D u E)(a_1..a_{p+q}) = D(a_1..a_p) * E(a_{p+1}..a_{p+q})."""
    D._same(E)
    out: dict[BetaTuple, Poly] = {}
    for b1, c1 in D._terms.items():
        for b2, c2 in E._terms.items():
            c = c1 * c2
            if c:
                key = b1 + b2
                out[key] = out[key] + c if key in out else c
    return MultiDiffOp(D.num_vars, D.arity + E.arity, {k: v for k, v in out.items() if v},
                       D.ring, _trusted=True)


def brace(D: MultiDiffOp, Es: Sequence[MultiDiffOp]) -> MultiDiffOp:
    """D{E_1, ..., E_k}: order-preserving insertions into distinct slots of D.

    Each E_j of arity q_j inserted into slot s_j carries the sign
    (-1)^((q_j - 1) * (p - s_j)), the several-slot analogue of the sign of
    the total insertion.
    """
    k, p = len(Es), D.arity
    if k > p:
        raise ValueError(f"cannot brace {k} cochains into arity {p}")
    if k == 0:
        return D
    total_arity = p + sum(E.arity for E in Es) - k
    out = MultiDiffOp.zero(D.num_vars, total_arity, D.ring)
    for slots in combinations(range(1, p + 1), k):
        term = D
        sign = 0
        # insert right to left so earlier slot numbers stay valid
        for s, E in reversed(list(zip(slots, Es))):
            term = gerst_compose_i(term, E, s)
            sign += (E.arity - 1) * (p - s)
        out = out + (term if sign % 2 == 0 else -term)
    return out


def i_a_cochain(a: Poly, D: MultiDiffOp) -> MultiDiffOp:
    """i_a D(a_1..a_{p-1}) = sum_{i=0}^{p-1} (-1)^i D(a_1..a_i, a, a_{i+1}..a_{p-1})."""
    if D.arity == 0:
        raise ValueError("i_a is undefined on 0-cochains")
    elt = MultiDiffOp.element(a)
    out = MultiDiffOp.zero(D.num_vars, D.arity - 1, D.ring)
    for i in range(D.arity):
        term = gerst_compose_i(D, elt, i + 1)
        out = out + (term if i % 2 == 0 else -term)
    return out


def hkr(pi: MultiVector) -> MultiDiffOp:
    """Alternation map f X_1^..^X_k -> (f/k!) sum_s sgn(s) X_s(1)(a_1)...X_s(k)(a_k)."""
    degs = pi.degrees()
    if len(degs) > 1:
        raise ValueError("hkr needs a homogeneous multivector")
    n, ring = pi.num_vars, pi.ring
    k = degs[0] if degs else 0
    out = MultiDiffOp.zero(n, k, ring)
    unit = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    w = mpq(1, factorial(k))
    for dirs, f in pi.terms.items():
        terms = {}
        for images in permutations(range(k)):
            s = Permutation(images).sign()
            terms[tuple(unit[dirs[j]] for j in images)] = f.scale(w * s)
        out = out + MultiDiffOp(n, k, terms, ring)
    return out


def i_a_multivector(a: Poly, pi: MultiVector) -> MultiVector:
    """Schouten adjoint action of a function: pi -> [pi, a]."""
    from .cartan import schouten

    return schouten(pi, MultiVector.function(a))


def hkr_ia_discrepancy(a: Poly, pi: MultiVector) -> dict:
    """Compare i_a(hkr(pi)) with hkr([pi, a]); reports the ratio when proportional."""
    lhs = i_a_cochain(a, hkr(pi))
    rhs = hkr(i_a_multivector(a, pi))
    ratio = None
    if not rhs:
        ratio = None if lhs else "both-zero"
    else:
        # find c with lhs == c * rhs, if any
        betas = next(iter(rhs.terms))
        r = rhs.terms[betas]
        l = lhs.terms.get(betas)
        if l is not None:
            key = next(iter(r.flat_terms))
            c = l.flat_terms.get(key, 0) / r.flat_terms[key]
            if lhs == rhs.scale(c):
                ratio = c
    return {"equal": lhs == rhs, "ratio": ratio, "lhs": lhs, "rhs": rhs}


__all__ = [
    "MultiDiffOp", "mdo_eval", "gerst_compose_i", "gerst_compose", "gerstenhaber_bracket",
    "hochschild_delta", "hochschild_delta_standard", "cup", "brace", "i_a_cochain", "hkr",
    "i_a_multivector", "hkr_ia_discrepancy",
]
