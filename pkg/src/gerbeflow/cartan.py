"""Polyvector fields and differential forms on a polynomial chart.

Both are stored as ``{strictly increasing index tuple: Poly}``.  The
Schouten bracket follows the three-sum formula for decomposables
``f X_1...X_k`` and ``g Y_1...Y_l``; on coordinate vector fields the
third sum (brackets ``[X_i, Y_j]``) vanishes identically.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .kernel import QQ, ArtinRing, Poly, StructuralError, default_names, sort_sign, to_fraction

Dirs = tuple[int, ...]


class _Graded:
    """Shared storage and linear structure of multivectors and forms."""

    __slots__ = ("num_vars", "ring", "_terms", "_hash")
    _json_key = "dirs"

    def __init__(self, num_vars: int, terms: Mapping[Dirs, Poly] | None = None,
                 ring: ArtinRing = QQ, *, _trusted: bool = False):
        self.num_vars = num_vars
        self.ring = ring
        if _trusted:
            self._terms = terms
        else:
            clean: dict[Dirs, Poly] = {}
            for dirs, coef in (terms or {}).items():
                if not isinstance(coef, Poly):
                    coef = Poly.const(coef, num_vars, ring)
                if coef.num_vars != num_vars or coef.ring != ring:
                    raise StructuralError("coefficient lives on a different chart or ring")
                dirs = tuple(dirs)
                if any(not 0 <= i < num_vars for i in dirs):
                    raise StructuralError(f"index out of range in {dirs}")
                sign, key = sort_sign(dirs)
                if sign == 0:
                    continue
                c = coef if sign > 0 else -coef
                clean[key] = clean[key] + c if key in clean else c
            self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, ring: ArtinRing = QQ):
        return cls(num_vars, {}, ring, _trusted=True)

    @classmethod
    def basis(cls, dirs: Sequence[int], num_vars: int, coef=1, ring: ArtinRing = QQ):
        if not isinstance(coef, Poly):
            coef = Poly.const(coef, num_vars, ring)
        return cls(num_vars, {tuple(dirs): coef}, ring)

    @classmethod
    def function(cls, f: Poly):
        return cls(f.num_vars, {(): f}, f.ring)

    # accessors ------------------------------------------------------------
    @property
    def terms(self) -> dict[Dirs, Poly]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> list[int]:
        return sorted({len(k) for k in self._terms})

    def degree(self) -> int:
        """Degree of a homogeneous element (the zero element raises)."""
        degs = self.degrees()
        if len(degs) != 1:
            raise ValueError(f"element is not homogeneous (degrees {degs})")
        return degs[0]

    def component(self, k: int):
        return type(self)(self.num_vars, {d: c for d, c in self._terms.items() if len(d) == k},
                          self.ring, _trusted=True)

    def homogeneous_parts(self) -> list:
        return [self.component(k) for k in self.degrees()]

    def coefficient(self, dirs: Sequence[int]) -> Poly:
        return self._terms.get(tuple(dirs), Poly.zero(self.num_vars, self.ring))

    def map_coefficients(self, fn):
        return type(self)(self.num_vars, {d: fn(c) for d, c in self._terms.items()}, self.ring)

    def h_coefficient(self, e: int):
        return self.map_coefficients(lambda c: c.h_coefficient(e))

    def h_valuation(self) -> int | None:
        vals = [c.h_valuation() for c in self._terms.values()]
        return min(vals) if vals else None

    def poly_degree(self) -> int:
        return max((c.degree() for c in self._terms.values()), default=-1)

    def with_ring(self, ring: ArtinRing):
        return type(self)(self.num_vars, {d: c.with_ring(ring) for d, c in self._terms.items()}, ring)

    def _same(self, other) -> None:
        if type(self) is not type(other):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if self.num_vars != other.num_vars:
            raise StructuralError(f"chart mismatch: {self.num_vars} vs {other.num_vars} variables")
        if self.ring != other.ring:
            raise StructuralError(f"ring mismatch: {self.ring} vs {other.ring}")

    # linear structure -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._same(other)
        out = dict(self._terms)
        for d, c in other._terms.items():
            if d in out:
                s = out[d] + c
                if s:
                    out[d] = s
                else:
                    del out[d]
            else:
                out[d] = c
        return type(self)(self.num_vars, out, self.ring, _trusted=True)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return type(self)(self.num_vars, {d: -c for d, c in self._terms.items()}, self.ring,
                          _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply by a rational or by a polynomial function."""
        if isinstance(c, Poly):
            if c.num_vars != self.num_vars or c.ring != self.ring:
                raise StructuralError("scalar function lives on another chart")
            out = {d: v * c for d, v in self._terms.items()}
            return type(self)(self.num_vars, {d: v for d, v in out.items() if v}, self.ring,
                              _trusted=True)
        c = to_fraction(c)
        if not c:
            return self.zero(self.num_vars, self.ring)
        return type(self)(self.num_vars, {d: v.scale(c) for d, v in self._terms.items()},
                          self.ring, _trusted=True)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def truncate(self, order: int):
        return type(self)(self.num_vars, {d: c.truncate(order) for d, c in self._terms.items()},
                          self.ring)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if type(self) is not type(other):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.ring == other.ring
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.num_vars, self.ring,
                               frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def _basis_symbol(self, dirs: Dirs, names: Sequence[str]) -> str:
        raise NotImplementedError

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or default_names(self.num_vars)
        parts = []
        for d in sorted(self._terms, key=lambda k: (len(k), k)):
            coef = self._terms[d].to_str(names)
            sym = self._basis_symbol(d, names)
            if not sym:
                parts.append(f"({coef})")
            elif coef == "1":
                parts.append(sym)
            else:
                parts.append(f"({coef})*{sym}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_str()})"

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "terms": [{self._json_key: list(d), "coef": self._terms[d].to_json()}
                      for d in sorted(self._terms, key=lambda k: (len(k), k))],
        }

    @classmethod
    def from_json(cls, data: Mapping, ring: ArtinRing = QQ):
        n = int(data["vars"])
        terms: dict[Dirs, Poly] = {}
        for t in data["terms"]:
            coef = Poly.from_json(t["coef"], ring)
            if coef.num_vars != n:
                raise StructuralError("coefficient variable count differs from element")
            dirs = tuple(int(i) for i in t[cls._json_key])
            sign, key = sort_sign(dirs)
            if sign == 0:
                continue
            c = coef if sign > 0 else -coef
            terms[key] = terms[key] + c if key in terms else c
        return cls(n, terms, ring)


class MultiVector(_Graded):
    """Polyvector field ``sum f_I d_{i1} ^ ... ^ d_{ik}`` (mixed degree allowed)."""

    __slots__ = ()
    _json_key = "dirs"

    def _basis_symbol(self, dirs, names):
        return "^".join(f"d{names[i]}" for i in dirs)

    def wedge(self, other: "MultiVector") -> "MultiVector":
        return mv_wedge(self, other)


class DiffForm(_Graded):
    """Differential form ``sum f_I dx_{i1} ^ ... ^ dx_{ik}`` (mixed degree allowed)."""

    __slots__ = ()
    _json_key = "covs"

    def _basis_symbol(self, dirs, names):
        return "^".join(f"D{names[i]}" for i in dirs)

    def wedge(self, other: "DiffForm") -> "DiffForm":
        return form_wedge(self, other)

    def d(self) -> "DiffForm":
        return de_rham_d(self)


def _wedge(a: _Graded, b: _Graded):
    a._same(b)
    out: dict[Dirs, Poly] = {}
    for d1, c1 in a._terms.items():
        for d2, c2 in b._terms.items():
            sign, key = sort_sign(d1 + d2)
            if sign == 0:
                continue
            c = c1 * c2
            if not c:
                continue
            if sign < 0:
                c = -c
            out[key] = out[key] + c if key in out else c
    return type(a)(a.num_vars, {k: v for k, v in out.items() if v}, a.ring, _trusted=True)


def mv_wedge(pi: MultiVector, rho: MultiVector) -> MultiVector:
    """Graded-commutative product of polyvector fields."""
    return _wedge(pi, rho)


def form_wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    return _wedge(a, b)


def wedge_all(items: Iterable[_Graded], num_vars: int, ring: ArtinRing = QQ, cls=MultiVector):
    out = cls.basis((), num_vars, 1, ring)
    for it in items:
        out = _wedge(out, it)
        if not out:
            break
    return out


def de_rham_d(a: DiffForm) -> DiffForm:
    """d(f dx_I) = sum_j (d_j f) dx_j ^ dx_I."""
    out: dict[Dirs, Poly] = {}
    for dirs, coef in a._terms.items():
        for j in range(a.num_vars):
            if j in dirs:
                continue
            dj = coef.partial(j)
            if not dj:
                continue
            sign, key = sort_sign((j,) + dirs)
            c = dj if sign > 0 else -dj
            out[key] = out[key] + c if key in out else c
    return DiffForm(a.num_vars, {k: v for k, v in out.items() if v}, a.ring, _trusted=True)


def one_form_components(alpha: DiffForm) -> list[Poly]:
    """Coefficients (a_0, ..., a_{n-1}) of a pure 1-form sum a_j dx_j."""
    if any(len(d) != 1 for d in alpha._terms):
        raise ValueError("contraction requires a form of pure degree 1")
    comps = [Poly.zero(alpha.num_vars, alpha.ring) for _ in range(alpha.num_vars)]
    for (j,), c in alpha._terms.items():
        comps[j] = c
    return comps


def contract(alpha: DiffForm, pi: MultiVector) -> MultiVector:
    """<alpha, f X_1^...^X_k> = f sum_i (-1)^(i-1) alpha(X_i) X_1^..^X_i-hat^..^X_k."""
    if alpha.num_vars != pi.num_vars or alpha.ring != pi.ring:
        raise StructuralError("form and multivector live on different charts")
    comps = one_form_components(alpha)
    out: dict[Dirs, Poly] = {}
    for dirs, coef in pi._terms.items():
        for pos, j in enumerate(dirs):
            a = comps[j]
            if not a:
                continue
            c = coef * a
            if not c:
                continue
            if pos % 2:
                c = -c
            key = dirs[:pos] + dirs[pos + 1:]
            out[key] = out[key] + c if key in out else c
    return MultiVector(pi.num_vars, {k: v for k, v in out.items() if v}, pi.ring, _trusted=True)


def contract_basis(j: int, pi: MultiVector) -> MultiVector:
    """<dx_j, pi> without building the form."""
    out: dict[Dirs, Poly] = {}
    for dirs, coef in pi._terms.items():
        if j in dirs:
            pos = dirs.index(j)
            key = dirs[:pos] + dirs[pos + 1:]
            out[key] = -coef if pos % 2 else coef
    return MultiVector(pi.num_vars, out, pi.ring, _trusted=True)


def contract_iterated(alphas: Sequence[DiffForm], pi: MultiVector) -> MultiVector:
    """Nested contraction; the last form is applied first."""
    out = pi
    for alpha in reversed(alphas):
        out = contract(alpha, out)
    return out


def schouten(pi: MultiVector, rho: MultiVector) -> MultiVector:
    """Schouten bracket, bilinear extension of the decomposable formula.

    For f d_I (k directions) and g d_J (l directions):
      sum_i (-1)^(1+i) f d_{I_i}(g) d_{I - I_i} ^ d_J
    + sum_j (-1)^j d_{J_j}(f) g d_I ^ d_{J - J_j}
    with 1-based positions i, j.
    """
    pi._same(rho)
    out: dict[Dirs, Poly] = {}

    def acc(dirs: Dirs, c: Poly, sign: int):
        s, key = sort_sign(dirs)
        if s == 0 or not c:
            return
        if s * sign < 0:
            c = -c
        if key in out:
            v = out[key] + c
            if v:
                out[key] = v
            else:
                del out[key]
        else:
            out[key] = c

    for I, f in pi._terms.items():
        for J, g in rho._terms.items():
            k = len(I)
            for pos, i in enumerate(I):
                dg = g.partial(i)
                if dg:
                    # (-1)^(k-i) with i = pos + 1
                    acc(I[:pos] + I[pos + 1:] + J, f * dg, -1 if (k - pos - 1) % 2 else 1)
            for pos, j in enumerate(J):
                df = f.partial(j)
                if df:
                    acc(I + J[:pos] + J[pos + 1:], df * g, 1 if pos % 2 else -1)
    return MultiVector(pi.num_vars, out, pi.ring, _trusted=True)


def vector_field(components: Sequence[Poly]) -> MultiVector:
    n = len(components)
    ring = components[0].ring if components else QQ
    return MultiVector(n, {(i,): c for i, c in enumerate(components) if c}, ring)


def one_form(components: Sequence[Poly]) -> DiffForm:
    n = len(components)
    ring = components[0].ring if components else QQ
    return DiffForm(n, {(i,): c for i, c in enumerate(components) if c}, ring)


def apply_vector_field(X: MultiVector, f: Poly) -> Poly:
    """X(f) for a vector field X = sum X_i d_i."""
    out = Poly.zero(f.num_vars, f.ring)
    for dirs, c in X._terms.items():
        if len(dirs) != 1:
            raise ValueError("not a vector field")
        out = out + c * f.partial(dirs[0])
    return out


__all__ = [
    "MultiVector", "DiffForm", "mv_wedge", "form_wedge", "de_rham_d", "contract",
    "contract_iterated", "contract_basis", "schouten", "vector_field", "one_form",
    "apply_vector_field", "wedge_all",
]
