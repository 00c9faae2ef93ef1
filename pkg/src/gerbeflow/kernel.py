"""Exact scalars, truncated-hbar polynomials, permutations and Koszul signs.

All coefficients live in the Artin ring Q[h]/(h^N).  A polynomial in
``n`` chart variables is stored flat: each key is an exponent tuple of
length ``n + 1`` whose last entry is the power of the formal parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _itertools_permutations
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

# exact rational type used for every stored coefficient
Rational = type(mpq())


class StructuralError(ValueError):
    """Operands live on different charts or in different coefficient rings."""


def to_fraction(value) -> Rational:
    """Coerce an int, Fraction, mpq or "a/b" string to the exact rational type."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_rational(value)
    if type(value).__name__ == "mpz":
        return mpq(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Rational:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        if int(den) == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return mpq(int(num), int(den))
    return mpq(int(text))


def format_rational(q) -> str:
    q = to_fraction(q)
    return f"{int(q.numerator)}/{int(q.denominator)}"


@dataclass(frozen=True)
class ArtinRing:
    """The ring Q[param]/(param^order); ``order == 1`` is plain Q."""

    param_name: str = "h"
    order: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Artin ring order must be >= 1")

    def to_json(self):
        return {"param": self.param_name, "order": self.order}

    @classmethod
    def from_json(cls, data) -> "ArtinRing":
        if isinstance(data, int):
            return cls(order=data)
        return cls(param_name=data.get("param", "h"), order=int(data["order"]))


QQ = ArtinRing()
_ZERO = mpq(0)


def _check_ring(a: ArtinRing, b: ArtinRing) -> None:
    if a != b:
        raise StructuralError(f"ring mismatch: {a} vs {b}")


class Scalar:
    """An element of Q[h]/(h^N), stored as {h-exponent: nonzero rational}."""

    __slots__ = ("ring", "_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None, ring: ArtinRing = QQ):
        self.ring = ring
        clean = {}
        for e, c in (coeffs or {}).items():
            if e < 0:
                raise ValueError("negative h-exponent")
            if e >= ring.order:
                continue
            c = to_fraction(c)
            if c:
                clean[e] = clean.get(e, _ZERO) + c
        self._coeffs = {e: clean[e] for e in sorted(clean) if clean[e]}
        self._hash = None

    @classmethod
    def const(cls, value, ring: ArtinRing = QQ) -> "Scalar":
        return cls({0: value}, ring)

    @classmethod
    def hbar(cls, ring: ArtinRing, power: int = 1) -> "Scalar":
        return cls({power: 1}, ring)

    @property
    def coeffs(self) -> dict[int, Rational]:
        return dict(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def valuation(self) -> int | None:
        """Lowest h-power present, ``None`` for zero."""
        return min(self._coeffs) if self._coeffs else None

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            _check_ring(self.ring, other.ring)
            return other
        return Scalar.const(other, self.ring)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, _ZERO) + c
        return Scalar(out, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({e: -c for e, c in self._coeffs.items()}, self.ring)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[int, Rational] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                e = e1 + e2
                if e < self.ring.order:
                    out[e] = out.get(e, _ZERO) + c1 * c2
        return Scalar(out, self.ring)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ring == other.ring and self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction, Rational)):
            return self == Scalar.const(other, self.ring)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, tuple(self._coeffs.items())))
        return self._hash

    def __repr__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for e, c in self._coeffs.items():
            parts.append(str(c) if e == 0 else f"({c})*{self.ring.param_name}^{e}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {f"h{e}": format_rational(c) for e, c in self._coeffs.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, str], ring: ArtinRing = QQ) -> "Scalar":
        coeffs = {}
        for key, val in data.items():
            if not key.startswith("h"):
                raise ValueError(f"bad scalar key {key!r}")
            coeffs[int(key[1:])] = parse_rational(val)
        return cls(coeffs, ring)


Exponent = tuple[int, ...]


class Poly:
    """Polynomial in ``num_vars`` variables with coefficients in an Artin ring.

    ``_terms`` maps an extended exponent (x-exponents followed by the
    h-exponent) to a nonzero exact rational.  Instances are immutable.
    """

    __slots__ = ("num_vars", "ring", "_terms", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, Rational] | None = None,
                 ring: ArtinRing = QQ, *, _trusted: bool = False):
        self.num_vars = num_vars
        self.ring = ring
        if _trusted:
            self._terms = terms
        else:
            clean: dict[Exponent, Rational] = {}
            for k, c in (terms or {}).items():
                if len(k) != num_vars + 1:
                    raise StructuralError(f"exponent {k} has wrong length for {num_vars} vars")
                if k[-1] >= ring.order:
                    continue
                c = to_fraction(c)
                clean[k] = clean.get(k, _ZERO) + c
            self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, ring: ArtinRing = QQ) -> "Poly":
        return cls(num_vars, {}, ring, _trusted=True)

    @classmethod
    def const(cls, value, num_vars: int, ring: ArtinRing = QQ) -> "Poly":
        if isinstance(value, Scalar):
            return cls(num_vars, {(0,) * num_vars + (e,): c for e, c in value.coeffs.items()}, ring)
        return cls(num_vars, {(0,) * (num_vars + 1): value}, ring)

    @classmethod
    def var(cls, i: int, num_vars: int, ring: ArtinRing = QQ) -> "Poly":
        exp = [0] * (num_vars + 1)
        exp[i] = 1
        return cls(num_vars, {tuple(exp): 1}, ring)

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1, ring: ArtinRing = QQ, hpow: int = 0) -> "Poly":
        return cls(len(exp), {tuple(exp) + (hpow,): coef}, ring)

    @classmethod
    def hbar(cls, num_vars: int, ring: ArtinRing, power: int = 1) -> "Poly":
        return cls(num_vars, {(0,) * num_vars + (power,): 1}, ring)

    @classmethod
    def from_scalar_terms(cls, num_vars: int, terms: Mapping[Exponent, Scalar],
                          ring: ArtinRing = QQ) -> "Poly":
        flat = {}
        for exp, s in terms.items():
            for e, c in s.coeffs.items():
                flat[tuple(exp) + (e,)] = c
        return cls(num_vars, flat, ring)

    # accessors ------------------------------------------------------------
    @property
    def flat_terms(self) -> dict[Exponent, Rational]:
        return self._terms

    @property
    def terms(self) -> dict[Exponent, Scalar]:
        """Terms grouped by x-exponent, coefficients as Scalars."""
        grouped: dict[Exponent, dict[int, Rational]] = {}
        for k, c in self._terms.items():
            grouped.setdefault(k[:-1], {})[k[-1]] = c
        return {exp: Scalar(grouped[exp], self.ring) for exp in sorted(grouped)}

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree in the chart variables; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(k[:-1]) for k in self._terms)

    def h_valuation(self) -> int | None:
        if not self._terms:
            return None
        return min(k[-1] for k in self._terms)

    def h_coefficient(self, e: int) -> "Poly":
        """The h^e coefficient, as an h-free polynomial in the same ring."""
        zero_h = {k[:-1] + (0,): c for k, c in self._terms.items() if k[-1] == e}
        return Poly(self.num_vars, zero_h, self.ring, _trusted=True)

    def truncate(self, order: int) -> "Poly":
        return Poly(self.num_vars, {k: c for k, c in self._terms.items() if k[-1] < order},
                    self.ring, _trusted=True)

    def with_ring(self, ring: ArtinRing) -> "Poly":
        return Poly(self.num_vars, self._terms, ring)

    def _same(self, other: "Poly") -> None:
        if self.num_vars != other.num_vars:
            raise StructuralError(f"variable count mismatch: {self.num_vars} vs {other.num_vars}")
        _check_ring(self.ring, other.ring)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._same(other)
            return other
        return Poly.const(other, self.num_vars, self.ring)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if not other._terms:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v += c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Poly(self.num_vars, out, self.ring, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.num_vars, {k: -c for k, c in self._terms.items()}, self.ring, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self.scale(other)
        other = self._coerce(other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = to_fraction(c)
        if not c:
            return Poly.zero(self.num_vars, self.ring)
        return Poly(self.num_vars, {k: v * c for k, v in self._terms.items()}, self.ring, _trusted=True)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(1, self.num_vars, self.ring)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, i: int) -> "Poly":
        return poly_partial(self, i)

    def partial_multi(self, beta: Sequence[int]) -> "Poly":
        """Apply d^beta = prod_i d_i^{beta_i}."""
        p = self
        for i, b in enumerate(beta):
            for _ in range(b):
                if not p._terms:
                    return p
                p = poly_partial(p, i)
        return p

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.num_vars == other.num_vars and self.ring == other.ring
                    and self._terms == other._terms)
        if isinstance(other, (int, Fraction, Rational)):
            return self == Poly.const(other, self.num_vars, self.ring)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, self.ring, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"Poly({self.to_str()})"

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or default_names(self.num_vars)
        parts = []
        for k in sorted(self._terms):
            c = self._terms[k]
            factors = []
            for name, e in zip(names, k[:-1]):
                if e:
                    factors.append(name if e == 1 else f"{name}^{e}")
            if k[-1]:
                p = self.ring.param_name
                factors.append(p if k[-1] == 1 else f"{p}^{k[-1]}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "terms": [{"exp": list(exp), "coef": s.to_json()} for exp, s in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping, ring: ArtinRing = QQ) -> "Poly":
        n = int(data["vars"])
        flat = {}
        for t in data["terms"]:
            exp = tuple(int(e) for e in t["exp"])
            if len(exp) != n:
                raise StructuralError(f"exponent {exp} has wrong length for {n} vars")
            s = Scalar.from_json(t["coef"], ring)
            for e, c in s.coeffs.items():
                key = exp + (e,)
                flat[key] = flat.get(key, _ZERO) + c
        return cls(n, flat, ring)


def default_names(n: int) -> list[str]:
    base = ["x", "y", "z", "w"]
    return base[:n] if n <= len(base) else [f"x{i}" for i in range(n)]


def poly_mul(p: Poly, q: Poly) -> Poly:
    """Exact product truncated at h^N."""
    p._same(q)
    order = p.ring.order
    out: dict[Exponent, Rational] = {}
    qt = q._terms
    for k1, c1 in p._terms.items():
        for k2, c2 in qt.items():
            if k1[-1] + k2[-1] >= order:
                continue
            k = tuple(a + b for a, b in zip(k1, k2))
            v = out.get(k)
            out[k] = c1 * c2 if v is None else v + c1 * c2
    return Poly(p.num_vars, {k: v for k, v in out.items() if v}, p.ring, _trusted=True)


def poly_partial(p: Poly, i: int) -> Poly:
    if not 0 <= i < p.num_vars:
        raise IndexError(f"variable index {i} out of range for {p.num_vars} vars")
    out = {}
    for k, c in p._terms.items():
        e = k[i]
        if e:
            nk = k[:i] + (e - 1,) + k[i + 1:]
            out[nk] = c * e
    return Poly(p.num_vars, out, p.ring, _trusted=True)


def monomials(num_vars: int, max_degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= max_degree, in sorted order."""
    out: list[Exponent] = []

    def rec(prefix: list[int], remaining: int, left: int):
        if left == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, left - 1)

    rec([], max_degree, num_vars)
    return sorted(out, key=lambda e: (sum(e), e))


# ---------------------------------------------------------------------------
# permutations and Koszul signs


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., m-1}; ``images[i]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(m)))

    @classmethod
    def transposition(cls, m: int, i: int, j: int) -> "Permutation":
        im = list(range(m))
        im[i], im[j] = im[j], im[i]
        return cls(tuple(im))

    def __len__(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: ``(self * other)(i) == self(other(i))``."""
        if len(self) != len(other):
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def inversions(self) -> Iterator[tuple[int, int]]:
        im = self.images
        for a in range(len(im)):
            for b in range(a + 1, len(im)):
                if im[a] > im[b]:
                    yield a, b

    def sign(self) -> int:
        return -1 if sum(1 for _ in self.inversions()) % 2 else 1

    def permute(self, items: Sequence) -> tuple:
        """The reordered sequence ``(items[self(0)], items[self(1)], ...)``."""
        return tuple(items[j] for j in self.images)


def all_permutations(m: int) -> Iterator[Permutation]:
    for im in _itertools_permutations(range(m)):
        yield Permutation(im)


def koszul_sign(sigma: Permutation, degrees: Sequence[int]) -> int:
    """Sign e with x_{s(0)} ^ ... ^ x_{s(m-1)} = e * x_0 ^ ... ^ x_{m-1}.

    Sorting the reordered word back by adjacent swaps, each swap of two
    entries of degrees p and q contributes (-1)^(p*q).
    """
    if len(degrees) != len(sigma):
        raise ValueError("degree list and permutation differ in size")
    word = list(sigma.images)
    sign = 1
    # bubble sort; every adjacent exchange is one transposition
    for end in range(len(word) - 1, 0, -1):
        for j in range(end):
            if word[j] > word[j + 1]:
                if degrees[word[j]] % 2 and degrees[word[j + 1]] % 2:
                    sign = -sign
                word[j], word[j + 1] = word[j + 1], word[j]
    return sign


def koszul_sign_images(images: Sequence[int], degrees: Sequence[int]) -> int:
    """Fast path of :func:`koszul_sign` on a raw image tuple (inversion count)."""
    odd = 0
    m = len(images)
    for a in range(m):
        da = degrees[images[a]] & 1
        if not da:
            continue
        ia = images[a]
        for b in range(a + 1, m):
            if ia > images[b] and degrees[images[b]] & 1:
                odd ^= 1
    return -1 if odd else 1


def sort_sign(indices: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting a list of odd generators; 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inv = 0
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(idx))
