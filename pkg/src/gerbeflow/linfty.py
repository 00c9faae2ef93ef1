"""Three-form twisted L-infinity structure on multivectors and its MC theory.

The structure has ``l2 = m`` (the signed Schouten bracket) and
``l3 = Phi(H)`` for a closed 3-form ``H``; all higher brackets vanish.
Maurer-Cartan elements are bivectors ``pi`` with coefficients in the
maximal ideal of ``Q[h]/(h^N)`` satisfying

    [pi, pi] = Phi(H)(pi, pi, pi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpq

from .cartan import DiffForm, MultiVector, de_rham_d, schouten
from .ce import CochainHandle, ce_bracket, ce_differential, m_cochain, phi_homogeneous, zero_cochain
from .kernel import ArtinRing, Poly, StructuralError, monomials
from .linalg import solve_rref


class NotClosedError(ValueError):
    """The twisting form is not closed, so the brackets fail the Jacobi identities."""


class MCValidationError(ValueError):
    """Candidate MC element is not a bivector in the maximal ideal."""


class TwistedLInfty:
    """L-infinity algebra twisted by a 3-form ``H`` on an ``n``-dimensional chart.

    Parameters
    ----------
    num_vars : int
        Chart dimension.
    H : DiffForm or None
        Pure degree-3 form.  ``None`` or the zero form gives the plain
        Schouten DGLA (zero differential).
    ring : ArtinRing, optional
        Coefficient ring; defaults to the ring of ``H``.

    Raises
    ------
    NotClosedError
        If ``dH != 0``.  Use :meth:`unchecked` to bypass the test.
    """

    def __init__(self, num_vars: int, H: Optional[DiffForm] = None, ring: Optional[ArtinRing] = None,
                 *, _check: bool = True):
        if H is None:
            H = DiffForm.zero(num_vars, ring or ArtinRing())
        ring = ring or H.ring
        if H.num_vars != num_vars:
            raise StructuralError("H lives on a chart of different dimension")
        if H.ring != ring:
            H = H.with_ring(ring)
        if H and H.degrees() != [3]:
            raise ValueError(f"H must be a pure 3-form, got degrees {H.degrees()}")
        if _check and de_rham_d(H):
            raise NotClosedError("dH is nonzero")
        self.num_vars = num_vars
        self.H = H
        self.ring = ring
        self._l3 = None

    @classmethod
    def unchecked(cls, num_vars: int, H: DiffForm, ring: Optional[ArtinRing] = None) -> "TwistedLInfty":
        """Build without the closedness test (negative controls only)."""
        return cls(num_vars, H, ring, _check=False)

    @property
    def is_closed(self) -> bool:
        return not de_rham_d(self.H)

    @property
    def l2(self) -> CochainHandle:
        return m_cochain(self.num_vars, self.ring)

    @property
    def l3(self) -> CochainHandle:
        if self._l3 is None:
            if self.H:
                self._l3 = phi_homogeneous(self.H)
            else:
                self._l3 = zero_cochain(3, 1, self.num_vars, self.ring)
        return self._l3

    def __repr__(self):
        return f"TwistedLInfty(n={self.num_vars}, H={self.H.to_str()}, order={self.ring.order})"


@dataclass(frozen=True)
class MCElement:
    """Bivector whose coefficients all carry a positive power of h."""

    pi: MultiVector

    def __post_init__(self):
        validate_mc_candidate(self.pi)


def validate_mc_candidate(pi: MultiVector) -> None:
    if not pi:
        return
    if pi.degrees() != [2]:
        raise MCValidationError(f"MC element must be a pure bivector, got degrees {pi.degrees()}")
    if pi.h_valuation() < 1:
        raise MCValidationError("MC element has a coefficient that survives at h = 0")


def _as_mv(pi) -> MultiVector:
    if isinstance(pi, MCElement):
        return pi.pi
    validate_mc_candidate(pi)
    return pi


def jacobi_defect_4(L: TwistedLInfty) -> CochainHandle:
    """The arity-4 Jacobi defect, d(l3); vanishes exactly when H is closed."""
    return ce_differential(L.l3)


def jacobi_defect_5(L: TwistedLInfty) -> CochainHandle:
    """The arity-5 Jacobi defect, [l3, l3]."""
    return ce_bracket(L.l3, L.l3)


def mc_residual(L: TwistedLInfty, pi) -> MultiVector:
    """[pi, pi] - Phi(H)(pi, pi, pi), exact in the Artin ring."""
    p = _as_mv(pi)
    out = schouten(p, p)
    if L.H and p:
        out = out - L.l3(p, p, p)
    return out


@dataclass
class MCSolution:
    """Outcome of :func:`mc_solve`.

    ``order`` is the truncation order reached when solved, or the first
    power of h whose coefficient could not be cancelled.  ``obstruction``
    holds that h-free coefficient in the obstructed case.
    """

    status: str
    order: int
    pi: MultiVector
    residual: MultiVector
    obstruction: Optional[MultiVector] = None

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "order": self.order,
            "pi": self.pi.to_json(),
            "residual": self.residual.to_json(),
        }
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction.to_json()
        return out


def _h_free_part(mv: MultiVector, e: int) -> MultiVector:
    return mv.h_coefficient(e)


def _bivector_basis(n: int, degree_cap: int):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return [(m, d) for m in monomials(n, degree_cap) for d in pairs]


def solve_linearized(pi1: MultiVector, target: MultiVector, degree_cap: int):
    """Find an h-free bivector X with 2[pi1, X] = target, or None.

    Unknowns are the coefficients of ``x^m dx_i^dx_j`` with ``|m| <= degree_cap``,
    ordered by monomial degree, then exponent, then direction pair.  The
    returned solution is the basic one for leftmost pivots (free unknowns 0).
    """
    n, ring = pi1.num_vars, pi1.ring
    basis = _bivector_basis(n, degree_cap)
    columns = []
    rows: dict = {}
    for m, d in basis:
        X = MultiVector.basis(d, n, Poly.monomial(m, 1, ring), ring)
        img = schouten(pi1, X).scale(2)
        col = {}
        for dirs, coef in img.terms.items():
            for key, c in coef.flat_terms.items():
                r = rows.setdefault((dirs, key), len(rows))
                col[r] = c
        columns.append(col)
    rhs = {}
    for dirs, coef in target.terms.items():
        for key, c in coef.flat_terms.items():
            if (dirs, key) not in rows:
                return None
            rhs[rows[(dirs, key)]] = c
    sol = solve_rref(columns, rhs, len(rows))
    if sol is None:
        return None
    X = MultiVector.zero(n, ring)
    for idx, val in sol.items():
        m, d = basis[idx]
        X = X + MultiVector.basis(d, n, Poly.monomial(m, val, ring), ring)
    return X


def mc_solve(L: TwistedLInfty, pi1: MultiVector, max_order: int,
             degree_cap: Optional[int] = None) -> MCSolution:
    """Extend ``h pi1`` order by order to a solution of the MC equation mod h^max_order.

    At order ``j`` the new unknown ``pi_{j-1}`` enters linearly through
    ``2 h^j [pi1, pi_{j-1}]`` while the cubic term only sees lower orders,
    so each step is a linear solve over monomial coefficients.

    Parameters
    ----------
    L : TwistedLInfty
    pi1 : MultiVector
        h-free bivector, the first-order ansatz.
    max_order : int
        Work modulo ``h^max_order``; must not exceed the ring order.
    degree_cap : int, optional
        Polynomial degree bound for each correction.  By default one more
        than the degree of the residual being cancelled.
    """
    ring = L.ring
    if max_order > ring.order:
        raise ValueError(f"max_order {max_order} exceeds ring order {ring.order}")
    if max_order < 1:
        raise ValueError("max_order must be positive")
    if pi1.ring != ring:
        pi1 = pi1.with_ring(ring)
    if pi1 and pi1.degrees() != [2]:
        raise MCValidationError("pi1 must be a bivector")
    if pi1 != pi1.h_coefficient(0):
        raise MCValidationError("pi1 must not depend on h")
    n = L.num_vars
    h = Poly.hbar(n, ring)
    pi = pi1.scale(h)
    for j in range(2, max_order):
        res = mc_residual(L, pi).truncate(max_order)
        rj = _h_free_part(res, j)
        if not rj:
            continue
        X = None
        if j >= 3:
            cap = degree_cap if degree_cap is not None else rj.poly_degree() + 1
            X = solve_linearized(pi1, -rj, cap)
        if X is None:
            return MCSolution("obstructed", j, pi, res, obstruction=rj)
        pi = pi + X.scale(h ** (j - 1))
    res = mc_residual(L, pi).truncate(max_order)
    return MCSolution("solved", max_order, pi, res)


def _exp_ad(lam: MultiVector, x: MultiVector) -> MultiVector:
    out, term, k = x, x, 1
    while True:
        term = schouten(lam, term).scale(mpq(1, k))
        if not term:
            return out
        out = out + term
        k += 1


def gauge_apply_untwisted(L: TwistedLInfty, lam: MultiVector, pi) -> MCElement:
    """exp(ad_lambda) pi for the Schouten DGLA (requires H = 0)."""
    if L.H:
        raise NotImplementedError("gauge action is only available for H = 0")
    p = _as_mv(pi)
    if lam and (lam.degrees() != [1] or lam.h_valuation() < 1):
        raise MCValidationError("lambda must be a vector field with coefficients in the maximal ideal")
    return MCElement(_exp_ad(lam, p))


def problem_from_json(data: dict):
    """Parse an MC problem ``{"ring", "H", "pi1", "maxOrder"}``."""
    ring = ArtinRing.from_json(data["ring"])
    pi1 = MultiVector.from_json(data["pi1"], ring)
    n = pi1.num_vars
    H = DiffForm.from_json(data["H"], ring) if data.get("H") is not None else DiffForm.zero(n, ring)
    return TwistedLInfty(n, H, ring), pi1, int(data.get("maxOrder", ring.order))


def problem_to_json(L: TwistedLInfty, pi1: MultiVector, max_order: int) -> dict:
    return {"ring": L.ring.to_json(), "H": L.H.to_json(), "pi1": pi1.to_json(), "maxOrder": max_order}
