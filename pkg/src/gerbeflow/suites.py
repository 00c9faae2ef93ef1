"""Seeded property suites and their reports."""

from __future__ import annotations

import time
from itertools import combinations_with_replacement
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from . import __version__
from .cartan import DiffForm, MultiVector, contract, de_rham_d, mv_wedge, schouten
from .ce import (ce_bracket, ce_compose, ce_differential, first_disagreement, m_cochain,
                 phi_homogeneous, spanning_family, symmetry_defect, zero_cochain)
from .deligne import NilpotentDGLA, bch, bch_inverse, gauge_action, ad_exp, is_mc, two_cell_target
from .hochschild import (MultiDiffOp, cup, gerstenhaber_bracket, hkr, hkr_ia_discrepancy,
                         hochschild_delta, i_a_cochain)
from .kernel import ArtinRing, Permutation, Poly, QQ, koszul_sign
from .linfty import (MCElement, TwistedLInfty, gauge_apply_untwisted, jacobi_defect_4,
                     jacobi_defect_5, mc_residual, mc_solve)
from .randgen import (GENERATOR_NAME, rand_closed_3form, rand_form, rand_mdo, rand_multivector,
                      rand_nonzero, rand_poly, trial_rng)
from .serial import encode

SUITES = ("schouten", "phi-dgla", "phixy", "linfty", "mc", "hochschild", "symmetry", "hkr", "deligne")


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    """Knobs shared by all suites.  ``dim=None`` lets a suite pick its own charts."""

    suite: str
    dim: Optional[int] = None
    max_deg: int = 2
    mv_deg: int = 3
    trials: int = 100
    seed: int = 0
    order: int = 4
    span_deg: int = 1
    tuples: int = 50
    negative_control: bool = False

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.dim is not None and self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.order < 1:
            raise ConfigError("order must be >= 1")
        if self.max_deg < 0 or self.mv_deg < 0 or self.span_deg < 0 or self.tuples < 1:
            raise ConfigError("degree bounds must be >= 0 and tuples >= 1")
        if self.negative_control and self.suite != "linfty":
            raise ConfigError("--negative-control only applies to the linfty suite")


@dataclass
class Failure:
    trial: int
    prop: str
    inputs: dict
    lhs: object
    rhs: object
    expected_negative: bool = False

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "property": self.prop,
            "inputs": encode(self.inputs),
            "lhs": encode(self.lhs),
            "rhs": encode(self.rhs),
            "expected_negative": self.expected_negative,
        }


@dataclass
class Report:
    command: str
    config: dict
    trials: int = 0
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    elapsed_ms: int = 0
    version: str = __version__
    generator: str = GENERATOR_NAME

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def unexpected_failures(self) -> list:
        return [f for f in self.failures if not f.expected_negative]

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "generator": self.generator,
            "trials": self.trials,
            "checks": dict(sorted(self.checks.items())),
            "failures": [f.to_json() for f in sorted(self.failures, key=lambda f: (f.trial, f.prop))],
            "observations": self.observations,
            "elapsed_ms": self.elapsed_ms,
            "version": self.version,
        }

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.trials} trials, {len(self.failures)} failures "
                 f"({self.elapsed_ms} ms)"]
        for name, count in sorted(self.checks.items()):
            bad = sum(1 for f in self.failures if f.prop == name)
            lines.append(f"  {name}: {count - bad}/{count} ok")
        for f in sorted(self.failures, key=lambda f: (f.trial, f.prop)):
            tag = " (expected)" if f.expected_negative else ""
            lines.append(f"  FAIL trial {f.trial} {f.prop}{tag}")
        return "\n".join(lines)


class _Checker:
    def __init__(self, report: Report):
        self.report = report
        self.trial = 0

    def __call__(self, prop: str, lhs, rhs, inputs: dict, *, expected_negative: bool = False) -> bool:
        self.report.checks[prop] = self.report.checks.get(prop, 0) + 1
        if lhs == rhs:
            return True
        self.report.failures.append(Failure(self.trial, prop, inputs, lhs, rhs, expected_negative))
        return False

    def observe(self, **data) -> None:
        self.report.observations.append({"trial": self.trial, **encode(data)})


def _sg(e: int) -> int:
    return -1 if e % 2 else 1


def _n(cfg: SuiteConfig, rng, default=(3,)) -> int:
    return cfg.dim if cfg.dim is not None else rng.choice(default)


# ---------------------------------------------------------------------------
# individual suites; each runs one trial


def _schouten(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    K, D = min(cfg.mv_deg, n), cfg.max_deg
    p, q, s = (rng.randint(0, K) for _ in range(3))
    P = rand_multivector(rng, n, p, D)
    Q = rand_multivector(rng, n, q, D)
    S = rand_multivector(rng, n, s, D)
    inp = {"pi": P, "rho": Q, "tau": S}
    chk("antisymmetry", schouten(P, Q), schouten(Q, P).scale(-_sg((p - 1) * (q - 1))), inp)
    chk("jacobi", schouten(P, schouten(Q, S)),
        schouten(schouten(P, Q), S) + schouten(Q, schouten(P, S)).scale(_sg((p - 1) * (q - 1))), inp)
    chk("leibniz", schouten(P, mv_wedge(Q, S)),
        mv_wedge(schouten(P, Q), S) + mv_wedge(Q, schouten(P, S)).scale(_sg((p - 1) * q)), inp)
    alpha = rand_form(rng, n, 1, D)
    chk("contract-derivation", contract(alpha, mv_wedge(P, Q)),
        mv_wedge(contract(alpha, P), Q) + mv_wedge(P, contract(alpha, Q)).scale(_sg(p)),
        {"alpha": alpha, "pi": P, "rho": Q})


def _phi_or_zero(omega: DiffForm, k: int, n: int, ring=QQ):
    if omega:
        return phi_homogeneous(omega)
    return zero_cochain(k, k - 2, n, ring)


def _rand_args(rng, n, count, K, D):
    return [rand_multivector(rng, n, rng.randint(0, K), D) for _ in range(count)]


def _phi_dgla(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    K, D = min(cfg.mv_deg, n), cfg.max_deg
    k = rng.randint(0, min(3, n))
    omega = rand_nonzero(lambda r: rand_form(r, n, k, D), rng)
    args = _rand_args(rng, n, k + 1, K, D)
    lhs = ce_differential(_phi_or_zero(omega, k, n))(*args)
    rhs = _phi_or_zero(de_rham_d(omega), k + 1, n)(*args)
    chk("chain-map", lhs, rhs, {"omega": omega, "args": args})
    if chk.trial == 0 and k <= 1:
        # exhaustive comparison on the monomial spanning family
        fam = spanning_family(n, cfg.span_deg, min(K, 2))
        bad = first_disagreement(ce_differential(_phi_or_zero(omega, k, n)),
                                 _phi_or_zero(de_rham_d(omega), k + 1, n),
                                 combinations_with_replacement(fam, k + 1))
        got = None if bad is None else bad[1:]
        chk("chain-map-spanning", got, None, {"omega": omega, "args": list(bad[0]) if bad else []})

    while True:
        k, l = rng.randint(0, min(3, n)), rng.randint(0, min(3, n))
        if k + l >= 1:
            break
    a = rand_nonzero(lambda r: rand_form(r, n, k, D), rng)
    b = rand_nonzero(lambda r: rand_form(r, n, l, D), rng)
    args = _rand_args(rng, n, k + l - 1, K, D)
    val = ce_bracket(_phi_or_zero(a, k, n), _phi_or_zero(b, l, n))(*args)
    chk("abelian-image", val, MultiVector.zero(n), {"alpha": a, "beta": b, "args": args})


def _phixy(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    D = cfg.max_deg
    w = rand_nonzero(lambda r: rand_form(r, n, 1, D), rng)
    X = rand_multivector(rng, n, 1, D)
    Y = rand_multivector(rng, n, 1, D)
    lhs = -contract(w, schouten(X, Y)) + schouten(contract(w, X), Y) + schouten(X, contract(w, Y))
    rhs = _phi_or_zero(de_rham_d(w), 2, n)(X, Y)
    chk("phixy", lhs, rhs, {"omega": w, "X": X, "Y": Y})


def _nonclosed_3form(rng, n: int) -> DiffForm:
    while True:
        H = rand_form(rng, n, 3, 1)
        if de_rham_d(H):
            return H


def _linfty(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng, (3, 4))
    K = min(cfg.mv_deg, 3, n)
    D = cfg.max_deg
    if cfg.negative_control:
        n = max(n, 4)
        H = _nonclosed_3form(rng, n)
        L = TwistedLInfty.unchecked(n, H)
        dH = phi_homogeneous(de_rham_d(H))
    else:
        H = rand_nonzero(lambda r: rand_closed_3form(r, n), rng)
        L = TwistedLInfty(n, H)
    chk.observe(n=n, linear=H.poly_degree() > 0)
    d4, d5 = jacobi_defect_4(L), jacobi_defect_5(L)
    zero = MultiVector.zero(n)
    for t in range(cfg.tuples):
        if cfg.negative_control and t == 0:
            args4 = [MultiVector.basis((i,), n) for i in range(4)]
        else:
            args4 = _rand_args(rng, n, 4, K, D)
        args5 = _rand_args(rng, n, 5, K, D)
        v4 = d4(*args4)
        if cfg.negative_control:
            chk("defect4-equals-phi-dH", v4, dH(*args4), {"H": H, "args": args4})
            if t == 0:
                chk("jacobi4", v4, zero, {"H": H, "args": args4}, expected_negative=True)
        else:
            chk("jacobi4", v4, zero, {"H": H, "args": args4})
            chk("jacobi5", d5(*args5), zero, {"H": H, "args": args5})


def _mc(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    N = max(cfg.order, 2)
    ring = ArtinRing(order=N)
    roll = rng.random()
    H = DiffForm.zero(n, ring) if roll < 0.3 or n < 3 else rand_closed_3form(rng, n, ring)
    L = TwistedLInfty(n, H)
    if rng.random() < 0.5 and n >= 2:
        # coefficient times a single constant bivector: Poisson in any dimension
        i, j = sorted(rng.sample(range(n), 2))
        pi1 = MultiVector.basis((i, j), n, rand_poly(rng, n, 1).with_ring(ring), ring)
    else:
        pi1 = rand_multivector(rng, n, 2, 1).with_ring(ring)
    sol = mc_solve(L, pi1, N)
    inp = {"H": H, "pi1": pi1}
    chk.observe(status=sol.status, order=sol.order)
    if sol.solved:
        chk("solution-residual", mc_residual(L, sol.pi).truncate(N), MultiVector.zero(n, ring), inp)
        if not H and N >= 2:
            lam = rand_multivector(rng, n, 1, cfg.max_deg, ring, hmin=1)
            g = gauge_apply_untwisted(L, lam, MCElement(sol.pi))
            chk("gauge-preserves-mc", mc_residual(L, g).truncate(N), MultiVector.zero(n, ring),
                {**inp, "lambda": lam, "pi": sol.pi})
    else:
        res = mc_residual(L, sol.pi).truncate(N)
        chk("obstruction-class", sol.obstruction, res.h_coefficient(sol.order), inp)
        low = res.truncate(sol.order)
        chk("obstruction-lower-orders", low, MultiVector.zero(n, ring), inp)


def _hochschild(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    order = min(cfg.max_deg, 2)
    p, q, s = (rng.randint(1, 3) for _ in range(3))
    D = rand_mdo(rng, n, p, order)
    E = rand_mdo(rng, n, q, order)
    F = rand_mdo(rng, n, s, order, terms=1)
    a = rand_poly(rng, n, 2)
    D0 = rand_mdo(rng, n, rng.randint(0, 3), order)
    chk("delta-squared", hochschild_delta(hochschild_delta(D0)), MultiDiffOp.zero(n, D0.arity + 2),
        {"D": D0})
    inp = {"D": D, "E": E}
    br = gerstenhaber_bracket
    chk("antisymmetry", br(D, E), br(E, D).scale(-_sg((p - 1) * (q - 1))), inp)
    chk("jacobi", br(D, br(E, F)), br(br(D, E), F) + br(E, br(D, F)).scale(_sg((p - 1) * (q - 1))),
        {"D": D, "E": E, "F": F})
    chk("delta-derivation", hochschild_delta(br(D, E)),
        br(hochschild_delta(D), E) + br(D, hochschild_delta(E)).scale(_sg(p - 1)), inp)
    ia = lambda X: i_a_cochain(a, X)
    chk("ia-delta-anticommute", hochschild_delta(ia(D)) + ia(hochschild_delta(D)),
        MultiDiffOp.zero(n, p), {"a": a, "D": D})
    chk("ia-bracket-derivation", ia(br(D, E)), br(ia(D), E) + br(D, ia(E)).scale(_sg(p - 1)),
        {"a": a, **inp})
    chk("ia-cup-derivation", ia(cup(D, E)), cup(ia(D), E) + cup(D, ia(E)).scale(_sg(p)), {"a": a, **inp})
    k = rng.randint(0, min(3, n))
    P = rand_multivector(rng, n, k, 2)
    chk("hkr-closed", hochschild_delta(hkr(P)), MultiDiffOp.zero(n, k + 1), {"pi": P})


def _hkr(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = _n(cfg, rng)
    k = rng.randint(0, min(cfg.mv_deg, n))
    P = rand_multivector(rng, n, k, cfg.max_deg)
    chk("hkr-closed", hochschild_delta(hkr(P)), MultiDiffOp.zero(n, k + 1), {"pi": P})
    if k >= 1:
        a = rand_poly(rng, n, cfg.max_deg)
        rep = hkr_ia_discrepancy(a, P)
        ratio = rep["ratio"]
        chk.observe(k=k, equal=rep["equal"], ratio=ratio if not isinstance(ratio, str) else None)


def _symmetry(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    m = rng.randint(1, 5)
    s = Permutation(tuple(rng.sample(range(m), m)))
    t = Permutation(tuple(rng.sample(range(m), m)))
    degs = [rng.randint(0, 3) for _ in range(m)]
    chk("koszul-homomorphism", koszul_sign(t * s, degs),
        koszul_sign(s, t.permute(degs)) * koszul_sign(t, degs),
        {"sigma": list(s.images), "tau": list(t.images), "degrees": degs})

    n = _n(cfg, rng)
    K, D = min(cfg.mv_deg, n), cfg.max_deg
    k = rng.randint(2, min(3, n))
    w = rand_nonzero(lambda r: rand_form(r, n, k, D), rng)
    args = _rand_args(rng, n, k, K, D)
    i = rng.randrange(k - 1)
    chk("handle-symmetry", symmetry_defect(phi_homogeneous(w), args, i), MultiVector.zero(n),
        {"omega": w, "args": args, "slot": i})

    # composites of arity <= 3 built from Phi's and m
    k, l = rng.randint(1, 2), rng.randint(1, 2)
    a = rand_nonzero(lambda r: rand_form(r, n, k, D), rng)
    b = rand_nonzero(lambda r: rand_form(r, n, l, D), rng)
    A, B = phi_homogeneous(a), phi_homogeneous(b)
    pool = [A, B, m_cochain(n)]
    outer, inner = rng.choice(pool), rng.choice(pool)
    comp = ce_compose(outer, inner)
    if 2 <= comp.arity <= 3:
        args = _rand_args(rng, n, comp.arity, K, D)
        i = rng.randrange(comp.arity - 1)
        chk("symmetry-transfer", symmetry_defect(comp, args, i), MultiVector.zero(n),
            {"outer": outer.tag, "inner": inner.tag, "alpha": a, "beta": b, "args": args, "slot": i})
    args = _rand_args(rng, n, k + l - 1, K, D)
    chk("kl-relation", ce_compose(A, B)(*args), ce_compose(B, A)(*args).scale(_sg(k * l)),
        {"alpha": a, "beta": b, "args": args})
    chk("full-vs-shuffle", ce_compose(A, B, strategy="full")(*args), ce_compose(A, B)(*args),
        {"alpha": a, "beta": b, "args": args})


def _mc_bivector(rng, n, ring, g: NilpotentDGLA) -> MultiVector:
    """A Maurer-Cartan element: f * d_x^d_y gauge-moved by a random vector field."""
    f = rand_poly(rng, n, 2, ring, hmin=1)
    gamma = MultiVector.basis((0, 1), n, f, ring)
    lam = rand_multivector(rng, n, 1, 1, ring, hmin=1)
    return gauge_action(g, lam, gamma)


def _deligne(rng, cfg: SuiteConfig, chk: _Checker) -> None:
    n = cfg.dim if cfg.dim is not None else rng.choice((2, 3))
    n = max(n, 2)
    N = rng.randint(2, max(2, min(cfg.order, 4)))
    ring = ArtinRing(order=N)
    if rng.random() < 0.5:
        g = NilpotentDGLA.poisson_twisted(MultiVector.basis((0, 1), n, 1, ring))
        kind = "d=[dx^dy,-]"
    else:
        g = NilpotentDGLA(n, ring)
        kind = "d=0"
    D = cfg.max_deg
    gamma = _mc_bivector(rng, n, ring, g)
    lam, b, c = (rand_multivector(rng, n, 1, D, ring, hmin=1) for _ in range(3))
    zero = MultiVector.zero(n, ring)
    inp = {"dgla": kind, "gamma": gamma, "lambda": lam, "b": b, "c": c}
    chk("generated-mc", is_mc(g, gamma), zero, inp)
    chk("gauge-preserves-mc", is_mc(g, gauge_action(g, lam, gamma)), zero, inp)
    chk("action-law", gauge_action(g, bch(g, lam, b), gamma), gauge_action(g, lam, gauge_action(g, b, gamma)),
        inp)
    chk("bch-associativity", bch(g, lam, bch(g, b, c)), bch(g, bch(g, lam, b), c), inp)
    chk("bch-inverse", bch(g, lam, bch_inverse(g, lam)), zero, inp)
    chk("two-cell-trivial", two_cell_target(g, lam, zero, gamma), lam, inp)
    # curvature equivariance on an arbitrary degree-1 element
    rho = rand_multivector(rng, n, 2, D, ring, hmin=1)
    chk("curvature-equivariance", is_mc(g, gauge_action(g, lam, rho)), ad_exp(g, lam, is_mc(g, rho)),
        {**inp, "rho": rho})


_RUNNERS: dict[str, Callable] = {
    "schouten": _schouten,
    "phi-dgla": _phi_dgla,
    "phixy": _phixy,
    "linfty": _linfty,
    "mc": _mc,
    "hochschild": _hochschild,
    "symmetry": _symmetry,
    "hkr": _hkr,
    "deligne": _deligne,
}


def run_suite(cfg: SuiteConfig, command: Optional[str] = None) -> Report:
    """Run ``cfg.trials`` seeded trials of one suite."""
    cfg.validate()
    report = Report(command=command or f"suite {cfg.suite}", config=asdict(cfg))
    chk = _Checker(report)
    runner = _RUNNERS[cfg.suite]
    start = time.perf_counter()
    for t in range(cfg.trials):
        chk.trial = t
        runner(trial_rng(cfg.suite, cfg.seed, t), cfg, chk)
        report.trials += 1
    report.elapsed_ms = int((time.perf_counter() - start) * 1000)
    return report
