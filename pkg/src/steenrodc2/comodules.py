"""Comodules over the dual Steenrod algebroids.

Fixtures (sphere, B Z/2, B' Z/2), twisted extension of scalars along Psi,
the iota*-diagram verification, profile-defined quotient comodules of
A//A(n) type computed as cotensor kernels, freeness certification against a
combinatorial oracle, and restriction to the motivic line.

Scalar conventions, both needed for the iota* square to commute:
  - applying a coaction to a scalar multiple passes the scalar through the
    right unit onto the algebra slot: lambda(r*y) = eta_R(r) * lambda(y);
  - a scalar already sitting on the comodule symbol of a computed tensor in
    C (x)_M A moves across the tensor sign as plain (eta_L) multiplication.
Cohomological comodules store negated bidegrees (variance flag), so degree
balance is uniformly deg(sym) = deg(sym') + deg(coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .f2 import f2_kernel_ints
from .grading import Bidegree, Window, ZERO
from .ground import (GroundElement, GroundMonomial, ONE, ground_basis,
                     mul_monomial)
from .algebroid import (AlgebraElement, GenMonomial, TensorElement, UNIT_MON,
                        UnsupportedScalarError, _odd_binomial,
                        gen_monomial_degree, get_algebroid)
from .maps import MapReport, psi

_KAPPA_SAFETY = 0  # coaction emission handles bounds exactly; no fudge


@dataclass(frozen=True)
class Comodule:
    """A comodule presented by a degreewise symbol basis and a lazily
    window-evaluated coaction.

    `coaction(sym, bound)` returns {sym2: AlgebraElement} listing every term
    sym2 (x) a of lambda(sym) whose symbol has natural topological degree
    <= bound; coaction formulas only raise symbol degrees, so the bound is
    an exact truncation.
    """
    name: str
    alg: str
    variance: str  # "homological" | "cohomological"
    symbols_fn: Callable
    degree_fn: Callable
    coaction_fn: Callable
    label_fn: Callable

    def stored(self, d_natural: Bidegree) -> Bidegree:
        return -d_natural if self.variance == "cohomological" else d_natural

    def symbols(self, d_natural: Bidegree) -> list:
        return self.symbols_fn(self.stored(d_natural))

    def degree(self, sym) -> Bidegree:
        """Internal (stored) bidegree."""
        return self.degree_fn(sym)

    def natural_degree(self, sym) -> Bidegree:
        d = self.degree_fn(sym)
        return -d if self.variance == "cohomological" else d

    def coaction(self, sym, bound: int) -> dict:
        return self.coaction_fn(sym, bound)

    def label(self, sym) -> str:
        return self.label_fn(sym)

    def dump(self, win: Window) -> dict:
        """JSON-ready basis-and-coaction listing over a natural-degree window."""
        alg = get_algebroid(self.alg)
        bound = max(abs(win.t_min), abs(win.t_max))
        out = []
        for d in win.bidegrees():
            for sym in self.symbols(d):
                out.append({
                    "symbol": self.label(sym),
                    "degree": [d.t, d.w],
                    "coaction": [
                        [self.label(s2), alg.render(a)]
                        for s2, a in sorted(self.coaction(sym, bound).items(),
                                            key=lambda kv: str(kv[0]))
                    ],
                })
        return {"name": self.name, "algebroid": self.alg,
                "variance": self.variance, "basis": out}


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def fixture(name: str) -> Comodule:
    if name == "sphere":
        alg = get_algebroid("classical")
        return Comodule(
            "sphere", "classical", "cohomological",
            symbols_fn=lambda d: ["1"] if d == ZERO else [],
            degree_fn=lambda s: ZERO,
            coaction_fn=lambda s, bound: {"1": alg.one()},
            label_fn=lambda s: "1",
        )
    if name == "bz2_classical":
        return Comodule(
            "bz2_classical", "classical", "cohomological",
            symbols_fn=lambda d: [-d.t] if d.w == 0 and d.t <= -1 else [],
            degree_fn=lambda k: Bidegree(-k, 0),
            coaction_fn=_bz2_coaction,
            label_fn=lambda k: f"x^{k}" if k != 1 else "x",
        )
    if name == "bprime_c2":
        return Comodule(
            "bprime_c2", "c2", "cohomological",
            symbols_fn=_bprime_symbols,
            degree_fn=lambda s: Bidegree(-(s[0] + 2 * s[1]), -(s[0] + s[1])),
            coaction_fn=_bprime_coaction,
            label_fn=_bprime_label,
        )
    raise ValueError(f"unknown fixture {name!r}")


def _bz2_coaction(k: int, bound: int) -> dict:
    """lambda(x^k) = (sum_i x^(2^i) (x) xb_i)^k, all output exponents <= bound."""
    alg = get_algebroid("classical")
    single = []
    i = 0
    while 2 ** i <= bound:
        coeff = alg.one() if i == 0 else alg.gen("xi", i)
        single.append((2 ** i, coeff))
        i += 1
    out = {0: alg.one()}
    for _ in range(k):
        nxt: dict = {}
        for e, a in out.items():
            for e2, a2 in single:
                if e + e2 > bound:
                    continue
                key = e + e2
                term = alg.mul(a, a2)
                nxt[key] = nxt.get(key, alg.zero()) + term
        out = nxt
    return {e: a for e, a in out.items() if a}


def _bprime_symbols(d: Bidegree) -> list:
    # stored degree of c^eps b^k is (-(eps+2k), -(eps+k)); basis {b^k, c b^k}
    t, w = -d.t, -d.w
    k = t - w
    eps = w - k
    if eps in (0, 1) and k >= 0 and eps + k >= 1:
        return [(eps, k)]
    return []


def _bprime_label(sym) -> str:
    eps, k = sym
    parts = (["c"] if eps else []) + ([f"b^{k}" if k != 1 else "b"] if k else [])
    return "*".join(parts) if parts else "1"


def _bprime_coaction(sym, bound: int) -> dict:
    """lambda(c^eps b^k) = lambda(c)^eps lambda(b)^k over the equivariant
    dual; natural degree of an output symbol (eps', K) is eps' + 2K."""
    alg = get_algebroid("c2")
    eps, k = sym
    lam_b = []
    i = 0
    while 2 ** (i + 1) <= bound:
        coeff = alg.one() if i == 0 else alg.gen("xi", i)
        lam_b.append(((0, 2 ** i), coeff))
        i += 1
    out = {(0, 0): alg.one()}

    def convolve(terms):
        nxt: dict = {}
        for (e1, k1), a in out.items():
            for (e2, k2), a2 in terms:
                e, kk = e1 + e2, k1 + k2
                if e > 1 or e + 2 * kk > bound:
                    continue
                nxt[(e, kk)] = nxt.get((e, kk), alg.zero()) + alg.mul(a, a2)
        return {s: a for s, a in nxt.items() if a}

    for _ in range(k):
        out = convolve(lam_b)
    if eps:
        lam_c = [((1, 0), alg.one())]
        i = 0
        while 2 ** (i + 1) <= bound:
            lam_c.append(((0, 2 ** i), alg.gen("tau", i)))
            i += 1
        out = convolve(lam_c)
    return out


# ---------------------------------------------------------------------------
# Twisted extension of scalars along Psi
# ---------------------------------------------------------------------------

def _psi_image(i: int, variant: str) -> AlgebraElement:
    if variant == "corrected":
        return psi(i)
    if variant == "uncorrected":
        return psi(i, uncorrected=True)
    if variant == "drop-rho-xi1":
        out = psi(i)
        if i == 1:
            out = out + get_algebroid("c2").element(
                (GroundMonomial(1, 0, False), GenMonomial((), ((1, 1),))))
        return out
    raise ValueError(f"unknown variant {variant!r}")


def _psi_extend(x: AlgebraElement, variant: str) -> AlgebraElement:
    """Multiplicative extension of the chosen Psi-variant to the classical dual."""
    alg = get_algebroid("c2")
    out = alg.zero()
    for _c, m in x.terms:
        term = alg.one()
        for i, e in m.xis:
            img = _psi_image(i, variant)
            for _ in range(e):
                term = alg.mul(term, img)
        out = out + term
    return out


def twisted_extend(cm: Comodule, variant: str = "corrected") -> Comodule:
    """Classical comodule -> EquivC2 comodule on the weight-zero line:
    coaction = (id (x) Psi) o lambda."""
    if cm.alg != "classical":
        raise ValueError("twisted_extend takes a classical comodule")

    def coact(sym, bound):
        return {s: v for s, v in
                ((s, _psi_extend(a, variant))
                 for s, a in cm.coaction_fn(sym, bound).items()) if v}

    return replace(cm, alg="c2", name=f"{cm.name}_twisted", coaction_fn=coact)


# ---------------------------------------------------------------------------
# Comodule axiom verification
# ---------------------------------------------------------------------------

def _tensor_pair(algname: str, x: AlgebraElement, y: AlgebraElement) -> TensorElement:
    """x (x) y in A (x)_M A; y's eta_L coefficients shuttle through eta_R."""
    alg = get_algebroid(algname)
    raw = []
    for c1, m1 in x.terms:
        for c2, m2 in y.terms:
            if c2.kappa:
                raise UnsupportedScalarError(
                    "kappa coefficient cannot cross the tensor sign")
            raw.append((c1,
                        ((tuple((i, 1) for i in m1.taus), m1.xis),
                         (tuple((i, 1) for i in m2.taus), m2.xis)),
                        ((0, 0), (c2.a, c2.b))))
    return TensorElement(algname, 2, frozenset(alg._normalize_tensor_raw(raw, 2)))


def coassoc_check(cm: Comodule, win: Window) -> MapReport:
    """Degree balance, counit law, and coassociativity of the coaction on
    every window basis symbol (natural coordinates)."""
    alg = get_algebroid(cm.alg)
    bound = max(abs(win.t_min), abs(win.t_max))
    checks = 0
    failures = []
    for d in win.bidegrees():
        for sym in cm.symbols(d):
            checks += 1
            la = cm.coaction(sym, bound)
            ok = True
            # degree balance (stored degrees, uniform homological form)
            for s2, a in la.items():
                da = a.degree()
                if da is None or cm.degree(sym) != cm.degree(s2) + da:
                    failures.append(
                        f"degree balance at {cm.label(sym)} {tuple(d)}")
                    ok = False
                    break
            if not ok:
                continue
            # counit law: (id (x) eps) lambda = id
            eps: dict = {}
            for s2, a in la.items():
                e = alg.counit(a)
                if e.terms:
                    eps[s2] = eps.get(s2, frozenset()) ^ e.terms
            eps = {s: t for s, t in eps.items() if t}
            if eps != {sym: frozenset({ONE})}:
                failures.append(f"counit law at {cm.label(sym)} {tuple(d)}")
                continue
            # coassociativity
            side_one: dict = {}
            for s1, a in la.items():
                for s2, a2 in cm.coaction(s1, bound).items():
                    t = _tensor_pair(cm.alg, a2, a)
                    side_one[s2] = side_one.get(s2, t + t) + t
            side_two = {s1: alg.diagonal_elem(a) for s1, a in la.items()}
            keys = set(side_one) | set(side_two)
            for s2 in keys:
                lhs = side_one.get(s2)
                rhs = side_two.get(s2)
                lterms = lhs.terms if lhs else frozenset()
                rterms = rhs.terms if rhs else frozenset()
                if lterms != rterms:
                    d2 = cm.natural_degree(s2)
                    failures.append(
                        f"coassociativity at {cm.label(s2)} {tuple(d2)}")
                    break
    return MapReport(f"comodule axioms, {cm.name}, window t {win.t_min}:{win.t_max} "
                     f"w {win.w_min}:{win.w_max}", checks, tuple(failures))


def iota_diagram_check(win: Window, variant: str = "corrected") -> MapReport:
    """Both components of the iota* square: B' Z/2 -> B Z/2 with
    iota*(c) = tau x, iota*(b) = tau x^2 + rho x, against the twisted
    B Z/2 coaction."""
    alg = get_algebroid("c2")
    bp = fixture("bprime_c2")
    bz = twisted_extend(fixture("bz2_classical"), variant)
    bound = max(abs(win.t_min), abs(win.t_max))

    def iota_star(eps, k):
        """iota*(c^eps b^k) as [(scalar, x-exponent)] pairs."""
        out = []
        for j in range(k + 1):
            if _odd_binomial(k, j):
                out.append((GroundMonomial(k - j, eps + j, False),
                            eps + 2 * j + (k - j)))
        return out

    checks = 0
    failures = []
    for d in win.bidegrees():
        for sym in bp.symbols(d):
            checks += 1
            eps, k = sym
            path_a: dict = {}
            # comodule-side scalars of iota* move across by plain eta_L mult
            for (e1, k1), a in bp.coaction(sym, 2 * bound).items():
                for r, n in iota_star(e1, k1):
                    if n <= bound:
                        t = alg.mul(alg.scalar(r), a)
                        path_a[n] = path_a.get(n, alg.zero()) + t
            path_b: dict = {}
            # coaction applied to a scalar multiple passes it through eta_R
            for r, n in iota_star(eps, k):
                eta = alg.unit_scalar("right", GroundElement.of("HFq", r))
                for n2, a in bz.coaction(n, bound).items():
                    path_b[n2] = path_b.get(n2, alg.zero()) + alg.mul(eta, a)
            keys = {n for n, a in path_a.items() if a} | \
                   {n for n, a in path_b.items() if a}
            for n in sorted(keys):
                if path_a.get(n, alg.zero()) != path_b.get(n, alg.zero()):
                    failures.append(
                        f"iota square fails at {bp.label(sym)}, x^{n} term")
                    break
    return MapReport(
        "iota diagram, window t "
        f"{win.t_min}:{win.t_max} w {win.w_min}:{win.w_max}"
        + ("" if variant == "corrected" else f", {variant}"),
        checks, tuple(failures))


# ---------------------------------------------------------------------------
# Quotient comodules from profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientProfile:
    """Strides s_i on the xi_i-exponents (allowed exponents are multiples of
    s_i) and the retained tau-index set T = {i >= tau_min}."""
    name: str
    strides: tuple[int, ...]
    tau_min: int

    def stride(self, i: int) -> int:
        return self.strides[i - 1] if i <= len(self.strides) else 1

    def keeps(self, m: GenMonomial) -> bool:
        """Membership of a monomial in B: the profile subalgebra's monomial
        complement basis (xi-exponents below stride, tau indices below T)."""
        return (all(i < self.tau_min for i in m.taus)
                and all(e < self.stride(i) for i, e in m.xis))

    def admits(self, m: GenMonomial) -> bool:
        """Membership in the quotient's monomial basis: xi-exponents are
        multiples of the stride, tau indices in T."""
        return (all(i >= self.tau_min for i in m.taus)
                and all(e % self.stride(i) == 0 for i, e in m.xis))


def _a_profile(n: int) -> QuotientProfile:
    """A(n): xi-strides 2^{n+2-i}, tau indices n+2 and up in the quotient.

    The tau cutoff is forced by the coideal condition: Delta(tau_min) has the
    middle terms xi_{tau_min-k}^{2^k} (x) tau_k, and those xi-powers all sit
    inside the profile ideal exactly when tau_min = n+2 (the ko-type quotient
    is free on theta_3, theta_4, ..., zeta_1^4, zeta_2^2, zeta_3, ...).
    """
    strides = tuple(2 ** max(n + 2 - i, 0) for i in range(1, n + 3))
    return QuotientProfile(f"A({n})", strides, n + 2)


def _e_profile(n: int) -> QuotientProfile:
    return QuotientProfile(f"E({n})", (), n + 1)


PROFILES = {
    "A0": _a_profile(0), "A1": _a_profile(1),
    "A2": _a_profile(2), "A3": _a_profile(3),
    "E0": _e_profile(0), "E1": _e_profile(1), "E2": _e_profile(2),
    # the ko[x^8] profile (theta_3 on) coincides with A(1) under the n+2 cutoff
    "ko-theta3": QuotientProfile("ko-theta3", _a_profile(1).strides, 3),
}


def quotient_dual_basis(alg_name: str, p: QuotientProfile, d: Bidegree,
                        kappa_free: bool = False) -> list[AlgebraElement]:
    """Basis of Q_d = {x : (id (x) pi_B) Delta(x) = x (x) 1} as a cotensor
    kernel; pi_B keeps exactly the monomials of B (see QuotientProfile.keeps)."""
    alg = get_algebroid(alg_name)
    basis = alg.basis(d)
    if kappa_free:
        basis = [(c, m) for c, m in basis if not c.kappa]
    rows: dict = {}
    for j, (c, m) in enumerate(basis):
        for cm, (m0, m1) in alg.diagonal(m).terms:
            if not p.keeps(m1):
                continue
            c2 = mul_monomial(alg.ground, c, cm)
            if c2 is None:
                continue
            key = (c2, m0, m1)
            rows[key] = rows.get(key, 0) ^ (1 << j)
        key = (c, m, UNIT_MON)
        rows[key] = rows.get(key, 0) ^ (1 << j)
    kernel = f2_kernel_ints([v for v in rows.values() if v], len(basis))
    out = []
    for combo in kernel:
        terms = frozenset(basis[j] for j in range(len(basis))
                          if (combo >> j) & 1)
        out.append(AlgebraElement(alg_name, terms))
    return out


def quotient_dim_oracle(alg_name: str, p: QuotientProfile, d: Bidegree) -> int:
    """Convolution of the profile-monomial count with the ground-ring
    Hilbert function: the rank of a degreewise-free quotient."""
    alg = get_algebroid(alg_name)
    cands = set()
    budget = d.t - d.w
    if budget >= 0:
        cands.update(alg.gen_monomials(max(2 * budget, 0)))
    if alg.ground == "HFq" and d.t >= 0:
        cands.update(alg.gen_monomials(d.t))
    if alg.ground in ("F2", "Mc") and d.t >= 0:
        cands.update(alg.gen_monomials(d.t))
    total = 0
    for m in cands:
        if p.admits(m):
            total += len(ground_basis(alg.ground,
                                      d - gen_monomial_degree(alg_name, m)))
    return total


def _coideal_defect(alg, p: QuotientProfile, q: AlgebraElement) -> bool:
    """True iff (id (x) theta)(Delta q) != 0, i.e. q's diagonal leaves
    A (x) Q."""
    dq = alg.diagonal_elem(q)
    t3 = alg.apply_diagonal_slot(dq, 1)
    acc = {t for t in t3.terms if p.keeps(t[1][2])}
    acc ^= {(c, (m0, m1, UNIT_MON)) for c, (m0, m1) in dq.terms}
    return bool(acc)


def quotient_freeness_check(alg_name: str, p: QuotientProfile,
                            win: Window, check_coideal: bool = True) -> MapReport:
    """dim Q_d against the convolution oracle at every window bidegree, plus
    the left-coideal property Delta(Q) <= A (x) Q."""
    alg = get_algebroid(alg_name)
    checks = 0
    failures = []
    for d in win.bidegrees():
        qs = quotient_dual_basis(alg_name, p, d)
        checks += 1
        expect = quotient_dim_oracle(alg_name, p, d)
        if len(qs) != expect:
            failures.append(
                f"dim mismatch at {tuple(d)}: kernel {len(qs)} != oracle {expect}")
            continue
        if check_coideal:
            for q in qs:
                checks += 1
                if _coideal_defect(alg, p, q):
                    failures.append(f"left-coideal defect at {tuple(d)}")
                    break
    return MapReport(f"quotient freeness, {alg_name}, {p.name}, window "
                     f"t {win.t_min}:{win.t_max} w {win.w_min}:{win.w_max}",
                     checks, tuple(failures))


# ---------------------------------------------------------------------------
# Restriction to the motivic line
# ---------------------------------------------------------------------------

def motivic_restrict(cm: Comodule, win: Window):
    """EquivC2 comodule -> MotivicR comodule: coefficients reinterpreted in
    the kappa-free span.  Returns (comodule_or_None, report); an obstruction
    names the offending basis symbol and bidegree."""
    if cm.alg != "c2":
        raise ValueError("motivic_restrict takes an equivariant comodule")
    bound = max(abs(win.t_min), abs(win.t_max))
    checks = 0
    failures = []
    for d in win.bidegrees():
        for sym in cm.symbols(d):
            checks += 1
            for s2, a in cm.coaction(sym, bound).items():
                if any(c.kappa for c, _m in a.terms):
                    failures.append(
                        f"kappa obstruction at {cm.label(sym)} {tuple(d)}, "
                        f"term {cm.label(s2)}")
    report = MapReport(f"motivic restriction, {cm.name}", checks, tuple(failures))
    if failures:
        return None, report

    def coact(sym, bound2):
        return {s: AlgebraElement("real-motivic", a.terms)
                for s, a in cm.coaction_fn(sym, bound2).items()}

    return (replace(cm, alg="real-motivic", name=f"{cm.name}_motivic",
                    coaction_fn=coact),
            report)


def quotient_restriction_check(p: QuotientProfile, win: Window) -> MapReport:
    """Oracle equivalence for the quotient comodule: the kappa-free quotient
    classes of the equivariant dual restrict to exactly the directly computed
    MotivicR quotient classes, with identical diagonal (coaction) matrices."""
    c2 = get_algebroid("c2")
    mot = get_algebroid("real-motivic")
    checks = 0
    failures = []
    for d in win.bidegrees():
        qr = quotient_dual_basis("real-motivic", p, d)
        qc = quotient_dual_basis("c2", p, d, kappa_free=True)
        checks += 1
        if len(qr) != len(qc):
            failures.append(f"rank mismatch at {tuple(d)}: {len(qc)} != {len(qr)}")
            continue
        for vr, vc in zip(qr, qc):
            if vr.terms != vc.terms:
                failures.append(f"basis vector mismatch at {tuple(d)}")
                break
            checks += 1
            if mot.diagonal_elem(vr).terms != c2.diagonal_elem(vc).terms:
                failures.append(f"coaction matrix mismatch at {tuple(d)}")
                break
    return MapReport(f"quotient restriction, {p.name}, window "
                     f"t {win.t_min}:{win.t_max} w {win.w_min}:{win.w_max}",
                     checks, tuple(failures))
