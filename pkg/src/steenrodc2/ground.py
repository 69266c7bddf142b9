"""The bigraded ground rings and degreewise modules over M = F2[rho, tau].

Rings: M = F2[rho, tau]; DM its graded F2-linear dual (basis dual to
rho^i tau^j, stored with exponents (-i, -j)); HFq = M + kappa*DM, the
square-zero extension; L = F2[rho^{+-1}, tau^{+-1}]; M_rho_inv = M[1/rho];
Mc = F2[tau] = M/(rho); F2 = the prime field.

The bidegree of rho^a tau^b is (-a, -a-b); kappa contributes (0, 2).
In HFq the kappa part is truncated: multiplying kappa*rho^-i*tau^-j by
rho^a tau^b is nonzero only while both exponents stay <= 0, and
kappa * kappa = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .f2 import F2Matrix, f2_rank, _eliminate
from .grading import Bidegree, Window, DEG_RHO, DEG_TAU, DEG_KAPPA

RINGS = ("M", "DM", "HFq", "L", "M_rho_inv", "Mc", "F2")


class WindowError(ValueError):
    """An enumeration window or cutoff too small to guarantee exactness."""


class GroundMonomial(NamedTuple):
    a: int
    b: int
    kappa: bool = False

    def degree(self) -> Bidegree:
        d = Bidegree(-self.a, -self.a - self.b)
        return d + DEG_KAPPA if self.kappa else d


ONE = GroundMonomial(0, 0, False)
RHO = GroundMonomial(1, 0, False)
TAU = GroundMonomial(0, 1, False)
KAPPA = GroundMonomial(0, 0, True)


def monomial_valid(ring: str, m: GroundMonomial) -> bool:
    a, b, kappa = m
    if kappa and ring != "HFq":
        return False
    if kappa:
        return a <= 0 and b <= 0
    if ring in ("M", "HFq"):
        return a >= 0 and b >= 0
    if ring == "DM":
        return a <= 0 and b <= 0
    if ring == "L":
        return True
    if ring == "M_rho_inv":
        return b >= 0
    if ring == "Mc":
        return a == 0 and b >= 0
    if ring == "F2":
        return a == 0 and b == 0
    raise ValueError(f"unknown ring {ring!r}")


def mul_monomial(ring: str, x: GroundMonomial, y: GroundMonomial) -> GroundMonomial | None:
    """Product of two monomials; None means the product is zero."""
    if x.kappa and y.kappa:
        return None  # square-zero extension
    m = GroundMonomial(x.a + y.a, x.b + y.b, x.kappa or y.kappa)
    if m.kappa and not (m.a <= 0 and m.b <= 0):
        return None  # truncation in the negative cone
    if ring == "DM" and not (m.a <= 0 and m.b <= 0):
        return None  # M-action on the dual truncates at the unit
    if not monomial_valid(ring, m):
        raise ValueError(f"product {m} leaves ring {ring}")
    return m


@dataclass(frozen=True)
class GroundElement:
    ring: str
    terms: frozenset[GroundMonomial]

    def __post_init__(self):
        for m in self.terms:
            if not monomial_valid(self.ring, m):
                raise ValueError(f"monomial {m} invalid in ring {self.ring}")

    @classmethod
    def zero(cls, ring: str) -> "GroundElement":
        return cls(ring, frozenset())

    @classmethod
    def one(cls, ring: str) -> "GroundElement":
        return cls(ring, frozenset({ONE}))

    @classmethod
    def of(cls, ring: str, *monos: GroundMonomial) -> "GroundElement":
        acc: set[GroundMonomial] = set()
        for m in monos:
            acc ^= {m}
        return cls(ring, frozenset(acc))

    def __add__(self, other: "GroundElement") -> "GroundElement":
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        return GroundElement(self.ring, self.terms ^ other.terms)

    def __bool__(self):
        return bool(self.terms)

    def to_json(self) -> dict:
        terms = sorted(self.terms, key=lambda m: (m.a, m.b, m.kappa))
        return {"ring": self.ring,
                "terms": [{"a": m.a, "b": m.b, "kappa": m.kappa} for m in terms]}

    @classmethod
    def from_json(cls, data: dict) -> "GroundElement":
        return cls(data["ring"],
                   frozenset(GroundMonomial(t["a"], t["b"], bool(t.get("kappa")))
                             for t in data["terms"]))


def ground_mul(x: GroundElement, y: GroundElement) -> GroundElement:
    if x.ring != y.ring:
        raise ValueError(f"ring mismatch: {x.ring} vs {y.ring}")
    acc: set[GroundMonomial] = set()
    for mx in x.terms:
        for my in y.terms:
            m = mul_monomial(x.ring, mx, my)
            if m is not None:
                acc ^= {m}
    return GroundElement(x.ring, frozenset(acc))


def ground_basis(ring: str, d: Bidegree) -> list[GroundMonomial]:
    """Monomial basis of the ring in bidegree d (dimension <= 2, HFq only)."""
    out = []
    for kappa in (False, True):
        if kappa and ring != "HFq":
            continue
        a = -d.t
        b = d.t - d.w + (2 if kappa else 0)
        m = GroundMonomial(a, b, kappa)
        if monomial_valid(ring, m):
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# Degreewise modules presented by monomial cones
# ---------------------------------------------------------------------------

class Cone(NamedTuple):
    """Sign constraints on (a, b) for the monomials of one generator."""
    a_lo: int | None  # None = unbounded below
    a_hi: int | None
    b_lo: int | None
    b_hi: int | None
    kappa: bool = False

    def contains(self, a: int, b: int) -> bool:
        return ((self.a_lo is None or a >= self.a_lo)
                and (self.a_hi is None or a <= self.a_hi)
                and (self.b_lo is None or b >= self.b_lo)
                and (self.b_hi is None or b <= self.b_hi))


CONES = {
    "M": Cone(0, None, 0, None),
    "DM": Cone(None, 0, None, 0),
    "L": Cone(None, None, None, None),
    "M_rho_inv": Cone(None, None, 0, None),
    "Mc": Cone(0, 0, 0, None),
    "F2": Cone(0, 0, 0, 0),
}


class ModuleGen(NamedTuple):
    label: str
    shift: Bidegree
    cone: Cone


class BasisElt(NamedTuple):
    gen: ModuleGen
    a: int
    b: int

    def degree(self) -> Bidegree:
        d = Bidegree(-self.a, -self.a - self.b)
        if self.gen.cone.kappa:
            d = d + DEG_KAPPA
        return d + self.gen.shift

    def label(self) -> str:
        return f"{self.gen.label}[{self.a},{self.b}]"


@dataclass(frozen=True)
class DegreewiseModule:
    """A module over M with a monomial basis graded by cones.

    rho and tau act by exponent shift (a, b) -> (a+1, b) and (a, b) -> (a, b+1),
    truncated to zero when the shifted exponent pair leaves the cone.
    """
    name: str
    gens: tuple[ModuleGen, ...]

    def basis(self, d: Bidegree) -> list[BasisElt]:
        out = []
        for g in self.gens:
            rel = d - g.shift
            if g.cone.kappa:
                rel = rel - DEG_KAPPA
            a = -rel.t
            b = rel.t - rel.w
            if g.cone.contains(a, b):
                out.append(BasisElt(g, a, b))
        return out

    def dim(self, d: Bidegree) -> int:
        return len(self.basis(d))

    def act(self, r: str, x: BasisElt) -> BasisElt | None:
        """Multiply by rho or tau; None if truncated to zero."""
        da, db = (1, 0) if r == "rho" else (0, 1)
        a, b = x.a + da, x.b + db
        if x.gen.cone.contains(a, b):
            return BasisElt(x.gen, a, b)
        return None


def ground_module(ring: str) -> DegreewiseModule:
    from .grading import ZERO
    if ring == "HFq":
        return DegreewiseModule("HFq", (
            ModuleGen("1", ZERO, CONES["M"]),
            ModuleGen("k", ZERO, Cone(None, 0, None, 0, kappa=True)),
        ))
    if ring == "K":
        # kernel of F2[rho^+-1, tau^+-1] ->> DM: monomials with a > 0 or b > 0
        return DegreewiseModule("K", (
            ModuleGen("Ka", ZERO, Cone(1, None, None, None)),
            ModuleGen("Kb", ZERO, Cone(None, 0, 1, None)),
        ))
    if ring in CONES:
        return DegreewiseModule(ring, (ModuleGen("1", Bidegree(0, 0), CONES[ring]),))
    raise ValueError(f"unknown module {ring!r}")


def free_module(ring: str, gens: list[Bidegree], prefix: str = "g") -> DegreewiseModule:
    cone = CONES[ring]
    return DegreewiseModule(
        f"free({ring},{len(gens)})",
        tuple(ModuleGen(f"{prefix}{i}", d, cone) for i, d in enumerate(gens)),
    )


# ---------------------------------------------------------------------------
# Tensor product over M, computed degreewise
# ---------------------------------------------------------------------------

class TensorBasis(NamedTuple):
    left: BasisElt
    right: BasisElt

    def label(self) -> str:
        return f"{self.left.label()}(x){self.right.label()}"


def _pair_columns(A: DegreewiseModule, B: DegreewiseModule, d: Bidegree,
                  cutoff: int) -> list[TensorBasis]:
    """All monomial pairs of total bidegree d with exponents bounded by cutoff.

    When a pair of cones leaves a free direction (both factors unbounded the
    same way) the enumeration is truncated at |a|,|b| <= cutoff; correctness
    of the quotient then relies on the margin rule documented in
    tensor_over_ground.
    """
    cols = []
    for gA, gB in itertools.product(A.gens, B.gens):
        rel = d - gA.shift - gB.shift
        if gA.cone.kappa:
            rel = rel - DEG_KAPPA
        if gB.cone.kappa:
            rel = rel - DEG_KAPPA
        a_sum = -rel.t
        b_sum = rel.t - rel.w
        for a1 in _split_range(gA.cone.a_lo, gA.cone.a_hi,
                               gB.cone.a_lo, gB.cone.a_hi, a_sum, cutoff):
            for b1 in _split_range(gA.cone.b_lo, gA.cone.b_hi,
                                   gB.cone.b_lo, gB.cone.b_hi, b_sum, cutoff):
                cols.append(TensorBasis(BasisElt(gA, a1, b1),
                                        BasisElt(gB, a_sum - a1, b_sum - b1)))
    cols.sort(key=lambda c: (
        -(abs(c.left.a) + abs(c.left.b) + abs(c.right.a) + abs(c.right.b)),
        c.left.gen.label, c.right.gen.label,
        c.left.a, c.left.b, c.right.a, c.right.b))
    return cols


def _split_range(lo1, hi1, lo2, hi2, total, cutoff):
    """Values x with lo1 <= x <= hi1, lo2 <= total - x <= hi2, and both
    |x| <= cutoff and |total - x| <= cutoff."""
    lo = max(-cutoff, total - cutoff, *( [lo1] if lo1 is not None else [] ))
    hi = min(cutoff, total + cutoff, *( [hi1] if hi1 is not None else [] ))
    if hi2 is not None:
        lo = max(lo, total - hi2)
    if lo2 is not None:
        hi = min(hi, total - lo2)
    return range(lo, hi + 1)


def required_cutoff(d: Bidegree, margin: int = 4) -> int:
    """Margin rule: the cutoff must dominate the bidegree so that every
    divisibility/torsion reduction chain for a monomial pair at d stays inside
    the enumeration box.  Torsion orders of dual monomials contributing to d
    are bounded by |t| and |t - w|."""
    return max(abs(d.t), abs(d.w), abs(d.t - d.w)) + margin


def tensor_over_ground(A: DegreewiseModule, B: DegreewiseModule, d: Bidegree,
                       cutoff: int | None = None):
    """Dimension and basis of (A (x)_M B) in bidegree d.

    The tensor is presented as the F2-span of monomial pairs modulo the
    shuttling relations r*x (x) y + x (x) r*y for r in {rho, tau}.  When a cone
    pair is unbounded the enumeration is cut off at `cutoff` (default: the
    margin rule of required_cutoff); relations are generated from all pairs
    inside the cutoff, which is exact for the modules used here because every
    reduction chain shrinks exponents towards the bidegree-determined core.

    Returns (dim, labels) where labels are representatives of a quotient basis.
    """
    if cutoff is None:
        cutoff = required_cutoff(d)
    elif cutoff < required_cutoff(d, margin=1):
        raise WindowError(
            f"cutoff {cutoff} below margin rule {required_cutoff(d, margin=1)} at {d}")
    cols = _pair_columns(A, B, d, cutoff)
    index = {c: i for i, c in enumerate(cols)}
    rows = []
    for r, deg_r in (("rho", DEG_RHO), ("tau", DEG_TAU)):
        for src in _pair_columns(A, B, d - deg_r, cutoff):
            bits = 0
            ok = True
            lx = A.act(r, src.left)
            if lx is not None:
                tgt = TensorBasis(lx, src.right)
                if tgt not in index:
                    ok = False
                else:
                    bits ^= 1 << index[tgt]
            ry = B.act(r, src.right)
            if ok and ry is not None:
                tgt = TensorBasis(src.left, ry)
                if tgt not in index:
                    ok = False
                else:
                    bits ^= 1 << index[tgt]
            # relations reaching outside the cutoff box are dropped; the
            # surviving set still connects every column to its core
            # representative because shuttling shrinks exponents inward
            if ok and bits:
                rows.append(bits)
    pivots = _eliminate(rows)
    dim = len(cols) - len(pivots)
    labels = [c.label() for i, c in enumerate(cols) if i not in pivots]
    return dim, labels


# ---------------------------------------------------------------------------
# n-fold tensor product over M, presented per bidegree
# ---------------------------------------------------------------------------

class MultiTensor(NamedTuple):
    slots: tuple[BasisElt, ...]

    def label(self) -> str:
        return "(x)".join(s.label() for s in self.slots)


def _bounded_compositions(ranges, total):
    """Tuples (x_0, ..., x_{n-1}) with x_i in ranges[i] summing to total."""
    lo_suffix = [0] * (len(ranges) + 1)
    hi_suffix = [0] * (len(ranges) + 1)
    for i in range(len(ranges) - 1, -1, -1):
        lo_suffix[i] = lo_suffix[i + 1] + ranges[i][0]
        hi_suffix[i] = hi_suffix[i + 1] + ranges[i][1]

    def rec(i, rem, acc):
        if i == len(ranges):
            if rem == 0:
                yield tuple(acc)
            return
        lo, hi = ranges[i]
        for x in range(max(lo, rem - hi_suffix[i + 1]),
                       min(hi, rem - lo_suffix[i + 1]) + 1):
            acc.append(x)
            yield from rec(i + 1, rem - x, acc)
            acc.pop()

    yield from rec(0, total, [])


def _cone_range(lo, hi, cutoff):
    return (max(lo, -cutoff) if lo is not None else -cutoff,
            min(hi, cutoff) if hi is not None else cutoff)


def multi_columns(mods: list[DegreewiseModule], d: Bidegree,
                  cutoff: int) -> list[MultiTensor]:
    """All monomial tuples of total bidegree d with exponents in the cutoff
    box, one BasisElt per slot; deterministic order."""
    cols = []
    for gens in itertools.product(*(m.gens for m in mods)):
        rel = d
        for g in gens:
            rel = rel - g.shift
            if g.cone.kappa:
                rel = rel - DEG_KAPPA
        a_sum = -rel.t
        b_sum = rel.t - rel.w
        a_ranges = [_cone_range(g.cone.a_lo, g.cone.a_hi, cutoff) for g in gens]
        b_ranges = [_cone_range(g.cone.b_lo, g.cone.b_hi, cutoff) for g in gens]
        for avec in _bounded_compositions(a_ranges, a_sum):
            for bvec in _bounded_compositions(b_ranges, b_sum):
                cols.append(MultiTensor(tuple(
                    BasisElt(g, a, b) for g, a, b in zip(gens, avec, bvec))))
    cols.sort(key=lambda c: (
        -sum(abs(s.a) + abs(s.b) for s in c.slots),
        tuple(s.gen.label for s in c.slots),
        tuple((s.a, s.b) for s in c.slots)))
    return cols


class TensorPresentation(NamedTuple):
    """Quotient of the F2-span of `cols` by adjacent shuttling relations,
    with elimination pivots keyed by column index."""
    cols: list
    index: dict
    pivots: dict

    @property
    def dim(self) -> int:
        return len(self.cols) - len(self.pivots)

    def free_columns(self) -> list:
        return [c for i, c in enumerate(self.cols) if i not in self.pivots]

    def reduce(self, vec: int) -> int:
        from .f2 import f2_reduce
        return f2_reduce(self.pivots, vec)


def tensor_presentation(mods: list[DegreewiseModule], d: Bidegree,
                        cutoff: int | None = None) -> TensorPresentation:
    """Presentation of the n-fold tensor over M at bidegree d.

    Same cutoff semantics as tensor_over_ground; for cones bounded towards
    the bidegree (all slots DM-like) the enumeration is finite and exact
    regardless of cutoff.
    """
    if cutoff is None:
        cutoff = required_cutoff(d)
    if not mods:
        raise ValueError("need at least one slot")
    cols = multi_columns(mods, d, cutoff)
    index = {c: i for i, c in enumerate(cols)}
    rows = []
    for r, deg_r in (("rho", DEG_RHO), ("tau", DEG_TAU)):
        for src in multi_columns(mods, d - deg_r, cutoff):
            for j in range(len(mods) - 1):
                bits = 0
                ok = True
                for slot, y in ((j, mods[j].act(r, src.slots[j])),
                                (j + 1, mods[j + 1].act(r, src.slots[j + 1]))):
                    if y is None:
                        continue
                    tgt = MultiTensor(src.slots[:slot] + (y,)
                                      + src.slots[slot + 1:])
                    if tgt not in index:
                        ok = False
                        break
                    bits ^= 1 << index[tgt]
                if ok and bits:
                    rows.append(bits)
    return TensorPresentation(cols, index, _eliminate(rows))
