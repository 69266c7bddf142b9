"""Exact sparse linear algebra over the two-element field.

Matrices are stored as sets of (row, col) positions at the interface and
bit-packed into Python ints (one int per row) for elimination.  Pivoting is
deterministic: lowest column index first, rows in their given order.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class F2Vector:
    length: int
    support: frozenset[int]

    def __post_init__(self):
        if any(p < 0 or p >= self.length for p in self.support):
            raise ValueError("support position out of bounds")

    @classmethod
    def from_int(cls, length: int, bits: int) -> "F2Vector":
        return cls(length, frozenset(i for i in range(length) if (bits >> i) & 1))

    def to_int(self) -> int:
        bits = 0
        for p in self.support:
            bits |= 1 << p
        return bits

    def __bool__(self) -> bool:
        return bool(self.support)


@dataclass(frozen=True)
class F2Matrix:
    rows: int
    cols: int
    entries: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        for (r, c) in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r},{c}) out of bounds")

    @classmethod
    def from_rows(cls, rows: int, cols: int, row_ints: list[int]) -> "F2Matrix":
        ent = {(r, c) for r, bits in enumerate(row_ints) for c in range(cols)
               if (bits >> c) & 1}
        return cls(rows, cols, frozenset(ent))

    def row_ints(self) -> list[int]:
        out = [0] * self.rows
        for (r, c) in self.entries:
            out[r] |= 1 << c
        return out

    def apply(self, v: F2Vector) -> F2Vector:
        if v.length != self.cols:
            raise ValueError("dimension mismatch")
        x = v.to_int()
        sup = set()
        for r, bits in enumerate(self.row_ints()):
            if bin(bits & x).count("1") % 2:
                sup.add(r)
        return F2Vector(self.rows, frozenset(sup))


def _lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def _eliminate(row_ints: list[int]) -> dict[int, int]:
    """Stream rows into a pivot table keyed by lowest column index."""
    pivots: dict[int, int] = {}
    for row in row_ints:
        while row:
            p = _lowest_bit(row)
            if p in pivots:
                row ^= pivots[p]
            else:
                pivots[p] = row
                break
    return pivots


def f2_rank(m: F2Matrix) -> int:
    return len(_eliminate(m.row_ints()))


def f2_kernel_ints(row_ints: list[int], ncols: int) -> list[int]:
    """Kernel combinations (bit-packed over columns) of a row-int matrix,
    in echelon order by free-column index."""
    col_vecs = [0] * ncols
    for r, bits in enumerate(row_ints):
        b = bits
        while b:
            c = _lowest_bit(b)
            b &= b - 1
            col_vecs[c] |= 1 << r
    pivots: dict[int, tuple[int, int]] = {}  # lowest row -> (colvec, combo)
    basis = []
    for j in range(ncols):
        vec, combo = col_vecs[j], 1 << j
        while vec:
            p = _lowest_bit(vec)
            if p in pivots:
                pv, pc = pivots[p]
                vec ^= pv
                combo ^= pc
            else:
                pivots[p] = (vec, combo)
                break
        if not vec:
            basis.append(combo)
    return basis


def f2_kernel_basis(m: F2Matrix) -> list[F2Vector]:
    """Basis of {x : m x = 0}, in echelon order by free-column index."""
    return [F2Vector.from_int(m.cols, combo)
            for combo in f2_kernel_ints(m.row_ints(), m.cols)]


def f2_solve(m: F2Matrix, b: F2Vector) -> F2Vector | None:
    """Some x with m x = b, free variables zero; None if inconsistent."""
    if b.length != m.rows:
        raise ValueError("b.length must equal m.rows")
    n = m.cols
    cols = m.row_ints()
    col_vecs = [0] * n
    for r, bits in enumerate(cols):
        bb = bits
        while bb:
            c = _lowest_bit(bb)
            bb &= bb - 1
            col_vecs[c] |= 1 << r
    pivots: dict[int, tuple[int, int]] = {}
    for j in range(n):
        vec, combo = col_vecs[j], 1 << j
        while vec:
            p = _lowest_bit(vec)
            if p in pivots:
                pv, pc = pivots[p]
                vec ^= pv
                combo ^= pc
            else:
                pivots[p] = (vec, combo)
                break
    tgt = b.to_int()
    sol = 0
    while tgt:
        p = _lowest_bit(tgt)
        if p not in pivots:
            return None
        pv, pc = pivots[p]
        tgt ^= pv
        sol ^= pc
    return F2Vector.from_int(n, sol)


def f2_reduce(pivots: dict[int, int], vec: int) -> int:
    """Canonical representative of vec modulo the row space of a pivot table
    from _eliminate: every pivot position is cleared.

    Pivot rows have their lowest set bit at the pivot position, so scanning
    bits in ascending order never disturbs positions already passed.
    """
    out = 0
    while vec:
        p = _lowest_bit(vec)
        if p in pivots:
            vec ^= pivots[p]
        else:
            out |= 1 << p
            vec &= vec - 1
    return out


def span_contains(generators: list[int], vec: int) -> bool:
    """Membership of a bit-packed vector in the F2-span of generators."""
    pivots = _eliminate(generators)
    while vec:
        p = _lowest_bit(vec)
        if p not in pivots:
            return False
        vec ^= pivots[p]
    return True
