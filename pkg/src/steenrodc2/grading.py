"""Bidegrees and computation windows.

All degrees are stored homologically: a class in cohomological degree (t, w)
is stored at (-t, -w), with the variance tracked at the comodule layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple


class Bidegree(NamedTuple):
    t: int
    w: int

    def __add__(self, other):
        return Bidegree(self.t + other[0], self.w + other[1])

    def __sub__(self, other):
        return Bidegree(self.t - other[0], self.w - other[1])

    def __neg__(self):
        return Bidegree(-self.t, -self.w)

    def scale(self, n: int) -> "Bidegree":
        return Bidegree(n * self.t, n * self.w)


ZERO = Bidegree(0, 0)
DEG_RHO = Bidegree(-1, -1)
DEG_TAU = Bidegree(0, -1)
DEG_KAPPA = Bidegree(0, 2)


@dataclass(frozen=True)
class Window:
    t_min: int
    t_max: int
    w_min: int
    w_max: int

    def __post_init__(self):
        if self.t_min > self.t_max or self.w_min > self.w_max:
            raise ValueError("empty window")

    def __contains__(self, d) -> bool:
        return self.t_min <= d[0] <= self.t_max and self.w_min <= d[1] <= self.w_max

    def bidegrees(self) -> Iterator[Bidegree]:
        for t in range(self.t_min, self.t_max + 1):
            for w in range(self.w_min, self.w_max + 1):
                yield Bidegree(t, w)

    def extent(self) -> int:
        return max(abs(self.t_min), abs(self.t_max), abs(self.w_min), abs(self.w_max))

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse 'tmin:tmax,wmin:wmax'."""
        try:
            tpart, wpart = text.split(",")
            t_min, t_max = (int(x) for x in tpart.split(":"))
            w_min, w_max = (int(x) for x in wpart.split(":"))
        except ValueError as exc:
            raise ValueError(f"bad window spec {text!r}, expected tmin:tmax,wmin:wmax") from exc
        return cls(t_min, t_max, w_min, w_max)
