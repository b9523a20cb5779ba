"""Outward-rounded interval arithmetic.

Each operation widens its float result by enough ulps to cover the worst-case
rounding of the underlying primitive: one ulp for IEEE +-*/ (correctly
rounded), three for exp/log (libm implementations are within about one ulp;
the extra margin costs nothing at the widths used here).  The containment
guarantee -- the true value of any composed expression lies inside the
computed interval -- is fuzz-tested against dense point sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Interval"]

_INF = math.inf


def _down(x: float, ulps: int) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, ulps: int) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, _INF)
    return x


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    # -- construction ------------------------------------------------------

    @classmethod
    def point(cls, x) -> "Interval":
        x = float(x)
        return cls(x, x)

    @classmethod
    def of(cls, x) -> "Interval":
        return x if isinstance(x, Interval) else cls.point(x)

    # -- queries -----------------------------------------------------------

    def width(self) -> float:
        return self.hi - self.lo

    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def strictly_below(self, other: "Interval") -> bool:
        return self.hi < other.lo

    def split(self):
        m = self.mid()
        return Interval(self.lo, m), Interval(m, self.hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = Interval.of(other)
        return Interval(_down(self.lo + o.lo, 1), _up(self.hi + o.hi, 1))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-Interval.of(other))

    def __rsub__(self, other):
        return Interval.of(other) + (-self)

    def __mul__(self, other):
        o = Interval.of(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(cands), 1), _up(max(cands), 1))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.of(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError(f"division by interval containing zero: {o}")
        cands = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(cands), 1), _up(max(cands), 1))

    def __rtruediv__(self, other):
        return Interval.of(other) / self

    # -- transcendental -----------------------------------------------------

    def exp(self) -> "Interval":
        return Interval(max(0.0, _down(math.exp(self.lo), 3)), _up(math.exp(self.hi), 3))

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise ValueError(f"log needs a positive interval, got {self}")
        return Interval(_down(math.log(self.lo), 3), _up(math.log(self.hi), 3))

    def power(self, base) -> "Interval":
        """base ** self for a positive base, via exp(self * log(base))."""
        b = Interval.of(base)
        return (self * b.log()).exp()

    # -- serialization ------------------------------------------------------

    def to_hex(self) -> str:
        return f"{self.lo.hex()} {self.hi.hex()}"

    @classmethod
    def from_hex(cls, text: str) -> "Interval":
        lo, hi = text.split()
        return cls(float.fromhex(lo), float.fromhex(hi))

    def __str__(self):
        return f"[{self.lo:.17g}, {self.hi:.17g}]"
