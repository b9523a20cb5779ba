"""Primitive sets (antichains of the divisibility poset): validation,
layer generation, restriction, random fuzz instances, and peeling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sieve as sv

__all__ = [
    "PrimitiveSet",
    "is_primitive",
    "generate_layer",
    "restrict_Q",
    "random_antichain",
    "peel_layers",
    "read_int_set",
    "write_int_set",
]


@dataclass(frozen=True)
class PrimitiveSet:
    """Sorted set of integers >= 2; `certified` means primitivity was checked."""

    elements: tuple[int, ...]
    certified: bool = False

    def __post_init__(self):
        elems = tuple(sorted(set(int(e) for e in self.elements)))
        if elems and elems[0] < 2:
            raise ValueError("elements must be >= 2 (the singleton {1} is excluded)")
        object.__setattr__(self, "elements", elems)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, n):
        return n in set(self.elements)

    @classmethod
    def certify(cls, elements) -> "PrimitiveSet":
        ps = cls(tuple(elements))
        if not is_primitive(set(ps.elements)):
            raise ValueError("set is not primitive")
        return cls(ps.elements, certified=True)


def is_primitive(A) -> bool:
    """True iff no element of A divides another distinct element.

    Dense instances are checked with a marked-multiples sieve over
    [2, max(A)]; sparse sets with a large maximum fall back to pairwise
    divisibility tests.
    """
    A = sorted(set(int(a) for a in A))
    if not A:
        return True
    if A[0] < 2:
        raise ValueError("primitive sets consist of integers >= 2")
    top = A[-1]
    if top > 10**6 and len(A) ** 2 < top:
        for i, a in enumerate(A):
            for b in A[i + 1 :]:
                if b % a == 0:
                    return False
        return True
    marked = np.zeros(top + 1, dtype=bool)
    marked[A] = True
    for a in A:
        for m in range(2 * a, top + 1, a):
            if marked[m]:
                return False
    return True


def generate_layer(k: int, X: int, Q=None,
                   table: sv.FactorTable | None = None) -> PrimitiveSet:
    """Integers n <= X with exactly k prime factors counted with multiplicity,
    restricted to prime factors in Q when given.  k = 0 yields the empty set
    (the poset here starts at 2)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if table is None or table.limit < X:
        table = sv.build_sieve(max(X, 2))
    if k == 0 or X < 2:
        return PrimitiveSet((), certified=True)
    om = sv.big_omega_array(table)[: X + 1]
    members = np.flatnonzero(om == k)
    members = members[members >= 2]
    if Q is not None:
        Qs = frozenset(int(p) for p in Q)
        keep = []
        for n in members.tolist():
            _, _, vp, _ = sv.factor_stats(int(n), table)
            if all(p in Qs for p in vp):
                keep.append(int(n))
        members = keep
    return PrimitiveSet(tuple(int(m) for m in members), certified=True)


def restrict_Q(A: PrimitiveSet, Q, table: sv.FactorTable) -> PrimitiveSet:
    """Members of A whose prime factors all lie in Q; stays primitive."""
    Qs = frozenset(int(p) for p in Q)
    keep = []
    for n in A:
        _, _, vp, _ = sv.factor_stats(n, table)
        if all(p in Qs for p in vp):
            keep.append(n)
    return PrimitiveSet(tuple(keep), certified=A.certified)


def random_antichain(X: int, density: float = 1.0, seed: int = 0,
                     table: sv.FactorTable | None = None) -> PrimitiveSet:
    """Greedy random primitive set in [2, X], deterministic in (X, density, seed).

    Visit [2, X] in a seeded random order, keep each candidate with
    probability `density`, and admit it unless an already admitted element
    divides it or is divisible by it.  With density 1 the result is a maximal
    antichain.
    """
    if X < 4:
        raise ValueError("need X >= 4")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if table is None or table.limit < X:
        table = sv.build_sieve(X)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, X))))
    order = rng.permutation(np.arange(2, X + 1))
    admitted = np.zeros(X + 1, dtype=bool)
    for n in order.tolist():
        if density < 1.0 and rng.random() >= density:
            continue
        if admitted[sv.divisors(n, table)[:-1]].any():
            continue
        if admitted[2 * n :: n].any():
            continue
        admitted[n] = True
    return PrimitiveSet(tuple(int(i) for i in np.flatnonzero(admitted)), certified=True)


def peel_layers(A, table: sv.FactorTable) -> list[PrimitiveSet]:
    """Partition A into its minimal-element layers under divisibility.

    Layer i holds the minimal elements of what remains after removing layers
    1..i-1; the number of layers equals the longest divisibility chain in A.
    """
    remaining = set(int(a) for a in A)
    if any(a < 2 for a in remaining):
        raise ValueError("peeling is defined for sets of integers >= 2")
    layers = []
    while remaining:
        minimal = {
            a for a in remaining
            if not any(d in remaining for d in sv.divisors(a, table)[:-1])
        }
        layers.append(PrimitiveSet(tuple(minimal), certified=True))
        remaining -= minimal
    return layers


def read_int_set(path: str) -> list[int]:
    """Newline-delimited decimal integers; blank lines ignored."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(int(line))
    return out


def write_int_set(path: str, values) -> None:
    with open(path, "w") as fh:
        for v in sorted(values):
            fh.write(f"{v}\n")
