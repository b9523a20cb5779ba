"""Exact hitting-mass recursions on truncated state spaces, the initial-mass
construction for primitive sets of large numbers, LYM masses, flow divergence,
and the cut-capacity inequality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import antichains as ac
from . import chains as ch
from . import kernels as kn
from . import sieve as sv
from . import weights as wt

__all__ = [
    "MassVector",
    "erdos_sum",
    "hitting_down",
    "hitting_up",
    "mass_1196",
    "bound_1196",
    "lym_masses",
    "cut_capacity",
    "flow_divergence",
]


@dataclass
class MassVector:
    """Sparse nonnegative mass on [1, domain_limit]."""

    domain_limit: int
    values: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for n, v in self.values.items():
            if not 1 <= n <= self.domain_limit:
                raise ValueError(f"mass key {n} outside [1, {self.domain_limit}]")
            if v < 0:
                raise ValueError(f"negative mass {v} at {n}")

    @classmethod
    def unit(cls, n0: int, X: int) -> "MassVector":
        return cls(domain_limit=X, values={n0: 1.0})

    def __getitem__(self, n: int) -> float:
        return self.values.get(n, 0.0)

    def total(self) -> float:
        return float(sum(self.values.values()))

    def items(self):
        return self.values.items()

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.domain_limit + 1)
        for n, v in self.values.items():
            arr[n] = v
        return arr


def _weight_array(w: wt.WeightId, X: int, table: sv.FactorTable,
                  space=None) -> np.ndarray:
    """Dense weight values on [1, X]; nan where the weight is undefined."""
    n = np.arange(X + 1, dtype=np.float64)
    if w.kind is wt.WeightKind.NU0:
        out = np.full(X + 1, np.nan)
        out[2:] = 1.0 / (n[2:] * np.log(n[2:]))
        return out
    if w.kind is wt.WeightKind.NU_SHIFTED:
        out = np.full(X + 1, np.nan)
        out[1:] = 1.0 / (n[1:] * np.log(w.shift_prime * n[1:]))
        return out
    if w.kind is wt.WeightKind.NU_LAMBDA:
        out = np.full(X + 1, np.nan)
        out[1] = 1.0
        members = np.arange(2, X + 1)
        if space is not None:
            members = members[[space(int(m)) for m in members]]
        if len(members):
            out[members] = wt.nu_lambda_batch(members)
        return out
    out = np.full(X + 1, np.nan)
    for m in range(1, X + 1):
        if space is None or space(m):
            out[m] = wt.nu_mertens_value(m, table)
    return out


def erdos_sum(A, w: wt.WeightId, table: sv.FactorTable | None = None) -> float:
    """Sum of the weight over a finite set of integers >= 2."""
    arr = np.asarray(sorted(A), dtype=np.int64)
    if len(arr) == 0:
        return 0.0
    if arr[0] < 2:
        raise ValueError("erdos_sum is defined for sets of integers >= 2")
    if w.kind is wt.WeightKind.NU0:
        af = arr.astype(np.float64)
        return float(np.sum(1.0 / (af * np.log(af))))
    if w.kind is wt.WeightKind.NU_SHIFTED:
        af = arr.astype(np.float64)
        return float(np.sum(1.0 / (af * np.log(w.shift_prime * af))))
    if w.kind is wt.WeightKind.NU_LAMBDA:
        return float(np.sum(wt.nu_lambda_batch(arr)))
    return float(sum(wt.nu_mertens_value(int(a), table) for a in arr))


def hitting_down(c: ch.ChainId, b: MassVector, X: int, table: sv.FactorTable,
                 include_absorbing: bool = True) -> MassVector:
    """Total mass transported through each state by the downward chain.

    One pass from X down to 1.  Every parent of a state in [1, X] also lies in
    [1, X], so the recursion is exact up to float rounding.
    """
    if X > table.limit:
        raise ValueError("X exceeds the factor table limit")
    for n, v in b.items():
        if v > 0 and (n > X or not ch.in_state_space(c, n, table)):
            raise ValueError(f"initial mass at {n} lies outside the state space")
    acc = np.zeros(X + 1)
    for n, v in b.items():
        acc[n] += v
    out: dict[int, float] = {}
    for n in range(X, 0, -1):
        if acc[n] == 0.0:
            continue
        if not ch.in_state_space(c, n, table):
            continue
        h = acc[n]
        if ch.is_absorbing(c, n, table):
            if include_absorbing:
                out[n] = h
            continue
        out[n] = h
        for m, pr in ch.transitions_down(c, n, table).entries:
            acc[m] += h * pr
    return MassVector(domain_limit=X, values=out)


def hitting_up(c: ch.ChainId, w: wt.WeightId, b: MassVector, X: int,
               table: sv.FactorTable,
               cfg: kn.KernelConfig = kn.DEFAULT_KERNELS) -> MassVector:
    """Upward hitting mass under the adjoint chain of c with weight w.

    One pass from 1 up to X.  The upward parents of n are its divisors, so no
    truncation is involved; the adjoint transition into n from n/q is
    nu(n) P(n -> n/q) / nu(n/q) by detailed balance.
    """
    if X > table.limit:
        raise ValueError("X exceeds the factor table limit")
    space = lambda m: ch.in_state_space(c, m, table)
    for n, v in b.items():
        if v > 0 and (n > X or not space(n)):
            raise ValueError(f"initial mass at {n} lies outside the state space")
    nu = _weight_array(w, X, table, space=space)
    h = np.zeros(X + 1)
    out: dict[int, float] = {}
    for n in range(1, X + 1):
        if not space(n):
            continue
        val = b[n]
        if not ch.is_absorbing(c, n, table):
            for d, pr in ch.transitions_down(c, n, table).entries:
                if d >= 1 and h[d] != 0.0 and space(d):
                    val += h[d] * nu[n] * pr / nu[d]
        h[n] = val
        if val != 0.0:
            out[n] = val
    return MassVector(domain_limit=X, values=out)


def mass_1196(x: int, X: int, table: sv.FactorTable) -> MassVector:
    """Initial mass whose downward von Mangoldt hitting mass reproduces the
    doubly harmonic weight on [x, X].

    b(n) = nu0(n) - sum_{2 <= q <= X/n} nu0(nq) Lambda(q)/log(nq) on [x, X].
    Nonnegative by the non-asymptotic Mangoldt-sum estimate; values below
    -1e-12 indicate an internal error.
    """
    if not 2 <= x <= X <= table.limit:
        raise ValueError("need 2 <= x <= X <= table limit")
    n = np.arange(X + 1, dtype=np.float64)
    b = np.zeros(X + 1)
    b[x:] = 1.0 / (n[x:] * np.log(n[x:]))
    q, lam, _ = sv.prime_powers(table, X // x)
    for qi, li in zip(q.tolist(), lam.tolist()):
        hi = X // qi
        if hi < x:
            continue
        ns = n[x : hi + 1]
        b[x : hi + 1] -= li / (ns * qi * np.log(ns * qi) ** 2)
    bad = b[x:] < -1e-12
    if bad.any():
        worst = int(np.argmax(bad)) + x
        raise ArithmeticError(f"mass went negative at n={worst}: {b[worst]:.3e}")
    np.clip(b, 0.0, None, out=b)
    values = {int(i): float(b[i]) for i in range(x, X + 1) if b[i] > 0.0}
    return MassVector(domain_limit=X, values=values)


def bound_1196(x: int, X: int, table: sv.FactorTable) -> float:
    """Certified upper bound for the Erdos sum of any primitive set in [x, X]:

        sum_{x <= r <= X} (1/(r log^2 r)) * sum_{q | r, r/q < x} Lambda(q).
    """
    if not 2 <= x <= X <= table.limit:
        raise ValueError("need 2 <= x <= X <= table limit")
    q, lam, _ = sv.prime_powers(table, X)
    total = 0.0
    for qi, li in zip(q.tolist(), lam.tolist()):
        n_lo = max(1, -(-x // qi))  # ceil(x/qi)
        n_hi = min(x - 1, X // qi)
        if n_lo > n_hi:
            continue
        ns = np.arange(n_lo, n_hi + 1, dtype=np.float64)
        r = ns * qi
        total += float(li * np.sum(1.0 / (r * np.log(r) ** 2)))
    return total


def lym_masses(n0: int, table: sv.FactorTable) -> dict[int, Fraction]:
    """Exact rational hitting masses under the random-prime chain started at a
    squarefree n0; h(d) = 1 / binom(N, omega(d)) for every divisor d."""
    big, small, vp, _ = sv.factor_stats(n0, table)
    if big != small:
        raise ValueError(f"{n0} is not squarefree")
    if small > 12:
        raise ValueError("more than 12 prime factors")
    divs = sv.divisors(n0, table)
    omega = {d: sv.factor_stats(d, table)[1] if d > 1 else 0 for d in divs}
    h = {d: Fraction(0) for d in divs}
    h[n0] = Fraction(1)
    for d in sorted(divs, key=lambda d: -omega[d]):
        if omega[d] == 0:
            continue
        share = h[d] / omega[d]
        m = d
        while m > 1:
            p = int(table.spf[m])
            h[d // p] += share
            while m % p == 0:
                m //= p
    return h


def cut_capacity(c: ch.ChainId, w: wt.WeightId, S, A, table: sv.FactorTable,
                 cfg: kn.KernelConfig = kn.DEFAULT_KERNELS):
    """Both sides of the cut-capacity inequality for a sub-invariant weight:
    antichain mass inside S on the left, weighted outflow across the boundary
    of S on the right."""
    S = set(int(s) for s in S)
    for s in S:
        if not ch.in_state_space(c, s, table) or ch.is_absorbing(c, s, table):
            raise ValueError(f"S must avoid absorbing states; offending state {s}")
    A_set = set(int(a) for a in A)
    if not ac.is_primitive(A_set):
        raise ValueError("A is not primitive")
    lhs = sum(wt.evaluate(w, n, table) for n in A_set & S)
    rhs = 0.0
    for n in S:
        out = sum(pr for m, pr in ch.transitions_down(c, n, table).entries
                  if m not in S)
        if out:
            rhs += wt.evaluate(w, n, table) * out
    return lhs, rhs


def flow_divergence(n: int, trunc_Q: int, table: sv.FactorTable,
                    cfg: kn.KernelConfig = kn.DEFAULT_KERNELS):
    """Net flow at n of the weighted von Mangoldt network.

    Outflow is exactly 1/(n log n); inflow is bracketed by the truncated sum
    over parent multipliers plus the certified tail.
    """
    if n < 2:
        raise ValueError("divergence needs n >= 2")
    outflow = 1.0 / (n * math.log(n))
    q, lam, _ = sv.prime_powers(table, trunc_Q)
    qf = q.astype(np.float64)
    direct = float(np.sum(lam / (n * qf * np.log(n * qf) ** 2)))
    tail = kn.lambda_tail_upper(n, trunc_Q) / n
    return (direct, direct + tail), outflow
