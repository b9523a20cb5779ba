"""Downward Markov chains on the divisibility poset, sub-invariance margins
for the weight families, and the adjoint upward chains.

Five downward chains are supported:

  random_prime     divide out a uniformly random prime of n
  mertens          deterministically divide out the largest prime factor
  von_mangoldt     divide out q | n with probability Lambda(q)/log n
  eps_modified     von Mangoldt law with the prime-power fix that makes the
                   primes absorbing (the q = p^(k-1) transition weight is
                   doubled to 2/k, the q = p^k jump to 1 removed)
  odd_banks_martin divide out a single prime p with weight v_p(n) beta_p log p,
                   beta_p = p/(p-2), on integers composed of odd primes from Q
                   with at least k prime factors; exactly k factors absorb
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import kernels as kn
from . import sieve as sv
from . import weights as wt

__all__ = [
    "INFINITY",
    "ChainKind",
    "ChainId",
    "TransitionList",
    "SubinvarianceReport",
    "UnsupportedPairingError",
    "SubinvarianceViolationError",
    "transitions_down",
    "subinvariance_margin",
    "adjoint_transitions",
    "in_state_space",
    "is_absorbing",
]

INFINITY = math.inf


class ChainKind(Enum):
    RANDOM_PRIME = "random_prime"
    MERTENS = "mertens"
    VON_MANGOLDT = "von_mangoldt"
    EPS_MODIFIED = "eps_modified"
    ODD_BANKS_MARTIN = "odd_banks_martin"


class UnsupportedPairingError(ValueError):
    """No certified tail bound is implemented for this chain/weight pair."""


class SubinvarianceViolationError(ArithmeticError):
    """Adjoint residual went negative beyond tolerance: the weight is not
    sub-invariant for the chain."""


@dataclass(frozen=True)
class ChainId:
    kind: ChainKind
    k: int | None = None
    Q: frozenset[int] | None = None

    def __post_init__(self):
        if self.kind is ChainKind.ODD_BANKS_MARTIN:
            if self.k is None or self.k < 1:
                raise ValueError("odd_banks_martin needs k >= 1")
            if not self.Q or any(p == 2 or not wt._is_prime(p) for p in self.Q):
                raise ValueError("odd_banks_martin needs a set of odd primes")
            object.__setattr__(self, "Q", frozenset(self.Q))
        elif self.k is not None or self.Q is not None:
            raise ValueError(f"{self.kind.value} takes no parameters")

    @classmethod
    def random_prime(cls):
        return cls(ChainKind.RANDOM_PRIME)

    @classmethod
    def mertens(cls):
        return cls(ChainKind.MERTENS)

    @classmethod
    def von_mangoldt(cls):
        return cls(ChainKind.VON_MANGOLDT)

    @classmethod
    def eps_modified(cls):
        return cls(ChainKind.EPS_MODIFIED)

    @classmethod
    def odd_banks_martin(cls, k: int, Q):
        return cls(ChainKind.ODD_BANKS_MARTIN, k=k, Q=frozenset(Q))


@dataclass
class TransitionList:
    """Finitely supported one-step law at `source`.

    Downward entries target proper divisors (or the source itself at an
    absorbing state); upward entries target proper multiples, with an optional
    terminal infinity entry.  `truncated` marks rows whose infinity mass also
    absorbs a truncation tail.
    """

    source: int
    entries: list[tuple[float, float]] = field(default_factory=list)
    truncated: bool = False
    trunc_Q: int | None = None

    def prob_sum(self) -> float:
        return sum(p for _, p in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)


def in_state_space(c: ChainId, n: int, table: sv.FactorTable) -> bool:
    if c.kind in (ChainKind.RANDOM_PRIME, ChainKind.MERTENS, ChainKind.VON_MANGOLDT):
        return n >= 1
    if c.kind is ChainKind.EPS_MODIFIED:
        return n >= 2
    if n < 2:
        return False
    big, _, vp, _ = sv.factor_stats(n, table)
    return big >= c.k and all(p in c.Q for p in vp)


def is_absorbing(c: ChainId, n: int, table: sv.FactorTable) -> bool:
    if not in_state_space(c, n, table):
        raise ValueError(f"{n} is not a state of {c.kind.value}")
    if c.kind in (ChainKind.RANDOM_PRIME, ChainKind.MERTENS, ChainKind.VON_MANGOLDT):
        return n == 1
    big = sv.factor_stats(n, table)[0]
    if c.kind is ChainKind.EPS_MODIFIED:
        return big == 1
    return big == c.k


def transitions_down(c: ChainId, n: int, table: sv.FactorTable) -> TransitionList:
    """Exact one-step downward law at n; absorbing states self-loop."""
    if not in_state_space(c, n, table):
        raise ValueError(f"{n} is not a state of {c.kind.value}")
    if is_absorbing(c, n, table):
        return TransitionList(source=n, entries=[(n, 1.0)])
    _, _, vp, largest = sv.factor_stats(n, table)
    logn = math.log(n)

    if c.kind is ChainKind.RANDOM_PRIME:
        w = 1.0 / len(vp)
        return TransitionList(source=n, entries=[(n // p, w) for p in sorted(vp)])

    if c.kind is ChainKind.MERTENS:
        return TransitionList(source=n, entries=[(n // largest, 1.0)])

    if c.kind is ChainKind.EPS_MODIFIED and len(vp) == 1:
        # prime power p^k, k >= 2: drop the jump to 1, double the jump to p
        (p, k), = vp.items()
        entries = [(p ** (k - 1 - j), 1.0 / k) for j in range(k - 1)]
        tgt, pr = entries[-1]
        entries[-1] = (tgt, pr + 1.0 / k)
        return TransitionList(source=n, entries=entries)

    if c.kind in (ChainKind.VON_MANGOLDT, ChainKind.EPS_MODIFIED):
        entries = []
        for p, e in sorted(vp.items()):
            lp = math.log(p)
            q = p
            for _ in range(e):
                entries.append((n // q, lp / logn))
                q *= p
        return TransitionList(source=n, entries=entries)

    # odd Banks-Martin: single-prime steps weighted by v_p(n) beta_p log p,
    # beta_p = p/(p-2) kept rational until the final division
    terms = [(p, e * Fraction(p, p - 2), math.log(p)) for p, e in sorted(vp.items())]
    lam = sum(float(b) * lp for _, b, lp in terms)
    return TransitionList(
        source=n, entries=[(n // p, float(b) * lp / lam) for p, b, lp in terms]
    )


# ---------------------------------------------------------------------------
# Sub-invariance margins.
# ---------------------------------------------------------------------------

@dataclass
class SubinvarianceReport:
    """Bracket for nu(n) - sum over parents nq of nu(nq) P(nq -> n).

    lower <= true margin <= upper; the gap is the certified truncation tail
    plus any quadrature budget.  A nonnegative lower bound certifies
    sub-invariance at n.
    """

    n: int
    lower: float
    upper: float
    truncation_Q: int

    def __post_init__(self):
        if self.lower > self.upper + 1e-15:
            raise ValueError("invalid bracket")


def _eps_prime_extra(p: int) -> float:
    """sum_{k>=2} 1/(k^2 p^k log p): the doubled prime-power inflow at a prime."""
    lp = math.log(p)
    total, k = 0.0, 2
    while True:
        term = 1.0 / (k * k * p**k * lp)
        total += term
        k += 1
        if term < 1e-18 * max(total, 1e-300):
            return total


def _margin_vm_family(c, w, n, trunc_Q, table):
    """Margin bracket for the von Mangoldt / eps chains under nu0 or nu_p."""
    if n < 2:
        raise ValueError("margin needs n >= 2 for this weight")
    q, lam, _ = sv.prime_powers(table, trunc_Q)
    qf = q.astype(np.float64)
    if w.kind is wt.WeightKind.NU0:
        nu_n = 1.0 / (n * math.log(n))
        direct = float(np.sum(lam / (n * qf * np.log(n * qf) ** 2)))
        tail = kn.lambda_tail_upper(n, trunc_Q) / n
    else:
        sp = w.shift_prime
        nu_n = 1.0 / (n * math.log(sp * n))
        direct = float(np.sum(lam / (n * qf * np.log(n * qf) * np.log(sp * n * qf))))
        tail = kn.shifted_lambda_tail_upper(n, sp, trunc_Q) / n
    if c.kind is ChainKind.EPS_MODIFIED and sv.factor_stats(n, table)[0] == 1:
        direct += _eps_prime_extra(n)  # full series, not truncated
    return SubinvarianceReport(n=n, lower=nu_n - direct - tail,
                               upper=nu_n - direct, truncation_Q=trunc_Q)


def _margin_vm_nu_lambda(w, n, trunc_Q, table):
    if n == 1:
        nu_n, e_n = 1.0, 0.0
    else:
        nu_n, e_n = wt.nu_lambda_quadrature(n, w.quad_tol)
    q, lam, _ = sv.prime_powers(table, trunc_Q)
    direct, quad_err = 0.0, e_n
    for qi, li in zip(q.tolist(), lam.tolist()):
        v, e = wt.nu_lambda_quadrature(n * qi, w.quad_tol)
        direct += v * li / math.log(n * qi)
        quad_err += e
    tail = kn.lambda_tail_upper(n, trunc_Q) / n  # nu_lambda <= nu0 pointwise
    return SubinvarianceReport(n=n, lower=nu_n - direct - tail - quad_err,
                               upper=nu_n - direct + quad_err, truncation_Q=trunc_Q)


def _margin_mertens(w, n, trunc_Q, table):
    # parents are n*p for primes p >= P(n); the telescoping product gives the
    # truncated sum an exact remainder, so the bracket is float-width only
    nu_n = wt.evaluate(w, n, table)
    largest = 1 if n == 1 else sv.factor_stats(n, table)[3]
    ps = table.primes[(table.primes >= largest) & (table.primes <= trunc_Q)]
    prefix = wt._mertens_prefix(table)
    j0 = int(np.searchsorted(table.primes, largest))
    j1 = j0 + len(ps)
    egamma = math.exp(wt.EULER_GAMMA)
    direct = float(np.sum(egamma / (n * ps.astype(np.float64)) * prefix[j0:j1]))
    remainder = egamma / n * float(prefix[j1])
    est = nu_n - direct - remainder
    slack = 1e-12 * (nu_n + direct + remainder)
    return SubinvarianceReport(n=n, lower=est - slack, upper=est + slack,
                               truncation_Q=trunc_Q)


def _margin_obm(c, n, trunc_Q, table):
    # Q is finite, so the parent sum is exact; no tail term at all
    if n < 2:
        raise ValueError("nu0 margin needs n >= 2")
    nu_n = 1.0 / (n * math.log(n))
    _, _, vp, _ = sv.factor_stats(n, table)
    lam = sum(e * (p / (p - 2)) * math.log(p) for p, e in vp.items())
    direct = 0.0
    for p in sorted(c.Q):
        beta = p / (p - 2)
        direct += (1.0 / (n * p * math.log(n * p))) * (
            (vp.get(p, 0) + 1) * beta * math.log(p) / (lam + beta * math.log(p))
        )
    est = nu_n - direct
    slack = 1e-13 * (nu_n + direct)
    return SubinvarianceReport(n=n, lower=est - slack, upper=est + slack,
                               truncation_Q=trunc_Q)


def subinvariance_margin(c: ChainId, w: wt.WeightId, n: int, trunc_Q: int,
                         table: sv.FactorTable,
                         cfg: kn.KernelConfig = kn.DEFAULT_KERNELS) -> SubinvarianceReport:
    """Bracket the sub-invariance margin of weight w for chain c at state n.

    The parent sum over multipliers q <= trunc_Q is evaluated directly; the
    infinite remainder is covered by the partial-summation tail bounds from
    the kernels module (or is exactly zero for finite-support chains).
    """
    if trunc_Q < 2:
        raise ValueError("trunc_Q must be >= 2")
    if trunc_Q > table.limit:
        raise ValueError("trunc_Q exceeds the factor table limit")
    if not in_state_space(c, n, table):
        raise ValueError(f"{n} is not a state of {c.kind.value}")

    if c.kind is ChainKind.VON_MANGOLDT:
        if w.kind in (wt.WeightKind.NU0, wt.WeightKind.NU_SHIFTED):
            return _margin_vm_family(c, w, n, trunc_Q, table)
        if w.kind is wt.WeightKind.NU_LAMBDA:
            return _margin_vm_nu_lambda(w, n, trunc_Q, table)
    if c.kind is ChainKind.EPS_MODIFIED and w.kind is wt.WeightKind.NU0:
        return _margin_vm_family(c, w, n, trunc_Q, table)
    if c.kind is ChainKind.MERTENS and w.kind is wt.WeightKind.NU_MERTENS:
        return _margin_mertens(w, n, trunc_Q, table)
    if c.kind is ChainKind.ODD_BANKS_MARTIN and w.kind is wt.WeightKind.NU0:
        return _margin_obm(c, n, trunc_Q, table)
    raise UnsupportedPairingError(
        f"no certified margin for chain {c.kind.value} with weight {w.kind.value}"
    )


def adjoint_transitions(c: ChainId, w: wt.WeightId, n: int, trunc_Q: int,
                        table: sv.FactorTable,
                        cfg: kn.KernelConfig = kn.DEFAULT_KERNELS,
                        residual_tol: float = 1e-8) -> TransitionList:
    """Upward law at n adjoint to chain c under weight w, truncated at
    multipliers q <= trunc_Q.

    Entries are (nq, nu(nq) P(nq -> n) / nu(n)); the remaining probability is
    assigned to the infinity state.  That residual merges the chain's true
    escape-to-infinity mass with the truncation tail, keeping the row sum at
    exactly one; `truncated` flags the merge.  A residual below -residual_tol
    signals a non-sub-invariant pairing and raises.
    """
    if not in_state_space(c, n, table):
        raise ValueError(f"{n} is not a state of {c.kind.value}")
    nu_n = wt.evaluate(w, n, table)
    entries = []
    total = 0.0
    for m in _upward_parents(c, n, trunc_Q, table):
        p_down = transitions_down(c, m, table).as_dict().get(n, 0.0)
        if p_down <= 0.0:
            continue
        pr = wt.evaluate(w, m, table) * p_down / nu_n
        entries.append((m, pr))
        total += pr
    residual = 1.0 - total
    if residual < -residual_tol:
        raise SubinvarianceViolationError(
            f"upward row at {n} sums to {total:.12f} > 1: "
            f"{w.kind.value} is not sub-invariant for {c.kind.value}"
        )
    entries.append((INFINITY, max(residual, 0.0)))
    return TransitionList(source=n, entries=entries, truncated=True, trunc_Q=trunc_Q)


def _upward_parents(c: ChainId, n: int, trunc_Q: int, table: sv.FactorTable):
    """States m = nq, q <= trunc_Q, that can step down to n."""
    if c.kind is ChainKind.ODD_BANKS_MARTIN:
        for p in sorted(c.Q):
            if p <= trunc_Q and n * p <= table.limit:
                yield n * p
        return
    if c.kind is ChainKind.MERTENS:
        largest = 1 if n == 1 else sv.factor_stats(n, table)[3]
        for p in table.primes[(table.primes >= largest) & (table.primes <= trunc_Q)].tolist():
            if n * p <= table.limit:
                yield n * p
        return
    if c.kind is ChainKind.RANDOM_PRIME:
        for p in table.primes[table.primes <= trunc_Q].tolist():
            if n * p <= table.limit:
                yield n * p
        return
    # von Mangoldt / eps: parents over prime-power multipliers
    q, _, _ = sv.prime_powers(table, trunc_Q)
    for qi in q.tolist():
        if n * qi <= table.limit:
            yield n * qi
