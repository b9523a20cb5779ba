"""Sieve-backed integer arithmetic: factorization tables, von Mangoldt values,
divisor enumeration, and Mertens-type partial sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FactorTable",
    "PrimeTable",
    "build_sieve",
    "build_prime_table",
    "mangoldt",
    "factor_stats",
    "divisors",
    "mertens_sums",
    "prime_powers",
    "psi",
]


@dataclass
class FactorTable:
    """Smallest-prime-factor table for [2, limit] plus the sorted prime list.

    spf[n] == n exactly when n is prime; every arithmetic query below reduces
    to repeated division by spf entries, so the table is the only sieve pass.
    Immutable after construction; all queries are read-only.
    """

    limit: int
    spf: np.ndarray
    primes: np.ndarray
    _pp_cache: tuple | None = field(default=None, repr=False, compare=False)
    _mertens_cache: dict | None = field(default=None, repr=False, compare=False)
    _omega_cache: np.ndarray | None = field(default=None, repr=False, compare=False)

    def check_range(self, n: int, lo: int = 2) -> None:
        if not lo <= n <= self.limit:
            raise ValueError(f"n={n} outside table range [{lo}, {self.limit}]")


def build_sieve(X: int) -> FactorTable:
    """Sieve smallest prime factors for all n in [2, X]."""
    if X < 2:
        raise ValueError(f"sieve limit must be >= 2, got {X}")
    dtype = np.int32 if X < 2**31 else np.int64
    spf = np.arange(X + 1, dtype=dtype)
    for p in range(2, math.isqrt(X) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            block[block == np.arange(p * p, X + 1, p, dtype=dtype)] = p
    primes = np.flatnonzero(spf[2:] == np.arange(2, X + 1, dtype=dtype)).astype(np.int64) + 2
    return FactorTable(limit=X, spf=spf, primes=primes)


@dataclass
class PrimeTable:
    """Primes up to `limit` with cumulative log-prime sums (Chebyshev theta).

    Lighter than FactorTable at 1e8 scale: no per-integer spf array.  theta_err
    bounds the accumulated float rounding of the cumulative sum, so
    theta(x) is certified to lie in [theta_cum[i] - theta_err, theta_cum[i] + theta_err].
    """

    limit: int
    primes: np.ndarray
    theta_cum: np.ndarray
    theta_err: float

    def theta(self, x: float) -> float:
        i = np.searchsorted(self.primes, x, side="right") - 1
        return float(self.theta_cum[i]) if i >= 0 else 0.0


def primes_up_to(X: int) -> np.ndarray:
    """Plain boolean Eratosthenes; returns the primes <= X as int64."""
    if X < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(X + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(X) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def build_prime_table(X: int) -> PrimeTable:
    if X < 2:
        raise ValueError(f"prime table limit must be >= 2, got {X}")
    primes = primes_up_to(X)
    logs = np.log(primes.astype(np.float64))
    theta_cum = np.cumsum(logs)
    # sequential-sum rounding envelope: |fl(sum) - sum| <= n*eps*sum for positive terms
    theta_err = len(primes) * np.finfo(np.float64).eps * float(theta_cum[-1]) if len(primes) else 0.0
    return PrimeTable(limit=X, primes=primes, theta_cum=theta_cum, theta_err=theta_err)


def mangoldt(n: int, table: FactorTable) -> float:
    """Von Mangoldt value: log p if n is a power of the prime p, else 0."""
    table.check_range(n)
    p = int(table.spf[n])
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def factor_stats(n: int, table: FactorTable):
    """Return (big_omega, small_omega, {p: v_p(n)}, largest_prime) for n."""
    table.check_range(n)
    vp: dict[int, int] = {}
    m = n
    largest = 1
    while m > 1:
        p = int(table.spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        vp[p] = e
        largest = max(largest, p)
    return sum(vp.values()), len(vp), vp, largest


def divisors(n: int, table: FactorTable) -> list[int]:
    """All divisors of n in ascending order."""
    table.check_range(n, lo=1)
    if n == 1:
        return [1]
    _, _, vp, _ = factor_stats(n, table)
    divs = [1]
    for p, e in vp.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    divs.sort()
    return divs


def mertens_sums(x: int, table: FactorTable):
    """Partial prime sums up to x: (sum log p/p, sum 1/p, prod (1 - 1/p))."""
    table.check_range(x)
    ps = table.primes[table.primes <= x].astype(np.float64)
    sum_logp = float(np.sum(np.log(ps) / ps))
    sum_recip = float(np.sum(1.0 / ps))
    euler_product = float(np.prod(1.0 - 1.0 / ps)) if len(ps) < 10**5 else float(
        np.exp(np.sum(np.log1p(-1.0 / ps)))
    )
    return sum_logp, sum_recip, euler_product


def prime_powers(table: FactorTable, limit: int | None = None):
    """Sorted prime powers q <= limit with their Lambda values and base primes.

    Returns (q, lam, base) as int64/float64/int64 arrays.  Cached on the table
    for the full range; sliced per call.
    """
    if table._pp_cache is None:
        X = table.limit
        qs = [table.primes]
        ls = [np.log(table.primes.astype(np.float64))]
        bs = [table.primes]
        k = 2
        while True:
            mask = table.primes <= int(X ** (1.0 / k)) + 1
            pk = table.primes[mask] ** k
            keep = pk <= X
            if not keep.any():
                break
            qs.append(pk[keep])
            ls.append(np.log(table.primes[mask][keep].astype(np.float64)))
            bs.append(table.primes[mask][keep])
            k += 1
        q = np.concatenate(qs)
        lam = np.concatenate(ls)
        base = np.concatenate(bs)
        order = np.argsort(q, kind="stable")
        table._pp_cache = (q[order], lam[order], base[order])
    q, lam, base = table._pp_cache
    if limit is None or limit >= table.limit:
        return q, lam, base
    i = np.searchsorted(q, limit, side="right")
    return q[:i], lam[:i], base[:i]


def psi(x: int, table: FactorTable) -> float:
    """Chebyshev psi: sum of Lambda(q) over prime powers q <= x."""
    table.check_range(x)
    _, lam, _ = prime_powers(table, x)
    return float(np.sum(lam))


def mangoldt_divisor_sums(table: FactorTable) -> np.ndarray:
    """Array S with S[n] = sum of Lambda(q) over divisors q of n, for n <= limit.

    One slice-add per prime power; identical cost profile to the sieve itself.
    """
    X = table.limit
    out = np.zeros(X + 1, dtype=np.float64)
    q, lam, _ = prime_powers(table)
    for qi, li in zip(q.tolist(), lam.tolist()):
        out[qi::qi] += li
    return out


def big_omega_array(table: FactorTable) -> np.ndarray:
    """Omega(n) (prime factors with multiplicity) for all n <= limit, cached."""
    if table._omega_cache is None:
        X = table.limit
        om = np.zeros(X + 1, dtype=np.int16)
        q, _, _ = prime_powers(table)
        for qi in q.tolist():
            om[qi::qi] += 1
        table._omega_cache = om
    return table._omega_cache
