"""Monte Carlo machinery: chain path sampling, hitting estimates, the
per-prime-geometric zeta process with its exponential-clock coupling, the
multiplicative simple random walk, and doubly-logarithmic density statistics.

Reproducibility contract: every sampler derives its randomness from
counter-based Philox streams keyed by (seed, logical stream index), so results
are bit-identical for a fixed (seed, trials, stream layout) regardless of
scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import chains as ch
from . import kernels as kn
from . import sieve as sv
from . import weights as wt

__all__ = [
    "ChainPath",
    "DensityStats",
    "ZetaProcessConfig",
    "HitEstimate",
    "sample_down",
    "sample_up",
    "estimate_hit",
    "zeta_process_sample",
    "zeta_process_draws",
    "zeta_process_hitting",
    "msrw_transitions",
    "chain_density_stats",
    "poisson_lym_statistic",
]

N_STREAMS = 16  # fixed logical stream layout; estimates never depend on threads


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *stream))))


def _bernoulli_positions(rng: np.random.Generator, n: int, x: float) -> np.ndarray:
    """Indices of an iid Bernoulli(x) process on [0, n)."""
    if x <= 1e-9:
        # geometric gaps overflow int64 at this scale; draw the count and
        # place it uniformly instead (same joint law)
        k = int(rng.binomial(n, x))
        if k == 0:
            return np.empty(0, dtype=np.int64)
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.update(rng.integers(0, n, size=k - len(chosen)).tolist())
        return np.array(sorted(chosen), dtype=np.int64)
    parts = []
    base = 0
    while base < n:
        est = max(int((n - base) * x * 1.2) + 16, 16)
        gaps = rng.geometric(x, size=est)
        pos = base + np.cumsum(gaps) - 1
        inside = pos[pos < n]
        parts.append(inside)
        if len(inside) < len(pos):
            break
        base = int(pos[-1]) + 1
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


@dataclass
class ChainPath:
    """Realized divisibility chain; downward paths end at an absorbing state,
    upward paths end at the cap or the infinity marker."""

    states: list[int]
    seed: int
    reached_infinity: bool = False


@dataclass
class HitEstimate:
    estimator: str
    params: dict
    p_hat: float
    stderr: float
    bias_bound: float
    seed: int

    def to_record(self) -> dict:
        rec = {"estimator": self.estimator, "p_hat": self.p_hat,
               "stderr": self.stderr, "bias_bound": self.bias_bound,
               "seed": self.seed}
        rec.update({f"param_{k}": v for k, v in self.params.items()})
        return rec


class _DownSampler:
    """Cached (targets, cumulative probs) per state for fast repeated walks."""

    def __init__(self, c: ch.ChainId, table: sv.FactorTable):
        self.c = c
        self.table = table
        self.cache: dict[int, tuple] = {}

    def step(self, n: int, rng: np.random.Generator) -> int:
        row = self.cache.get(n)
        if row is None:
            tl = ch.transitions_down(self.c, n, self.table)
            targets = np.array([m for m, _ in tl.entries], dtype=np.int64)
            cum = np.cumsum([p for _, p in tl.entries])
            row = (targets, cum)
            self.cache[n] = row
        targets, cum = row
        if len(targets) == 1:
            return int(targets[0])
        u = rng.random() * cum[-1]
        i = min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)
        return int(targets[i])


def sample_down(c: ch.ChainId, n0: int, seed: int, table: sv.FactorTable) -> ChainPath:
    """One downward path from n0, run until an absorbing state."""
    sampler = _DownSampler(c, table)
    rng = _rng(seed, 0)
    states = [n0]
    n = n0
    while not ch.is_absorbing(c, n, table):
        n = sampler.step(n, rng)
        states.append(n)
    return ChainPath(states=states, seed=seed)


def sample_up(c: ch.ChainId, w: wt.WeightId, n0: int, seed: int,
              table: sv.FactorTable, cap: int | None = None) -> ChainPath:
    """One upward path from n0 under the adjoint of c with weight w.

    The adjoint support at n is truncated at multipliers q <= cap/n; the
    truncation tail rides on the terminal infinity mass, so a path that draws
    it ends flagged rather than silently stopping.
    """
    cap = cap or table.limit
    rng = _rng(seed, 0)
    states = [n0]
    n = n0
    while True:
        tl = ch.adjoint_transitions(c, w, n, max(2, cap // n), table)
        targets = [m for m, _ in tl.entries]
        cum = np.cumsum([p for _, p in tl.entries])
        u = rng.random() * cum[-1]
        i = min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)
        m = targets[i]
        if m == ch.INFINITY:
            return ChainPath(states=states, seed=seed, reached_infinity=True)
        states.append(int(m))
        n = int(m)
        if n > cap:
            return ChainPath(states=states, seed=seed)


def estimate_hit(c: ch.ChainId, n0: int, target, trials: int, seed: int,
                 table: sv.FactorTable) -> HitEstimate:
    """Fraction of downward paths from n0 that visit the target set."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    target = set(int(t) for t in target)
    sampler = _DownSampler(c, table)
    hits = 0
    per = [trials // N_STREAMS + (1 if s < trials % N_STREAMS else 0)
           for s in range(N_STREAMS)]
    for s, cnt in enumerate(per):
        rng = _rng(seed, s)
        for _ in range(cnt):
            n = n0
            if n in target:
                hits += 1
                continue
            while not ch.is_absorbing(c, n, table):
                n = sampler.step(n, rng)
                if n in target:
                    hits += 1
                    break
    p_hat = hits / trials
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 1.0 / trials) / trials)
    return HitEstimate("hit_down", {"chain": c.kind.value, "n0": n0,
                                    "trials": trials}, p_hat, stderr, 0.0, seed)


# ---------------------------------------------------------------------------
# Zeta process.
# ---------------------------------------------------------------------------

@dataclass
class ZetaProcessConfig:
    """Truncated zeta-process parameters.

    bias_bound dominates the total-variation distance between the truncated
    draw (primes <= P_max only) and the full zeta distribution at s: exactly
    the probability that a full draw has a prime factor beyond P_max.
    """

    s: float
    P_max: int = 10**4
    bias_bound: float = field(init=False)
    _primes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.s <= 1.0:
            raise ValueError("zeta process needs s > 1")
        self._primes = sv.primes_up_to(self.P_max)
        pf = self._primes.astype(np.float64)
        euler_head = math.exp(float(np.sum(np.log1p(-pf ** -self.s))))
        # P(draw not P_max-smooth) = 1 - 1/(zeta(s) * prod_{p<=P}(1-p^-s))
        self.bias_bound = max(0.0, 1.0 - 1.0 / (kn.zeta(self.s) * euler_head)) + 1e-12


def zeta_process_draws(cfg: ZetaProcessConfig, seed: int, trials: int) -> np.ndarray:
    """Vectorized draws of prod_p p^(e_p) with e_p geometric of success 1-p^-s.

    Products are exact in float64 whenever they stay below 2^53; the small
    values any marginal test queries always are.
    """
    Z = np.ones(trials, dtype=np.float64)
    for i, p in enumerate(cfg._primes.tolist()):
        x = float(p) ** -cfg.s  # P(e >= 1)
        rng = _rng(seed, i)
        if x > 1e-3:
            e = rng.geometric(1.0 - x, size=trials) - 1
            nz = np.flatnonzero(e)
            if len(nz):
                Z[nz] *= float(p) ** e[nz]
        else:
            idx = _bernoulli_positions(rng, trials, x)
            if len(idx):
                e = rng.geometric(1.0 - x, size=len(idx))  # law of e given e >= 1
                Z[idx] *= float(p) ** e
    return Z


def zeta_process_sample(cfg: ZetaProcessConfig, seed: int) -> int:
    """One truncated zeta-distributed integer."""
    return int(zeta_process_draws(cfg, seed, 1)[0])


def zeta_process_hitting(n: int, cfg: ZetaProcessConfig, trials: int,
                         seed: int) -> HitEstimate:
    """Fraction of coupled zeta-process trajectories that visit n.

    Each trial realizes every exponential clock (rate log p) whose running
    minimum stays above 1, reconstructs the jump skeleton of s -> Z_s as s
    decreases toward 1, and checks whether the running product ever equals n.
    Clocks of one prime that share a running minimum fire together (the
    trajectory skips the intermediate power), so events merge per distinct
    minimum.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rem = n
    for p in cfg._primes.tolist():
        while rem % p == 0:
            rem //= p
        if rem == 1:
            break
    if rem != 1:
        raise ValueError(f"{n} has a prime factor beyond P_max={cfg.P_max}")

    ev_t, ev_trial, ev_p, ev_mult = [], [], [], []
    for i, p in enumerate(cfg._primes.tolist()):
        rng = _rng(seed, i)
        idx = _bernoulli_positions(rng, trials, 1.0 / p)
        if not len(idx):
            continue
        # leading run of clocks >= 1, conditioned nonempty; each such clock is
        # 1 + Exp(log p) by memorylessness
        m = rng.geometric(1.0 - 1.0 / p, size=len(idx))
        raw = 1.0 + rng.exponential(1.0 / math.log(p), size=int(m.sum()))
        pos = 0
        for trial, cnt in zip(idx.tolist(), m.tolist()):
            run = np.minimum.accumulate(raw[pos : pos + cnt])
            pos += cnt
            times, mult = np.unique(run, return_counts=True)
            ev_t.append(times)
            ev_mult.append(mult.astype(np.int64))
            ev_trial.append(np.full(len(times), trial, dtype=np.int64))
            ev_p.append(np.full(len(times), p, dtype=np.int64))

    hits = 0
    if ev_t:
        t_all = np.concatenate(ev_t)
        trial_all = np.concatenate(ev_trial)
        p_all = np.concatenate(ev_p)
        mult_all = np.concatenate(ev_mult)
        order = np.lexsort((-t_all, trial_all))
        trial_all = trial_all[order]
        p_all = p_all[order]
        mult_all = mult_all[order]
        i, N = 0, len(trial_all)
        while i < N:
            trial = trial_all[i]
            z = 1
            hit = False
            j = i
            while j < N and trial_all[j] == trial:
                if z < n:
                    z *= int(p_all[j]) ** int(mult_all[j])
                    if z == n:
                        hit = True
                j += 1
            hits += hit
            i = j
    p_hat = hits / trials
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 1.0 / trials) / trials)
    return HitEstimate("zeta_visit", {"n": n, "trials": trials,
                                      "P_max": cfg.P_max}, p_hat, stderr,
                       cfg.bias_bound, seed)


# ---------------------------------------------------------------------------
# Multiplicative simple random walk.
# ---------------------------------------------------------------------------

def msrw_transitions(x: int, s: float | None = None,
                     table: sv.FactorTable | None = None):
    """Multiplier law of the multiplicative simple random walk at scale x.

    w(p^j) = p^(-js) / Z over primes p <= x, j >= 1, with the partition
    function Z = sum over p of 1/(p^s - 1) evaluated in closed form per prime.
    Returns (TransitionList, Z); the list truncates j at negligible mass.
    """
    if x < 3:
        raise ValueError("need x >= 3")
    if s is None:
        s = 1.0 - 1.0 / (10.0 * math.log(x))
    primes = table.primes[table.primes <= x] if table is not None else sv.primes_up_to(x)
    pf = primes.astype(np.float64)
    Z = float(np.sum(1.0 / (pf**s - 1.0)))
    entries = []
    for p in primes.tolist():
        step = float(p) ** -s
        q, w = p, step
        while w / Z > 1e-17:
            entries.append((q, w / Z))
            q *= p
            w *= step
    entries.sort()
    return ch.TransitionList(source=1, entries=entries, truncated=True), Z


def poisson_lym_statistic(A, x: int, y: int, table: sv.FactorTable) -> float:
    """Poisson-weighted antichain statistic on the window [y/x, y].

    sum over n in A cap [y/x, y] of 1/(n * P(Pois(Z) = omega_x(n))), where
    omega_x counts distinct prime factors <= x and Z is the walk's partition
    function at scale x.
    """
    _, Z = msrw_transitions(x, table=table)
    lo, hi = y / x, y
    total = 0.0
    for n in A:
        if not lo <= n <= hi:
            continue
        _, _, vp, _ = sv.factor_stats(int(n), table)
        k = sum(1 for p in vp if p <= x)
        logp = -Z + k * math.log(Z) - math.lgamma(k + 1)
        total += 1.0 / (n * math.exp(logp))
    return total


# ---------------------------------------------------------------------------
# Density statistics along the invariant upward chain.
# ---------------------------------------------------------------------------

@dataclass
class DensityStats:
    x_list: list[int]
    mean_X: list[float]
    second_moment_X: list[float]
    stderr: list[float]
    trials: int
    seed: int


class _InvariantUpSampler:
    """Upward chain from 1 adjoint to the von Mangoldt chain under its
    invariant zeta-integral weight, truncated at a state cap.

    States strictly increase, so a path that leaves [1, cap] never returns;
    visit counts inside the window are therefore sampled exactly, with the
    leave event drawn at its exact residual probability.
    """

    def __init__(self, cap: int, table: sv.FactorTable):
        self.cap = cap
        self.table = table
        ns = np.arange(2, cap + 1, dtype=np.int64)
        vals = np.empty(cap + 1)
        vals[1] = 1.0
        vals[2:] = wt.nu_lambda_batch(ns)
        self.nu = vals
        self.cache: dict[int, tuple] = {}

    def row(self, n: int):
        row = self.cache.get(n)
        if row is None:
            q, lam, _ = sv.prime_powers(self.table, self.cap // n)
            if len(q):
                targets = n * q
                probs = self.nu[targets] * lam / (
                    np.log(targets.astype(np.float64)) * self.nu[n])
                row = (targets, np.cumsum(probs))
            else:
                row = (np.empty(0, dtype=np.int64), np.empty(0))
            self.cache[n] = row
        return row

    def walk(self, rng: np.random.Generator) -> list[int]:
        n = 1
        states = [1]
        while True:
            targets, cum = self.row(n)
            u = rng.random()
            if len(cum) == 0 or u >= cum[-1]:
                return states  # left the window (or drew the infinity remainder)
            n = int(targets[np.searchsorted(cum, u, side="right")])
            states.append(n)


def chain_density_stats(A, x_list, trials: int, trunc_X: int, seed: int,
                        table: sv.FactorTable,
                        cfg: kn.KernelConfig = kn.DEFAULT_KERNELS) -> DensityStats:
    """Visit-count statistics X_j = #{i : n_i in A, n_i <= x_j} / log log x_j
    along the invariant upward chain started from 1.

    A may be None (all integers), a predicate, or a set.
    """
    x_list = sorted(int(x) for x in x_list)
    if not x_list:
        raise ValueError("need at least one threshold")
    if x_list[-1] > trunc_X:
        raise ValueError("thresholds must not exceed trunc_X")
    if A is None:
        member = lambda n: True
    elif callable(A):
        member = A
    else:
        members = set(int(a) for a in A)
        member = lambda n: n in members
    sampler = _InvariantUpSampler(trunc_X, table)
    counts = np.zeros((trials, len(x_list)), dtype=np.int64)
    per = [trials // N_STREAMS + (1 if s < trials % N_STREAMS else 0)
           for s in range(N_STREAMS)]
    t = 0
    for strm, cnt in enumerate(per):
        rng = _rng(seed, strm)
        for _ in range(cnt):
            states = sampler.walk(rng)
            for j, xj in enumerate(x_list):
                counts[t, j] = sum(1 for m in states if m <= xj and member(m))
            t += 1
    norms = np.array([math.log(math.log(x)) for x in x_list])
    Xj = counts / norms
    mean = Xj.mean(axis=0)
    second = (Xj**2).mean(axis=0)
    se = Xj.std(axis=0, ddof=1) / math.sqrt(trials)
    return DensityStats(x_list=x_list, mean_X=mean.tolist(),
                        second_moment_X=second.tolist(), stderr=se.tolist(),
                        trials=trials, seed=seed)
