"""The four weight families on the divisibility poset: doubly harmonic,
Mertens, von Mangoldt (zeta-integral), and prime-shifted."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import kernels as kn
from . import sieve as sv

__all__ = [
    "EULER_GAMMA",
    "WeightKind",
    "WeightId",
    "evaluate",
    "nu_lambda_quadrature",
    "nu_lambda_batch",
]

EULER_GAMMA = 0.5772156649015329


class WeightKind(Enum):
    NU0 = "nu0"
    NU_MERTENS = "nu_mertens"
    NU_LAMBDA = "nu_lambda"
    NU_SHIFTED = "nu_shifted"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class WeightId:
    """Identifies a weight family plus its evaluation parameters."""

    kind: WeightKind
    shift_prime: int | None = None
    quad_tol: float = 1e-9

    def __post_init__(self):
        if self.kind is WeightKind.NU_SHIFTED:
            if self.shift_prime is None or not _is_prime(self.shift_prime):
                raise ValueError("nu_shifted requires a prime shift")
        elif self.shift_prime is not None:
            raise ValueError("shift_prime only applies to nu_shifted")
        if not 0 < self.quad_tol <= 1e-4:
            raise ValueError("quad_tol must lie in (0, 1e-4]")

    @classmethod
    def nu0(cls) -> "WeightId":
        return cls(WeightKind.NU0)

    @classmethod
    def nu_mertens(cls) -> "WeightId":
        return cls(WeightKind.NU_MERTENS)

    @classmethod
    def nu_lambda(cls, quad_tol: float = 1e-9) -> "WeightId":
        return cls(WeightKind.NU_LAMBDA, quad_tol=quad_tol)

    @classmethod
    def nu_shifted(cls, p: int) -> "WeightId":
        return cls(WeightKind.NU_SHIFTED, shift_prime=p)


def _mertens_prefix(table: sv.FactorTable) -> np.ndarray:
    """prefix[j] = prod over the first j primes of (1 - 1/p), prefix[0] = 1."""
    if table._mertens_cache is None:
        ps = table.primes.astype(np.float64)
        prefix = np.empty(len(ps) + 1)
        prefix[0] = 1.0
        np.cumprod(1.0 - 1.0 / ps, out=prefix[1:])
        table._mertens_cache = {"prefix": prefix}
    return table._mertens_cache["prefix"]


def nu_mertens_value(n: int, table: sv.FactorTable) -> float:
    if n == 1:
        return math.exp(EULER_GAMMA)
    _, _, _, largest = sv.factor_stats(n, table)
    j = int(np.searchsorted(table.primes, largest))  # primes strictly below P(n)
    return math.exp(EULER_GAMMA) / n * float(_mertens_prefix(table)[j])


def evaluate(w: WeightId, n: int, table: sv.FactorTable | None = None) -> float:
    """Evaluate the weight at n.  nu0 needs n >= 2; the others accept n >= 1."""
    if n < 1:
        raise ValueError(f"weights are defined on positive integers, got {n}")
    if w.kind is WeightKind.NU0:
        if n < 2:
            raise ValueError("nu0 is undefined at n = 1")
        return 1.0 / (n * math.log(n))
    if w.kind is WeightKind.NU_SHIFTED:
        return 1.0 / (n * math.log(w.shift_prime * n))
    if w.kind is WeightKind.NU_LAMBDA:
        if n == 1:
            return 1.0
        return nu_lambda_quadrature(n, w.quad_tol)[0]
    if w.kind is WeightKind.NU_MERTENS:
        if table is None:
            raise ValueError("nu_mertens needs a FactorTable")
        return nu_mertens_value(n, table)
    raise ValueError(f"unknown weight kind {w.kind}")


# ---------------------------------------------------------------------------
# Quadrature for the zeta-integral weight.
# ---------------------------------------------------------------------------

# Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
_GK_X = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
])
_G7_W = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
])

_NODES = np.concatenate([-_GK_X[:-1], [0.0], _GK_X[-2::-1]])
_WK = np.concatenate([_GK_WK[:-1], [_GK_WK[-1]], _GK_WK[-2::-1]])
_WG = np.zeros(15)
_WG[1:14:2] = np.concatenate([_G7_W[:-1], [_G7_W[-1]], _G7_W[-2::-1]])


def _gk15_panel(f, a: float, b: float):
    c, h = (a + b) / 2.0, (b - a) / 2.0
    x = c + h * _NODES
    y = f(x)
    ik = h * float(np.dot(_WK, y))
    ig = h * float(np.dot(_WG, y))
    # conservative error estimate: QUADPACK-style scaled difference
    diff = abs(ik - ig)
    return ik, min(diff, (200.0 * diff) ** 1.5) + 1e-300


def _adaptive_gk(f, a: float, b: float, tol: float, max_panels: int = 400):
    panels = [(a, b, *_gk15_panel(f, a, b))]
    for _ in range(max_panels):
        err = sum(p[3] for p in panels)
        if err <= tol:
            break
        worst = max(range(len(panels)), key=lambda i: panels[i][3])
        pa, pb, _, _ = panels.pop(worst)
        mid = (pa + pb) / 2.0
        panels.append((pa, mid, *_gk15_panel(f, pa, mid)))
        panels.append((mid, pb, *_gk15_panel(f, mid, pb)))
    return sum(p[2] for p in panels), sum(p[3] for p in panels)


@lru_cache(maxsize=200_000)
def nu_lambda_quadrature(n: int, tol: float = 1e-9):
    """Zeta-integral weight at n >= 2 with an explicit error budget.

    Integrates log(n) * n^(-1-u) / zeta(1+u) over u in [0, U] by adaptive
    Gauss-Kronrod panels; the tail beyond U is at most n^(-1-U) because
    1/zeta <= 1, and that bound is folded into the returned error.
    """
    if n < 2:
        raise ValueError("quadrature path needs n >= 2")
    if not 0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    L = math.log(n)
    U = max(30.0, 30.0 / L, math.log(2.0 / tol) / L)
    tail = n ** (-1.0 - U)

    def f(u):
        return L * np.exp(-(1.0 + u) * L) / kn.zeta(1.0 + u)

    # seed panels geometrically: the integrand lives on the scale u ~ 1/L
    edges = [0.0] + list(np.geomspace(min(0.05, 0.5 / L), U, 24))
    total, err = 0.0, 0.0
    budget = max(tol - tail, tol * 0.1) / len(edges)
    for pa, pb in zip(edges[:-1], edges[1:]):
        v, e = _adaptive_gk(f, pa, pb, budget)
        total += v
        err += e
    return total, err + tail


# fixed panel layout in t = u*log(n); integrand e^-t / zeta(1 + t/log n)
_BATCH_EDGES = np.array([0.0, 0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0, 1.5,
                         2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 45.0])


def nu_lambda_batch(ns, cfg: kn.KernelConfig = kn.DEFAULT_KERNELS) -> np.ndarray:
    """Vectorized zeta-integral weight for an array of n >= 2.

    Uses one shared Kronrod panel layout after substituting t = u log n;
    accuracy is checked against the adaptive scalar path in the test suite.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(ns < 2):
        raise ValueError("batch path needs n >= 2")
    L = np.log(ns.astype(np.float64))
    t_nodes = []
    t_w = []
    for a, b in zip(_BATCH_EDGES[:-1], _BATCH_EDGES[1:]):
        c, h = (a + b) / 2.0, (b - a) / 2.0
        t_nodes.append(c + h * _NODES)
        t_w.append(h * _WK)
    t_nodes = np.concatenate(t_nodes)
    t_w = np.concatenate(t_w)
    out = np.empty(len(ns))
    chunk = 2048
    for i in range(0, len(ns), chunk):
        Lc = L[i : i + chunk]
        s = 1.0 + np.multiply.outer(1.0 / Lc, t_nodes)
        z, _ = kn._em_zeta_pair(s.ravel(), cfg.series_cutoff, cfg.euler_maclaurin_terms)
        phi = np.exp(-t_nodes)[None, :] / z.reshape(s.shape)
        out[i : i + chunk] = phi @ t_w / ns[i : i + chunk].astype(np.float64)
    return out
