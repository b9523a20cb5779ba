"""Certified enclosures and inequality certificates.

Three layers:

  * enclose_constant_C  -- two-sided enclosure of the prime constant
    sum_{p > 7} log p / ((p-1)(p-2)) = 0.11110..., combining a directly
    summed head, a windowed Chebyshev-theta partial-summation tail on the
    sieved range, and the explicit theta < 1.01624 t ratio beyond it.

  * certify_analytic    -- adaptive bisection proof, in outward-rounded
    interval arithmetic, of the five-term prime inequality that closes the
    odd Banks-Martin sub-invariance argument on u in (0, 1/log 3].

  * grid_check          -- floating-point verification grids (with certified
    tail bookkeeping wherever a side is an infinite sum) for the six
    plotted inequalities; emits figure-reproduction rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import polygamma

from . import kernels as kn
from . import sieve as sv
from .intervals import Interval

__all__ = [
    "Certificate",
    "CertLeaf",
    "GridSpec",
    "GridReport",
    "enclose_constant_C",
    "certify_analytic",
    "grid_check",
    "certificate_to_text",
    "certificate_from_text",
    "replay",
    "ANALYTIC_U_MAX",
]

ANALYTIC_U_MAX = 1.0 / math.log(3.0)
_EPS = np.finfo(np.float64).eps


# ---------------------------------------------------------------------------
# Constant enclosure.
# ---------------------------------------------------------------------------

def _theta_arrays(table):
    """(primes, theta cumsum, envelope) from a FactorTable or PrimeTable."""
    if isinstance(table, sv.PrimeTable):
        return table.primes, table.theta_cum, table.theta_err
    primes = table.primes
    cum = np.cumsum(np.log(primes.astype(np.float64)))
    err = len(primes) * _EPS * float(cum[-1])
    return primes, cum, err


def enclose_constant_C(P_cut: int, table) -> Interval:
    """Enclosure of sum over primes p > 7 of log p / ((p-1)(p-2)).

    Head: direct float sum over 7 < p <= P_cut with a summation-error
    envelope.  Middle: two-sided partial summation against exact theta values
    on geometric windows of (P_cut, table.limit], squeezing theta(t)/t between
    its window extrema (attained at prime jumps).  Beyond the table, only the
    explicit Chebyshev ratio is available, so the lower bound there is zero.
    """
    if P_cut < 11:
        raise ValueError("need P_cut >= 11")
    if P_cut > table.limit:
        raise ValueError("P_cut exceeds the table limit")
    primes, theta_cum, theta_err = _theta_arrays(table)
    head_sel = (primes > 7) & (primes <= P_cut)
    pf = primes[head_sel].astype(np.float64)
    terms = np.log(pf) / ((pf - 1.0) * (pf - 2.0))
    head = float(np.sum(terms))
    head_env = head * (1e-15 + len(terms) * _EPS)
    enclosure = Interval(head - head_env, head + head_env)

    def u(t):
        return 1.0 / ((t - 1.0) * (t - 2.0))

    def F(t):  # antiderivative of u
        return math.log1p(-1.0 / (t - 1.0))

    lim = float(table.limit)
    lp = np.log(primes.astype(np.float64))
    tail_lo, tail_hi = 0.0, 0.0
    a = float(P_cut)
    ratio = 1.05
    while a < lim:
        b = min(a * ratio, lim)
        i0 = int(np.searchsorted(primes, a, side="right"))
        i1 = int(np.searchsorted(primes, b, side="right"))
        th_a = float(theta_cum[i0 - 1]) if i0 > 0 else 0.0
        th_b = float(theta_cum[i1 - 1]) if i1 > 0 else 0.0
        if i1 > i0:
            window = primes[i0:i1].astype(np.float64)
            post = theta_cum[i0:i1] / window          # just after each jump
            pre = (theta_cum[i0:i1] - lp[i0:i1]) / window  # just before
            c_hi = max(th_a / a, float(post.max()))
            c_lo = min(th_b / b, float(pre.min()))
        else:
            c_hi = th_a / a
            c_lo = th_b / b
        c_hi += theta_err / a
        c_lo = max(c_lo - theta_err / a, 0.0)
        integral = a * u(a) - b * u(b) + F(b) - F(a)  # integral of t*(-u') over [a,b]
        base = th_b * u(b) - th_a * u(a)
        dust = theta_err * (u(a) + u(b)) + 8 * _EPS * (abs(base) + th_a * u(a) + c_hi * integral)
        tail_hi += base + c_hi * integral + dust
        tail_lo += max(base + c_lo * integral - dust, 0.0)
        a = b
    # beyond the sieve: theta(t) <= c1 * t only
    c1 = kn.CHEBYSHEV_THETA_RATIO
    th_lim = float(theta_cum[-1]) - theta_err
    beyond = (c1 * lim - th_lim) * u(lim) + c1 * (-F(lim))
    tail_hi += beyond * (1.0 + 1e-12)
    return enclosure + Interval(tail_lo, tail_hi)


# ---------------------------------------------------------------------------
# Interval certificate for the closing inequality.
# ---------------------------------------------------------------------------

@dataclass
class CertLeaf:
    u: Interval
    lhs: Interval
    rhs: Interval
    verdict: str  # proved | failed | inconclusive


@dataclass
class Certificate:
    inequality_id: str
    param_range: Interval
    leaves: list[CertLeaf] = field(default_factory=list)
    max_depth: int = 0
    verdict: str = "inconclusive"


_LOG2 = Interval.point(2.0).log()
_C_CACHE: dict = {}


def _default_C() -> Interval:
    if "C" not in _C_CACHE:
        _C_CACHE["C"] = enclose_constant_C(10**5, sv.build_prime_table(10**6))
    return _C_CACHE["C"]


def _analytic_lhs(u: Interval, C: Interval) -> Interval:
    total = C
    for p in (3, 5, 7):
        pu = u.power(p)
        lp = Interval.point(float(p)).log()
        num = lp * (pu * 2.0 - 1.0)
        den = (pu * (p - 2)) * (pu * p - 1.0)
        total = total + num / den
    return total


def _analytic_rhs(u: Interval, scale: float) -> Interval:
    t34 = (u * 0.75).power(2.0)
    t12 = (u * 0.5).power(2.0)
    den = u.power(2.0) * 2.0 - 1.0
    return (t34 * 0.5 + t12) * _LOG2 / den * scale


def certify_analytic(max_depth: int = 40,
                     cfg: kn.KernelConfig = kn.DEFAULT_KERNELS,
                     rhs_scale: float = 1.0,
                     C: Interval | None = None) -> Certificate:
    """Bisection certificate that the three-prime sum plus the tail constant
    stays strictly below the two-power bound for u in (0, 1/log 3].

    Each leaf stores both enclosures; `proved` demands lhs.hi < rhs.lo on
    every leaf.  A leaf whose rhs enclosure lies entirely below its lhs
    enclosure is a disproof (`failed`); leaves still undecided at max_depth
    leave the verdict `inconclusive` -- never a false `proved`.
    """
    if not 1 <= max_depth <= 60:
        raise ValueError("max_depth must lie in [1, 60]")
    C = _default_C() if C is None else C
    top = Interval(0.0, _up_val(ANALYTIC_U_MAX))
    cert = Certificate("analytic", top, max_depth=max_depth)
    stack = [(top, 0)]
    failed = inconclusive = False
    while stack:
        iv, depth = stack.pop()
        lhs = _analytic_lhs(iv, C)
        rhs = _analytic_rhs(iv, rhs_scale)
        if lhs.strictly_below(rhs):
            cert.leaves.append(CertLeaf(iv, lhs, rhs, "proved"))
            continue
        if rhs.strictly_below(lhs):
            cert.leaves.append(CertLeaf(iv, lhs, rhs, "failed"))
            failed = True
            continue
        if depth >= max_depth:
            cert.leaves.append(CertLeaf(iv, lhs, rhs, "inconclusive"))
            inconclusive = True
            continue
        left, right = iv.split()
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    cert.leaves.sort(key=lambda leaf: leaf.u.lo)
    cert.verdict = "failed" if failed else ("inconclusive" if inconclusive else "proved")
    return cert


def _up_val(x: float) -> float:
    return math.nextafter(x, math.inf)


def replay(cert: Certificate, rhs_scale: float = 1.0,
           C: Interval | None = None) -> bool:
    """Re-evaluate every stored leaf and confirm its recorded verdict."""
    C = _default_C() if C is None else C
    for leaf in cert.leaves:
        lhs = _analytic_lhs(leaf.u, C)
        rhs = _analytic_rhs(leaf.u, rhs_scale)
        if lhs.strictly_below(rhs):
            verdict = "proved"
        elif rhs.strictly_below(lhs):
            verdict = "failed"
        else:
            verdict = "inconclusive"
        if verdict != leaf.verdict:
            return False
    return True


def certificate_to_text(cert: Certificate) -> str:
    lines = [
        f"certificate {cert.inequality_id}",
        f"range {cert.param_range.to_hex()}",
        f"max_depth {cert.max_depth}",
        f"verdict {cert.verdict}",
        f"leaves {len(cert.leaves)}",
    ]
    for leaf in cert.leaves:
        lines.append(
            f"leaf {leaf.u.to_hex()} lhs {leaf.lhs.to_hex()} "
            f"rhs {leaf.rhs.to_hex()} {leaf.verdict}"
        )
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> Certificate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    ineq = lines[0].split()[1]
    rng = Interval.from_hex(" ".join(lines[1].split()[1:3]))
    depth = int(lines[2].split()[1])
    verdict = lines[3].split()[1]
    cert = Certificate(ineq, rng, max_depth=depth, verdict=verdict)
    for ln in lines[5:]:
        parts = ln.split()
        cert.leaves.append(CertLeaf(
            u=Interval.from_hex(f"{parts[1]} {parts[2]}"),
            lhs=Interval.from_hex(f"{parts[4]} {parts[5]}"),
            rhs=Interval.from_hex(f"{parts[7]} {parts[8]}"),
            verdict=parts[9],
        ))
    return cert


# ---------------------------------------------------------------------------
# Floating-point verification grids / figure data.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (self.lo < self.hi and self.count >= 2):
            raise ValueError("grid needs lo < hi and count >= 2")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        lo, hi, count = text.split(":")
        return cls(float(lo), float(hi), int(count))

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass
class GridReport:
    inequality_id: str
    columns: list[str]
    rows: list[tuple]
    max_violation: float


GRID_IDS = ("phi_ineq", "sharp", "sharp2", "om2", "eta_monotone", "analytic")


def grid_check(inequality_id: str, grid: GridSpec, table: sv.FactorTable,
               cfg: kn.KernelConfig = kn.DEFAULT_KERNELS,
               trunc_Q: int | None = None) -> GridReport:
    """Evaluate an inequality on a parameter grid and report the worst
    violation (expected <= 1e-9), emitting the plotted quantities as rows.

    Infinite sums on a left-hand side are truncated and their certified tail
    bound is added back, so a reported non-violation is conservative.
    """
    if inequality_id not in GRID_IDS:
        raise ValueError(f"unknown inequality id {inequality_id!r}")
    if trunc_Q is None:
        trunc_Q = min(10**6, table.limit)
    us = grid.points()

    if inequality_id == "phi_ineq":
        us = us[us > 0]
        vals = kn.neg_zeta_log_deriv(1.0 + us, cfg)
        b2 = math.log(2.0) / (2.0**us - 1.0)
        b1 = 1.0 / us
        rows = list(zip(us, b2, b1, vals))
        viol = max(float(np.max(vals - b2)), float(np.max(b2 - b1)))
        return GridReport(inequality_id, ["u", "bound_2u", "bound_1u",
                                          "neg_zeta_ratio"], rows, max(viol, 0.0))

    if inequality_id == "sharp":
        q, lam, _ = sv.prime_powers(table, trunc_Q)
        qf = q.astype(np.float64)
        rows = []
        viol = 0.0
        for x in us[us > 0]:
            m = 2.0**x
            direct = float(np.sum(lam / (qf * np.log(m * qf) ** 2)))
            lhs = x * math.log(2.0) * (direct + kn.lambda_tail_upper(m, trunc_Q))
            jsum = x * float(polygamma(1, x + 1.0))
            mid = x / (x + 0.5)
            rows.append((x, lhs, jsum, mid, 1.0))
            viol = max(viol, lhs - jsum, jsum - mid, mid - 1.0)
        return GridReport(inequality_id,
                          ["x", "weighted_sum_ub", "j_series", "ratio_bound", "one"],
                          rows, max(viol, 0.0))

    if inequality_id == "sharp2":
        q, lam, _ = sv.prime_powers(table, trunc_Q)
        qf = q.astype(np.float64)
        rows = []
        viol = 0.0
        for x in us[us > 0]:
            m = 2.0**x
            direct = float(np.sum(lam / (qf * np.log(m * qf) * np.log(2.0 * m * qf))))
            lhs = direct + kn.shifted_lambda_tail_upper(m, 2, trunc_Q)
            rhs = 1.0 / math.log(2.0 * m)
            rows.append((x, lhs, rhs))
            viol = max(viol, lhs - rhs)
        return GridReport(inequality_id, ["x", "shifted_sum_ub", "rhs"],
                          rows, max(viol, 0.0))

    if inequality_id == "om2":
        us = us[us > 0]
        lo, hi = kn.odd_prime_ratio_series(us, cfg)
        rows = list(zip(us, us * hi, np.ones_like(us)))
        viol = float(np.max(us * hi - 1.0))
        return GridReport(inequality_id, ["u", "u_times_sum_ub", "one"],
                          rows, max(viol, 0.0))

    if inequality_id == "eta_monotone":
        us = us[us > 0]
        vals = kn.eta(us, cfg)
        rows = list(zip(us, vals))
        viol = float(np.max(vals[:-1] - vals[1:])) if len(vals) > 1 else 0.0
        return GridReport(inequality_id, ["s", "eta"], rows, max(viol, 0.0))

    # analytic: float shadow of the certified inequality
    C_hi = _default_C().hi
    rows = []
    viol = 0.0
    for u in us[(us > 0) & (us <= ANALYTIC_U_MAX)]:
        lhs = C_hi
        for p in (3, 5, 7):
            pu = p**u
            lhs += math.log(p) * (2.0 * pu - 1.0) / ((p - 2) * pu * (p * pu - 1.0))
        rhs = (0.5 * 2.0 ** (0.75 * u) + 2.0 ** (0.5 * u)) * math.log(2.0) / (2.0 ** (1.0 + u) - 1.0)
        rows.append((u, lhs, rhs))
        viol = max(viol, lhs - rhs)
    return GridReport(inequality_id, ["u", "lhs", "rhs"], rows, max(viol, 0.0))
