import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import divchain as dc
from divchain import certify as ct
from divchain.intervals import Interval


# ---------------------------------------------------------------------------
# Interval arithmetic.
# ---------------------------------------------------------------------------

def test_interval_basics():
    a = Interval(1.0, 2.0)
    b = Interval(-1.0, 3.0)
    assert (a + b).contains(0.5)
    assert (a * b).contains(6.0) and (a * b).contains(-2.0)
    with pytest.raises(ZeroDivisionError):
        a / b
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    assert (a / Interval(2.0, 2.0)).contains(0.75)
    assert Interval.point(0.5).power(4.0).contains(2.0)


def test_interval_hex_roundtrip():
    iv = Interval(math.pi, 10.0 / 3.0)
    assert Interval.from_hex(iv.to_hex()) == iv


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50))
@settings(max_examples=300, deadline=None)
def test_interval_add_mul_containment(a, b, c, d):
    x = Interval(min(a, b), max(a, b))
    y = Interval(min(c, d), max(c, d))
    for t in (0.0, 0.3, 1.0):
        px = x.lo + t * (x.hi - x.lo)
        py = y.lo + t * (y.hi - y.lo)
        assert (x + y).contains(px + py)
        assert (x * y).contains(px * py)


_OPS = ("add", "sub", "mul", "div", "exp", "log", "pow")


def _random_tree(rng, depth):
    if depth == 0:
        lo = float(rng.uniform(0.1, 3.0))
        hi = lo + float(rng.uniform(0.0, 0.5))
        return ("leaf", lo, hi)
    op = _OPS[int(rng.integers(0, len(_OPS)))]
    if op in ("exp", "log"):
        return (op, _random_tree(rng, depth - 1))
    if op == "pow":
        p = float(rng.choice([2.0, 3.0, 5.0, 7.0]))
        return ("pow", p, _random_tree(rng, depth - 1))
    return (op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def _eval_tree(node, rng, samples):
    """Returns (interval, sample array); samples stay inside the leaves."""
    kind = node[0]
    if kind == "leaf":
        _, lo, hi = node
        pts = lo + (hi - lo) * rng.random(samples)
        return Interval(lo, hi), pts
    if kind in ("exp", "log"):
        iv, pts = _eval_tree(node[1], rng, samples)
        if kind == "exp":
            iv = Interval(min(iv.lo, 5.0), min(iv.hi, 5.0 + max(0.0, iv.hi - iv.lo)))
            pts = np.clip(pts, None, iv.hi)
            return iv.exp(), np.exp(pts)
        if iv.lo <= 0:
            shift = 0.125 - iv.lo
            iv = Interval(iv.lo + shift, iv.hi + shift)
            pts = pts + shift
        return iv.log(), np.log(pts)
    if kind == "pow":
        _, p, sub = node
        iv, pts = _eval_tree(sub, rng, samples)
        return iv.power(p), p**pts
    a_iv, a_pts = _eval_tree(node[1], rng, samples)
    b_iv, b_pts = _eval_tree(node[2], rng, samples)
    if kind == "add":
        return a_iv + b_iv, a_pts + b_pts
    if kind == "sub":
        return a_iv - b_iv, a_pts - b_pts
    if kind == "mul":
        return a_iv * b_iv, a_pts * b_pts
    if b_iv.lo <= 0.0 <= b_iv.hi:
        shift = 0.25 - b_iv.lo
        b_iv = Interval(b_iv.lo + shift, b_iv.hi + shift)
        b_pts = b_pts + shift
    return a_iv / b_iv, a_pts / b_pts


def test_interval_soundness_fuzz():
    rng = np.random.default_rng(2024)
    trees = 100_000
    for i in range(trees):
        tree = _random_tree(rng, depth=int(rng.integers(1, 4)))
        try:
            iv, pts = _eval_tree(tree, rng, 50)
        except (OverflowError, ZeroDivisionError, ValueError):
            continue
        if not np.isfinite(pts).all():
            continue
        assert iv.lo <= float(pts.min()) and float(pts.max()) <= iv.hi, tree


# ---------------------------------------------------------------------------
# Constant enclosure.
# ---------------------------------------------------------------------------

def test_constant_C_digits():
    iv = ct.enclose_constant_C(10**5, dc.build_prime_table(10**6))
    assert 0.11110 <= iv.lo and iv.hi < 0.11111


def test_constant_C_nested_and_width():
    pt = dc.build_prime_table(10**7)
    c5 = ct.enclose_constant_C(10**5, pt)
    c6 = ct.enclose_constant_C(10**6, pt)
    assert c5.lo <= c6.lo and c6.hi <= c5.hi
    assert c6.width() <= 5e-7


def test_constant_C_tail_dominates_truth():
    # oracle: the exact prime sum over the next decade must fit inside
    pt = dc.build_prime_table(10**7)
    iv = ct.enclose_constant_C(10**5, pt)
    pf = pt.primes[(pt.primes > 7)].astype(np.float64)
    exact_to_1e7 = float(np.sum(np.log(pf) / ((pf - 1.0) * (pf - 2.0))))
    assert iv.lo <= exact_to_1e7 <= iv.hi  # remaining tail is ~1e-7


def test_constant_C_validation(table_1e4):
    with pytest.raises(ValueError):
        ct.enclose_constant_C(7, dc.build_prime_table(1000))


# ---------------------------------------------------------------------------
# Analytic certificate.
# ---------------------------------------------------------------------------

def test_certify_analytic_proved():
    cert = dc.certify_analytic(max_depth=40)
    assert cert.verdict == "proved"
    for leaf in cert.leaves:
        assert leaf.lhs.hi < leaf.rhs.lo
    # leaves cover the whole parameter range in order
    assert cert.leaves[0].u.lo == 0.0
    for a, b in zip(cert.leaves, cert.leaves[1:]):
        assert a.u.hi >= b.u.lo
    assert cert.leaves[-1].u.hi >= ct.ANALYTIC_U_MAX


def test_certify_analytic_depth_one_inconclusive():
    assert dc.certify_analytic(max_depth=1).verdict == "inconclusive"


def test_certify_analytic_mutation_fails():
    cert = dc.certify_analytic(max_depth=12, rhs_scale=0.5)
    assert cert.verdict == "failed"
    assert any(leaf.verdict == "failed" for leaf in cert.leaves)


def test_certificate_replay_and_roundtrip():
    cert = dc.certify_analytic(max_depth=40)
    assert dc.replay(cert)
    text = dc.certificate_to_text(cert)
    back = dc.certificate_from_text(text)
    assert back.verdict == cert.verdict
    assert len(back.leaves) == len(cert.leaves)
    for a, b in zip(cert.leaves, back.leaves):
        assert a.u == b.u and a.lhs == b.lhs and a.rhs == b.rhs
    assert dc.replay(back)
    # a tampered verdict no longer replays
    back.leaves[0].verdict = "failed"
    assert not dc.replay(back)


# ---------------------------------------------------------------------------
# Grid checks.
# ---------------------------------------------------------------------------

def test_grid_checks_no_violations(table_1e6):
    specs = {
        "phi_ineq": dc.GridSpec(0.001, 5.0, 120),
        "sharp": dc.GridSpec(0.02, 5.0, 60),
        "sharp2": dc.GridSpec(0.02, 5.0, 60),
        "om2": dc.GridSpec(0.001, 5.0, 120),
        "eta_monotone": dc.GridSpec(0.05, 5.0, 120),
        "analytic": dc.GridSpec(0.0005, ct.ANALYTIC_U_MAX, 120),
    }
    for ineq, spec in specs.items():
        rep = dc.grid_check(ineq, spec, table_1e6)
        assert rep.max_violation <= 1e-9, ineq
        assert rep.rows and len(rep.rows[0]) == len(rep.columns)


def test_grid_check_unknown_id(table_1e4):
    with pytest.raises(ValueError):
        dc.grid_check("nope", dc.GridSpec(0.1, 1.0, 10), table_1e4)


def test_grid_spec_parse():
    g = dc.GridSpec.parse("0.5:2:7")
    assert (g.lo, g.hi, g.count) == (0.5, 2.0, 7)
    with pytest.raises(ValueError):
        dc.GridSpec(2.0, 1.0, 10)
