import math

import numpy as np
import pytest

import divchain as dc
from divchain import chains as ch
from divchain import sieve as sv


def test_chain_id_validation():
    with pytest.raises(ValueError):
        dc.ChainId(dc.ChainKind.VON_MANGOLDT, k=2)
    with pytest.raises(ValueError):
        dc.ChainId.odd_banks_martin(0, {3, 5})
    with pytest.raises(ValueError):
        dc.ChainId.odd_banks_martin(1, {2, 3})


def test_mertens_transition(table_1e4):
    tl = dc.transitions_down(dc.ChainId.mertens(), 12, table_1e4)
    assert tl.entries == [(4, 1.0)]


def test_von_mangoldt_transition(table_1e4):
    tl = dc.transitions_down(dc.ChainId.von_mangoldt(), 12, table_1e4)
    d = tl.as_dict()
    log12 = math.log(12)
    assert d[6] == pytest.approx(math.log(2) / log12, rel=1e-14)
    assert d[4] == pytest.approx(math.log(3) / log12, rel=1e-14)
    assert d[3] == pytest.approx(math.log(2) / log12, rel=1e-14)
    assert tl.prob_sum() == pytest.approx(1.0, abs=1e-13)


def test_eps_prime_power_transition(table_1e4):
    # at 8 = 2^3 the jump to 1 is removed and its weight moves to the jump
    # to the prime: 8 -> 2 with probability 2/3, 8 -> 4 with probability 1/3
    tl = dc.transitions_down(dc.ChainId.eps_modified(), 8, table_1e4)
    d = tl.as_dict()
    assert d[2] == pytest.approx(2 / 3, rel=1e-14)
    assert d[4] == pytest.approx(1 / 3, rel=1e-14)
    tl4 = dc.transitions_down(dc.ChainId.eps_modified(), 4, table_1e4)
    assert tl4.entries == [(2, 1.0)]


def test_eps_primes_absorb(table_1e4):
    tl = dc.transitions_down(dc.ChainId.eps_modified(), 17, table_1e4)
    assert tl.entries == [(17, 1.0)]


def test_odd_banks_martin_transition(table_1e4):
    c = dc.ChainId.odd_banks_martin(1, {3, 5})
    tl = dc.transitions_down(c, 15, table_1e4)
    lam = 3 * math.log(3) + (5 / 3) * math.log(5)
    d = tl.as_dict()
    assert d[5] == pytest.approx(3 * math.log(3) / lam, rel=1e-13)
    assert d[3] == pytest.approx((5 / 3) * math.log(5) / lam, rel=1e-13)


def test_state_space_errors(table_1e4):
    c = dc.ChainId.odd_banks_martin(1, {3, 5})
    with pytest.raises(ValueError):
        dc.transitions_down(c, 6, table_1e4)  # even
    with pytest.raises(ValueError):
        dc.transitions_down(dc.ChainId.eps_modified(), 1, table_1e4)


def test_row_sums_sample(table_1e4):
    rng = np.random.default_rng(11)
    chains = [dc.ChainId.random_prime(), dc.ChainId.mertens(),
              dc.ChainId.von_mangoldt(), dc.ChainId.eps_modified()]
    for n in rng.integers(2, 10**4, size=200).tolist():
        for c in chains:
            tl = dc.transitions_down(c, int(n), table_1e4)
            assert abs(tl.prob_sum() - 1.0) < 1e-12
            for m, _ in tl.entries:
                assert m == n or (n % m == 0 and m < n)


def test_eps_matches_vm_off_prime_powers(table_1e4):
    rng = np.random.default_rng(13)
    count = 0
    for n in rng.integers(2, 10**4, size=500).tolist():
        n = int(n)
        _, small, vp, _ = sv.factor_stats(n, table_1e4)
        if small == 1:
            continue
        a = dc.transitions_down(dc.ChainId.von_mangoldt(), n, table_1e4).as_dict()
        b = dc.transitions_down(dc.ChainId.eps_modified(), n, table_1e4).as_dict()
        assert a == b
        count += 1
    assert count > 300


def test_obm_stays_in_space(table_1e4):
    c = dc.ChainId.odd_banks_martin(2, {3, 5, 7, 11})
    states = [n for n in range(2, 3000) if dc.in_state_space(c, n, table_1e4)]
    assert states, "state space should be nonempty"
    for n in states:
        tl = dc.transitions_down(c, n, table_1e4)
        for m, _ in tl.entries:
            assert dc.in_state_space(c, m, table_1e4)
        if sv.factor_stats(n, table_1e4)[0] == 2:
            assert tl.entries == [(n, 1.0)]


def test_margin_nonnegative_sample(table_1e5):
    w0 = dc.WeightId.nu0()
    w2 = dc.WeightId.nu_shifted(2)
    vm = dc.ChainId.von_mangoldt()
    eps = dc.ChainId.eps_modified()
    rng = np.random.default_rng(17)
    for n in [2, 3, 4] + rng.integers(2, 10**4, size=60).tolist():
        n = int(n)
        assert dc.subinvariance_margin(vm, w0, n, 10**5, table_1e5).lower >= -1e-9
        assert dc.subinvariance_margin(vm, w2, n, 10**5, table_1e5).lower >= -1e-9
        assert dc.subinvariance_margin(eps, w0, n, 10**5, table_1e5).lower >= -1e-9


def test_margin_unsupported_pairing(table_1e4):
    with pytest.raises(dc.UnsupportedPairingError):
        dc.subinvariance_margin(dc.ChainId.random_prime(), dc.WeightId.nu0(),
                                12, 100, table_1e4)


def test_p_rough_shifted_estimate(table_1e5):
    # sum over p-rough prime powers q of Lambda(q)/(q log(mq) log(pmq))
    # stays below 1/log(pm), with the (coarser, all-q) tail added on top
    from divchain import kernels as kn

    T = 10**5
    q, lam, base = sv.prime_powers(table_1e5, T)
    for p in (3, 5, 7):
        sel = base >= p
        qf = q[sel].astype(np.float64)
        lf = lam[sel]
        small = [m for m in range(1, 1001)
                 if all(m % int(r) for r in table_1e5.primes[table_1e5.primes < p])]
        for m in small[:50] + small[-50:]:
            direct = float(np.sum(lf / (qf * np.log(m * qf) * np.log(p * m * qf))))
            tail = kn.shifted_lambda_tail_upper(m, p, T)
            assert direct + tail <= 1.0 / math.log(p * m) + 1e-9


def test_adjoint_detailed_balance(table_1e4):
    w = dc.WeightId.nu_lambda()
    vm = dc.ChainId.von_mangoldt()
    tl = dc.adjoint_transitions(vm, w, 6, 200, table_1e4)
    nu6 = dc.evaluate(w, 6)
    for m, pr in tl.entries:
        if m == dc.INFINITY:
            continue
        down = dc.transitions_down(vm, int(m), table_1e4).as_dict()[6]
        assert nu6 * pr == pytest.approx(dc.evaluate(w, int(m)) * down, rel=1e-9)


def test_adjoint_residual_shrinks(table_1e6):
    w = dc.WeightId.nu_lambda()
    vm = dc.ChainId.von_mangoldt()
    residuals = []
    for T in (100, 10**3, 10**4, 10**5):
        tl = dc.adjoint_transitions(vm, w, 1, T, table_1e6)
        assert tl.truncated
        residuals.append(tl.as_dict()[dc.INFINITY])
        assert tl.prob_sum() == pytest.approx(1.0, abs=1e-12)
    assert residuals == sorted(residuals, reverse=True)
    assert residuals[-1] < residuals[0] / 2  # decays like 1/log T
    assert residuals[-1] < 0.1


def test_eps_adjoint_from_prime_excludes_one(table_1e4):
    tl = dc.adjoint_transitions(dc.ChainId.eps_modified(), dc.WeightId.nu0(),
                                5, 100, table_1e4)
    targets = [m for m, _ in tl.entries]
    assert 1 not in targets
    assert any(m == 25 for m in targets)  # 5^2 steps down to 5 with weight 2/2


def test_adjoint_flags_violation(table_1e4):
    # the zeta-integral weight is not sub-invariant for the Mertens chain:
    # the prime-parent row at 2 already overflows
    with pytest.raises(dc.SubinvarianceViolationError):
        dc.adjoint_transitions(dc.ChainId.mertens(), dc.WeightId.nu_lambda(),
                               2, 10**4, table_1e4)
