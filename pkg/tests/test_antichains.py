import numpy as np
import pytest

import divchain as dc
from divchain import sieve as sv


def longest_chain_dag(A, table):
    """Oracle: longest divisibility chain by DAG longest-path."""
    A = sorted(A)
    best = {}
    for a in A:
        best[a] = 1 + max((best[d] for d in sv.divisors(a, table)[:-1]
                           if d in best), default=0)
    return max(best.values())


def test_is_primitive_basics():
    assert dc.is_primitive({2, 3, 5})
    assert not dc.is_primitive({2, 4})
    with pytest.raises(ValueError):
        dc.is_primitive({1, 3})


def test_layers_are_primitive(table_1e4):
    for k in (1, 2, 3):
        layer = dc.generate_layer(k, 1000, table=table_1e4)
        assert dc.is_primitive(set(layer))


def test_is_primitive_sparse_path():
    assert dc.is_primitive({10**7 + 19, 10**7 + 33})
    assert not dc.is_primitive({10**7, 2 * 10**7})


def test_generate_layer_examples(table_1e4):
    assert dc.generate_layer(2, 20, table=table_1e4).elements == (4, 6, 9, 10, 14, 15)
    assert dc.generate_layer(1, 10, table=table_1e4).elements == (2, 3, 5, 7)
    assert dc.generate_layer(2, 50, Q={3, 5, 7}, table=table_1e4).elements == \
        (9, 15, 21, 25, 35, 49)
    assert dc.generate_layer(0, 50, table=table_1e4).elements == ()


def test_restrict_Q(table_1e4):
    A = dc.PrimitiveSet.certify({6, 35, 121})
    assert dc.restrict_Q(A, {2, 3}, table_1e4).elements == (6,)
    allQ = set(int(p) for p in table_1e4.primes[table_1e4.primes <= 121])
    assert dc.restrict_Q(A, allQ, table_1e4).elements == A.elements


def test_restrict_matches_generate(table_1e4):
    for k, X, Q in [(2, 50, {3, 5, 7}), (3, 400, {2, 3, 5}), (1, 30, {2, 7})]:
        a = dc.restrict_Q(dc.generate_layer(k, X, table=table_1e4), Q, table_1e4)
        b = dc.generate_layer(k, X, Q=Q, table=table_1e4)
        assert a.elements == b.elements


def test_random_antichain_deterministic(table_1e4):
    a = dc.random_antichain(500, 0.8, seed=42, table=table_1e4)
    b = dc.random_antichain(500, 0.8, seed=42, table=table_1e4)
    assert a.elements == b.elements
    c = dc.random_antichain(500, 0.8, seed=43, table=table_1e4)
    assert c.elements != a.elements


def test_random_antichain_maximal_at_full_density(table_1e4):
    ps = dc.random_antichain(10, 1.0, seed=0, table=table_1e4)
    chosen = set(ps.elements)
    for n in range(2, 11):
        if n in chosen:
            continue
        related = any(n % a == 0 or a % n == 0 for a in chosen)
        assert related, f"{n} could have been admitted"


def test_random_antichain_fuzz_valid(table_1e4):
    for seed in range(100):
        ps = dc.random_antichain(500, 1.0, seed=seed, table=table_1e4)
        assert dc.is_primitive(set(ps.elements))


def test_peel_chain(table_1e4):
    layers = dc.peel_layers({2, 4, 8}, table_1e4)
    assert [l.elements for l in layers] == [(2,), (4,), (8,)]


def test_peel_primitive_single_layer(table_1e4):
    A = {4, 6, 9, 10, 14, 15}
    layers = dc.peel_layers(A, table_1e4)
    assert len(layers) == 1 and set(layers[0].elements) == A


def test_peel_mixed(table_1e4):
    layers = dc.peel_layers({2, 3, 4, 6, 9}, table_1e4)
    assert [set(l.elements) for l in layers] == [{2, 3}, {4, 6, 9}]


def test_peel_layer_count_matches_longest_chain(table_1e4):
    rng = np.random.default_rng(37)
    for _ in range(25):
        A = set(int(a) for a in rng.integers(2, 2000, size=int(rng.integers(5, 200))))
        layers = dc.peel_layers(A, table_1e4)
        assert len(layers) == longest_chain_dag(A, table_1e4)
        for layer in layers:
            assert dc.is_primitive(set(layer.elements))


def test_int_set_io(tmp_path):
    path = tmp_path / "set.txt"
    dc.antichains.write_int_set(path, [5, 2, 9])
    assert dc.antichains.read_int_set(path) == [2, 5, 9]
