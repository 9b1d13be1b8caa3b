import math

import numpy as np
import pytest

from prclab.infotheory import (
    EnumerationLimit,
    FiniteDistribution,
    HypothesisViolation,
    KeyedFamily,
    check_key_leakage,
    check_pinsker_sandwich,
    entropy,
    joint_sample_distance,
    key_leakage_bound,
    kl_divergence,
    statistical_distance,
)


def _random_distribution(rng, size):
    p = rng.random(size)
    p /= p.sum()
    # renormalize exactly enough for the 1e-12 gate
    p[-1] = 1.0 - p[:-1].sum()
    return FiniteDistribution(np.abs(p))


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution([0.5, 0.6])
    with pytest.raises(ValueError):
        FiniteDistribution([-0.1, 1.1])
    with pytest.raises(ValueError):
        FiniteDistribution([])
    with pytest.raises(ValueError):
        FiniteDistribution([[0.5], [0.5]])


def test_entropy_values():
    assert entropy(FiniteDistribution.uniform(8)) == pytest.approx(3.0, abs=1e-12)
    assert entropy(FiniteDistribution.point_mass(8)) == 0.0
    d = FiniteDistribution([0.6, 0.4])
    by_hand = -(0.6 * math.log2(0.6) + 0.4 * math.log2(0.4))
    assert entropy(d) == pytest.approx(by_hand, abs=1e-12)
    assert round(entropy(d), 4) == 0.9710


def test_statistical_distance():
    u2 = FiniteDistribution.uniform(2)
    assert statistical_distance(u2, u2) == 0.0
    assert statistical_distance(FiniteDistribution.point_mass(2), u2) == 0.5
    a = FiniteDistribution([0.7, 0.2, 0.1])
    b = FiniteDistribution([0.1, 0.3, 0.6])
    assert statistical_distance(a, b) == statistical_distance(b, a)
    with pytest.raises(ValueError):
        statistical_distance(a, u2)


def test_kl_divergence():
    a = FiniteDistribution([0.3, 0.7])
    assert kl_divergence(a, a) == 0.0
    assert kl_divergence(
        FiniteDistribution([1.0, 0.0]), FiniteDistribution([0.5, 0.5])
    ) == pytest.approx(1.0, abs=1e-12)
    # mass where the reference has none
    assert kl_divergence(
        FiniteDistribution([0.5, 0.5]), FiniteDistribution([1.0, 0.0])
    ) == math.inf


def test_kl_to_uniform_is_entropy_gap():
    rng = np.random.default_rng(30)
    for _ in range(50):
        size = int(rng.integers(2, 64))
        d = _random_distribution(rng, size)
        gap = math.log2(size) - entropy(d)
        assert abs(kl_divergence(d, FiniteDistribution.uniform(size)) - gap) < 1e-10


def test_pinsker_inequality_chain():
    # 2 SD^2 <= KL * ln2 (nats) <= KL (bits), on absolutely continuous pairs
    rng = np.random.default_rng(31)
    for _ in range(50):
        size = int(rng.integers(2, 32))
        d1 = _random_distribution(rng, size)
        d2 = _random_distribution(rng, size)
        sd = statistical_distance(d1, d2)
        kl = kl_divergence(d1, d2)
        assert 2 * sd * sd <= kl * math.log(2) + 1e-9
        assert kl * math.log(2) <= kl + 1e-12


def test_sandwich_uniform_edge():
    chk = check_pinsker_sandwich(FiniteDistribution.uniform(16))
    assert chk.eps == 0.0 and chk.lower == 0.0 and chk.upper == 0.0
    assert abs(chk.gap) < 1e-12 and chk.ok


def test_sandwich_example_values():
    chk = check_pinsker_sandwich(FiniteDistribution([0.6, 0.4]))
    assert chk.eps == pytest.approx(0.1, abs=1e-12)
    assert chk.lower == pytest.approx(0.02, abs=1e-12)
    assert round(chk.gap, 4) == 0.0290
    assert round(chk.upper, 4) == 0.8325
    assert chk.ok


def test_sandwich_hypothesis_violation():
    with pytest.raises(HypothesisViolation):
        check_pinsker_sandwich(FiniteDistribution.point_mass(4))


def test_sandwich_random_sweep():
    rng = np.random.default_rng(32)
    for _ in range(300):
        size = int(rng.integers(2, 257))
        t = float(rng.random()) * 0.25
        mix = (1 - t) * np.full(size, 1.0 / size) + t * rng.dirichlet(np.ones(size))
        mix[-1] = 1.0 - mix[:-1].sum()
        chk = check_pinsker_sandwich(FiniteDistribution(mix))
        assert chk.eps <= 0.25 + 1e-12
        assert chk.ok


def test_key_leakage_bound_values():
    assert key_leakage_bound(0.0, 5, 3, 0) == 0.0
    v = key_leakage_bound(0.01, 16, 100, 8)
    assert v == pytest.approx(math.sqrt(0.402), abs=1e-12)
    assert round(v, 4) == 0.6340
    # term signs: monotone up in eps, n, ell; down in m
    assert key_leakage_bound(0.02, 16, 100, 8) >= v
    assert key_leakage_bound(0.01, 17, 100, 8) >= v
    assert key_leakage_bound(0.01, 16, 100, 9) >= v
    assert key_leakage_bound(0.01, 16, 101, 8) <= v
    with pytest.raises(ValueError):
        key_leakage_bound(1.5, 1, 1, 1)
    with pytest.raises(ValueError):
        key_leakage_bound(0.5, 1, 0, 1)


def test_joint_distance_against_brute_force():
    # every key yields the same point mass; m=2 samples land on one pair
    ell, n, m = 1, 2, 2
    table = np.zeros((2, 4))
    table[:, 3] = 1.0
    family = KeyedFamily(ell, n, table)
    eps = joint_sample_distance(family, m)
    assert eps == pytest.approx(15 / 16, abs=1e-12)

    # independent oracle: loop over keys and m-tuples directly
    rng = np.random.default_rng(33)
    table = rng.dirichlet(np.ones(4), size=2)
    family = KeyedFamily(1, 2, table)
    joint = {}
    for key in range(2):
        for x1 in range(4):
            for x2 in range(4):
                w = table[key, x1] * table[key, x2] / 2
                joint[(x1, x2)] = joint.get((x1, x2), 0.0) + w
    expected = 0.5 * sum(abs(v - 1 / 16) for v in joint.values())
    assert joint_sample_distance(family, 2) == pytest.approx(expected, abs=1e-12)


def test_key_leakage_uniform_family():
    family = KeyedFamily(2, 3, np.full((4, 8), 1 / 8))
    chk = check_key_leakage(family, 2)
    assert chk.measured_sd == pytest.approx(0.0, abs=1e-12)
    assert chk.bound == pytest.approx(math.sqrt(2 / 2), abs=1e-12)  # sqrt(ell/m)
    assert chk.ok


def test_key_leakage_point_mass_family():
    table = np.zeros((2, 4))
    table[:, 0] = 1.0
    chk = check_key_leakage(KeyedFamily(1, 2, table), 2)
    # pair (sk, x) puts 1/2 on two cells of eight: SD = 3/4 by hand
    assert chk.measured_sd == pytest.approx(0.75, abs=1e-12)
    assert chk.ok


def test_key_leakage_random_sweep():
    rng = np.random.default_rng(34)
    for _ in range(100):
        ell = int(rng.integers(0, 3))
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        table = rng.dirichlet(np.ones(1 << n), size=1 << ell)
        assert check_key_leakage(KeyedFamily(ell, n, table), m).ok


def test_enumeration_limits():
    family = KeyedFamily(1, 4, np.full((2, 16), 1 / 16))
    with pytest.raises(EnumerationLimit):
        joint_sample_distance(family, 7)  # m*n = 28 > 24
    big = KeyedFamily(18, 3, np.full((1 << 18, 8), 1 / 8))
    with pytest.raises(EnumerationLimit):
        check_key_leakage(big, 1)  # n + ell = 21 > 20
