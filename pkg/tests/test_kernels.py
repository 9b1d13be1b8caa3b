"""Backend selection and bit-identity of the two kernel implementations."""

import numpy as np
import pytest

from prclab import _kernels
from prclab._kernels import pure

try:
    from prclab._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled backend not built")


def test_backend_is_selected():
    assert _kernels.BACKEND in ("pure", "compiled")


def test_invalid_backend_env_rejected(monkeypatch):
    monkeypatch.setenv("PRCLAB_KERNELS", "fast")
    with pytest.raises(ValueError):
        _kernels._select_backend()


def test_oracle_bits_deterministic():
    w = np.arange(12, dtype=np.uint64).reshape(6, 2)
    a = pure.oracle_bits(3, 4, 100, w)
    b = pure.oracle_bits(3, 4, 100, w)
    assert np.array_equal(a, b)
    assert a.dtype == np.uint8
    assert set(np.unique(a)) <= {0, 1}


def test_oracle_bits_key_and_length_separation():
    w = np.arange(40, dtype=np.uint64).reshape(20, 2)
    base = pure.oracle_bits(1, 2, 100, w)
    assert not np.array_equal(base, pure.oracle_bits(9, 2, 100, w))
    assert not np.array_equal(base, pure.oracle_bits(1, 7, 100, w))
    # same value queried at a different declared bit length is a
    # different oracle point
    assert not np.array_equal(base, pure.oracle_bits(1, 2, 101, w))


def test_scalar_matches_batch():
    rng = np.random.default_rng(42)
    w = rng.integers(0, 1 << 63, size=(50, 3), dtype=np.uint64)
    batch = _kernels.oracle_bits(7, 8, 150, w)
    for i in range(50):
        assert _kernels.oracle_bit(7, 8, 150, [int(x) for x in w[i]]) == batch[i]


def test_oracle_bits_roughly_balanced():
    rng = np.random.default_rng(0)
    w = rng.integers(0, 1 << 63, size=(20_000, 1), dtype=np.uint64)
    ones = int(pure.oracle_bits(11, 13, 64, w).sum())
    # 6 sigma on a fair coin at 20k draws
    assert abs(ones - 10_000) < 6 * np.sqrt(20_000 * 0.25)


def test_fwht_involution():
    rng = np.random.default_rng(1)
    for n in (0, 1, 3, 6):
        x = rng.normal(size=1 << n)
        y = x.copy()
        pure.fwht_inplace(y)
        pure.fwht_inplace(y)
        assert np.allclose(y / (1 << n), x, rtol=0, atol=1e-12)


def test_fwht_known_values():
    # H2 on (1,0,0,0) is the all-ones vector; on (a,b) it is (a+b, a-b)
    v = np.array([1.0, 0.0, 0.0, 0.0])
    pure.fwht_inplace(v)
    assert np.array_equal(v, np.ones(4))
    v = np.array([3.0, 5.0])
    pure.fwht_inplace(v)
    assert np.array_equal(v, [8.0, -2.0])


@needs_compiled
def test_compiled_oracle_bits_bit_identical():
    rng = np.random.default_rng(2)
    for n_words in (1, 2, 4):
        w = rng.integers(0, 1 << 64, size=(997, n_words), dtype=np.uint64)
        a = pure.oracle_bits(123, 456, 64 * n_words, w)
        b = _core.oracle_bits(123, 456, 64 * n_words, w)
        assert np.array_equal(a, b)


@needs_compiled
def test_compiled_fwht_bit_identical():
    rng = np.random.default_rng(3)
    for n in (1, 5, 10, 14):
        x = rng.normal(size=1 << n)
        a, b = x.copy(), x.copy()
        pure.fwht_inplace(a)
        _core.fwht_inplace(b)
        # bitwise equality, not allclose: both backends must pair the
        # same operands in the same order
        assert np.array_equal(a, b)
