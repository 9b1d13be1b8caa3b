import numpy as np
import pytest

from prclab.bits import BitString
from prclab._rng import generator


def test_value_range_checked():
    BitString(0, 0)
    BitString(15, 4)
    with pytest.raises(ValueError):
        BitString(16, 4)
    with pytest.raises(ValueError):
        BitString(-1, 4)
    with pytest.raises(ValueError):
        BitString(1, 0)


def test_bits_round_trip():
    b = BitString(0b10110, 5)
    assert list(b.to_bits()) == [1, 0, 1, 1, 0]
    assert BitString.from_bits([1, 0, 1, 1, 0]) == b
    assert BitString.from_bits(np.array([], dtype=np.uint8)) == BitString(0, 0)


def test_hex_round_trip():
    for value, n in [(0, 0), (0, 1), (1, 1), (0b1011, 4), (0x1F3, 9), (2**70 + 5, 71)]:
        b = BitString(value, n)
        assert BitString.from_hex(b.hex(), n) == b


def test_from_hex_rejects_padding_overflow():
    # 9 bits serialize as 3 hex digits; the top padding bits must be zero
    with pytest.raises(ValueError):
        BitString.from_hex("fff", 9)


def test_indexing_msb_first():
    b = BitString(0b100, 3)
    assert b[0] == 1 and b[1] == 0 and b[2] == 0
    assert list(b) == [1, 0, 0]
    assert b[1:] == BitString(0, 2)
    with pytest.raises(IndexError):
        b[3]


def test_concat_and_xor():
    a = BitString(0b10, 2)
    b = BitString(0b011, 3)
    assert a.concat(b) == BitString(0b10011, 5)
    assert a ^ BitString(0b11, 2) == BitString(0b01, 2)
    with pytest.raises(ValueError):
        a ^ b


def test_popcount_and_distance():
    a = BitString(0b1101, 4)
    assert a.popcount() == 3
    assert a.hamming_distance(BitString(0b1011, 4)) == 2
    assert a.hamming_distance(a) == 0


def test_random_is_seed_deterministic():
    a = BitString.random(130, generator(5))
    b = BitString.random(130, generator(5))
    assert a == b and len(a) == 130
    assert BitString.random(130, generator(6)) != a


def test_words_little_endian():
    b = BitString(1 << 64, 65)
    assert list(b.to_words()) == [0, 1]


def test_hash_and_set_membership():
    s = {BitString(3, 4), BitString(3, 5)}
    assert len(s) == 2  # same value, different lengths are distinct
    assert BitString(3, 4) in s
