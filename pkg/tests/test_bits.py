import pytest

from qsgames.bits import BitString, parity


def test_xor_example():
    assert (BitString(0b1010, 4) ^ BitString(0b0110, 4)).value == 0b1100


def test_xor_width_mismatch():
    with pytest.raises(ValueError):
        BitString(1, 4) ^ BitString(1, 5)


def test_value_must_fit():
    with pytest.raises(ValueError):
        BitString(16, 4)
    with pytest.raises(ValueError):
        BitString(0, 0)


def test_hex_roundtrip_msb_first():
    b = BitString(0xAB, 8)
    assert b.to_hex() == "ab"
    assert BitString.from_hex("ab", 8) == b
    # widths that are not nibble multiples pad to whole nibbles
    assert BitString(0b101, 3).to_hex() == "5"
    assert BitString(0b10110, 5).to_hex() == "16"


def test_bit_indexing_is_msb_first():
    b = BitString(0b1000, 4)
    assert b.bit(0) == 1
    assert [b.bit(i) for i in range(4)] == [1, 0, 0, 0]


def test_concat_split_take_drop():
    a, b = BitString(0b101, 3), BitString(0b01, 2)
    c = a.concat(b)
    assert c == BitString(0b10101, 5)
    assert c.split(3) == (a, b)
    assert c.take(3) == a
    assert c.drop(3) == b


def test_invert_and_json():
    b = BitString(0b0110, 4)
    assert (~b).value == 0b1001
    assert BitString.from_json(b.to_json()) == b


def test_parity():
    assert parity(0b1011) == 1
    assert parity(0) == 0
