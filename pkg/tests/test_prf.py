import numpy as np
import pytest

from qsgames.bits import BitString
from qsgames.prf import (
    ConcretePrf,
    IdealPrf,
    Permutation,
    feistel_network,
    feistel_prp,
    feistel_prp_inv,
    make_prf,
    sample_ideal_qprp,
)
from qsgames.rng import Rand


class TestIdealPrf:
    def test_deterministic(self):
        prf = IdealPrf(BitString(0x1234, 16), 8, 8)
        x = BitString(0x5A, 8)
        assert prf.eval(x) == prf.eval(x)

    def test_order_independent(self):
        key = BitString(0x1234, 16)
        a = IdealPrf(key, 8, 8)
        b = IdealPrf(key, 8, 8)
        xs = [BitString(v, 8) for v in (3, 250, 17)]
        assert [a.eval(x) for x in xs] == [b.eval(x) for x in reversed(xs)][::-1]

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            IdealPrf(BitString(1, 8), 8, 8).eval(BitString(1, 9))

    def test_output_bias_within_three_sigma(self):
        # Monte-Carlo oracle: fresh key, all 2^12 inputs, per-bit frequency
        prf = IdealPrf(Rand(7).bits(32), 12, 8)
        counts = np.zeros(8)
        n = 1 << 12
        for v in range(n):
            y = prf.eval(BitString(v, 12))
            for j in range(8):
                counts[j] += y.bit(j)
        sigma = 0.5 / np.sqrt(n)
        assert np.all(np.abs(counts / n - 0.5) <= 3 * sigma)

    def test_distinct_keys_distinct_functions(self):
        x = BitString(0, 8)
        outs = {IdealPrf(BitString(k, 16), 8, 8).eval(x).value for k in range(16)}
        assert len(outs) > 1


class TestFeistel:
    def test_zero_round_function_is_identity(self):
        zero = [lambda r: 0] * 4
        for x in (0, 0b10110100, 255):
            assert feistel_network(x, 8, zero) == x

    def test_bijection_exhaustive_width8(self):
        key = BitString(0xBEEF, 16)
        outs = [feistel_prp(key, BitString(v, 8)).value for v in range(256)]
        assert sorted(outs) == list(range(256))

    def test_inverse_exhaustive_width8(self):
        key = BitString(0xBEEF, 16)
        for v in range(256):
            x = BitString(v, 8)
            assert feistel_prp_inv(key, feistel_prp(key, x)) == x

    def test_odd_width_rejected(self):
        with pytest.raises(ValueError):
            feistel_prp(BitString(1, 8), BitString(0, 7))

    def test_concrete_prf_is_feistel(self):
        key = BitString(0xBEEF, 16)
        prf = ConcretePrf(key, 8)
        assert prf.eval(BitString(33, 8)) == feistel_prp(key, BitString(33, 8))

    def test_make_prf_backends(self):
        assert make_prf(BitString(1, 8), 8, 8, "ideal").backend == "ideal"
        assert make_prf(BitString(1, 8), 8, 8, "concrete").backend == "concrete"
        with pytest.raises(ValueError):
            make_prf(BitString(1, 8), 8, 8, "nope")


class TestIdealQprp:
    def test_same_key_same_tables(self):
        a = sample_ideal_qprp(BitString(7, 8), 6)
        b = sample_ideal_qprp(BitString(7, 8), 6)
        assert np.array_equal(a.forward, b.forward)

    def test_forward_inverse_composition(self):
        perm = sample_ideal_qprp(BitString(9, 8), 6)
        z = np.arange(64)
        assert np.array_equal(perm.forward[perm.inverse], z)
        assert np.array_equal(perm.inverse[perm.forward], z)

    def test_cap(self):
        with pytest.raises(ValueError):
            sample_ideal_qprp(BitString(1, 8), 15)

    def test_fixed_points_poisson(self):
        # mean fixed-point count of a uniform permutation is 1
        counts = [
            int((sample_ideal_qprp(BitString(k, 16), 8).forward == np.arange(256)).sum())
            for k in range(100)
        ]
        mean = np.mean(counts)
        assert abs(mean - 1.0) <= 3 / np.sqrt(100)


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation(2, np.array([0, 0, 1, 2]))

    def test_xor_mask_and_identity(self):
        assert Permutation.identity(3).apply(5) == 5
        p = Permutation.xor_mask(0b101, 3)
        assert p.apply(0b010) == 0b111
        assert p.invert(0b111) == 0b010

    def test_inverted(self):
        p = Permutation.from_fn(lambda x: (x + 1) % 8, 3)
        assert p.inverted().apply(p.apply(3)) == 3
