import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sefdm_mimo.errors import ConfigurationError, ShapeError
from sefdm_mimo.qam import bits_per_symbol, constellation, qam_demap, qam_map


class TestMapping:
    def test_4qam_quadrants(self):
        s = qam_map([0, 0, 0, 1, 1, 1, 1, 0], 4)
        np.testing.assert_allclose(np.abs(s), 1.0, atol=1e-15)
        quadrants = {(np.sign(z.real), np.sign(z.imag)) for z in s}
        assert len(quadrants) == 4

    @pytest.mark.parametrize("order", [4, 16])
    def test_unit_energy(self, order):
        assert np.mean(np.abs(constellation(order)) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_16qam_gray_neighbours(self):
        pts = constellation(16)
        labels = np.arange(16)
        d_min = np.min(np.abs(pts[:, None] - pts[None, :])[~np.eye(16, dtype=bool)])
        for a in range(16):
            for b in range(a + 1, 16):
                if abs(abs(pts[a] - pts[b]) - d_min) < 1e-9:
                    assert bin(labels[a] ^ labels[b]).count("1") == 1

    def test_zero_bits_corner(self):
        s = qam_map(np.zeros(40, dtype=int), 16)
        assert np.all(s == s[0])

    @pytest.mark.parametrize("order", [2, 8, 64])
    def test_unsupported(self, order):
        with pytest.raises(ConfigurationError):
            bits_per_symbol(order)

    def test_bit_count_multiple(self):
        with pytest.raises(ShapeError):
            qam_map([0, 1, 1], 4)


class TestDemap:
    @pytest.mark.parametrize("order", [4, 16])
    def test_round_trip_10k(self, order):
        bits = np.random.default_rng(0).integers(0, 2, 10_000).astype(np.uint8)
        np.testing.assert_array_equal(qam_demap(qam_map(bits, order), order), bits)

    @given(st.lists(st.integers(0, 1), min_size=4, max_size=400).filter(lambda b: len(b) % 4 == 0),
           st.sampled_from([4, 16]))
    @settings(max_examples=50, deadline=None)
    def test_round_trip_property(self, bits, order):
        np.testing.assert_array_equal(qam_demap(qam_map(bits, order), order), bits)

    def test_nearest_neighbour_under_small_noise(self):
        rng = np.random.default_rng(4)
        bits = rng.integers(0, 2, 4000)
        s = qam_map(bits, 16)
        noisy = s + 0.05 * (rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size))
        np.testing.assert_array_equal(qam_demap(noisy, 16), bits)

    def test_far_outliers_clip(self):
        out = qam_demap(np.array([10 + 10j, -10 - 10j]), 16)
        np.testing.assert_array_equal(out, qam_demap(qam_map(out, 16), 16))
