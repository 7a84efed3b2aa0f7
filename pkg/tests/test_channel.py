import numpy as np
import pytest

from sefdm_mimo.beamforming import DEFAULT_CODEBOOK, array_response
from sefdm_mimo.channel import (SPEED_OF_LIGHT, FullChannel, Geometry, analog_matrix,
                                default_user_positions, effective_channel, los_channel,
                                reference_scale, transmit, ula_positions,
                                user_positions_at_angles)
from sefdm_mimo.errors import GeometryError, ShapeError

LAM = SPEED_OF_LIGHT / 2.4e9


class TestGeometry:
    def test_spacing(self):
        g = Geometry.ula(6, default_user_positions())
        np.testing.assert_allclose(np.diff(g.tx_positions[:, 0]), LAM / 2, atol=1e-12)
        assert g.tx_positions[:, 0].mean() == pytest.approx(0.0, abs=1e-15)

    def test_default_users(self):
        u = default_user_positions()
        assert np.linalg.norm(u[0] - u[1]) == pytest.approx(1.1)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 2.0)

    def test_bad_spacing(self):
        with pytest.raises(GeometryError):
            Geometry(ula_positions(3, LAM, 0.6), [[0, 2.0]])

    def test_user_on_antenna(self):
        with pytest.raises(GeometryError):
            Geometry(ula_positions(1, LAM), [[0.0, 0.0]])

    def test_users_too_close(self):
        with pytest.raises(GeometryError):
            default_user_positions(range_m=0.5, separation_m=1.1)


class TestLosChannel:
    def test_single_antenna_at_one_wavelength(self):
        h = los_channel(Geometry(np.zeros((1, 2)), [[0.0, LAM]])).entries[0, 0]
        assert abs(h) == pytest.approx(1 / LAM)
        assert np.angle(h) == pytest.approx(0.0, abs=1e-9)

    def test_inverse_range(self):
        h1 = los_channel(Geometry(np.zeros((1, 2)), [[0.0, 1.0]])).entries
        h2 = los_channel(Geometry(np.zeros((1, 2)), [[0.0, 2.0]])).entries
        assert abs(h2[0, 0]) == pytest.approx(abs(h1[0, 0]) / 2)

    def test_far_broadside_matches_steering(self):
        g = Geometry.ula(3, user_positions_at_angles([0.0], 1e6))
        h = los_channel(g).entries[0]
        phase = np.angle(h / h[0])
        steer = np.angle(np.exp(2j * np.pi * 0.5 * np.arange(3) * np.sin(0.0)))
        np.testing.assert_allclose(phase, steer, atol=1e-6)

    def test_far_field_matches_array_response(self):
        # at long range the plane-wave array factor and the spherical model agree
        g = Geometry.ula(3, user_positions_at_angles([20.0], 1e5))
        h = los_channel(g).entries[0]
        for p in range(7):
            w = DEFAULT_CODEBOOK.weights(p)
            assert abs(h @ w) / abs(h[0]) == pytest.approx(abs(array_response(w, 20.0)), abs=1e-4)

    def test_deterministic(self):
        g = Geometry.ula(6, default_user_positions())
        np.testing.assert_array_equal(los_channel(g, seed=1, k_factor=3).entries,
                                      los_channel(g, seed=1, k_factor=3).entries)
        assert np.all(np.isfinite(los_channel(g).entries))

    def test_rician_differs_from_los(self):
        g = Geometry.ula(6, default_user_positions())
        assert not np.allclose(los_channel(g, seed=1, k_factor=1).entries, los_channel(g).entries)

    def test_reference_scale(self):
        users = default_user_positions()
        ref = los_channel(Geometry.ula(2, users)).entries * reference_scale(users)
        assert np.mean(np.abs(ref) ** 2) == pytest.approx(1.0)


class TestEffectiveChannel:
    def test_coherent_sum(self):
        H = FullChannel(np.ones((2, 6), dtype=complex))
        out = effective_channel(H, [np.ones(3), np.ones(3)])
        np.testing.assert_allclose(out.entries, np.full((2, 2), 3.0))

    def test_patterns_differ(self):
        H = los_channel(Geometry.ula(6, default_user_positions()))
        a = effective_channel(H, [DEFAULT_CODEBOOK.weights(0)] * 2).entries
        b = effective_channel(H, [DEFAULT_CODEBOOK.weights(3)] * 2).entries
        assert not np.allclose(a, b)

    def test_sweep_picks_pattern_two_at_plus_20(self):
        users = user_positions_at_angles([-20.0, 20.0], 2.0)
        H = los_channel(Geometry.ula(6, users))
        own = [abs(effective_channel(H, [DEFAULT_CODEBOOK.weights(p)] * 2).entries[1, 1])
               for p in range(7)]
        assert int(np.argmax(own)) == 2

    def test_gain_and_shape(self):
        H = FullChannel(np.ones((2, 6), dtype=complex))
        np.testing.assert_allclose(effective_channel(H, [np.ones(3)] * 2, gain=0.5).entries, 1.5)
        with pytest.raises(ShapeError):
            effective_channel(H, [np.ones(2)] * 2)

    def test_analog_matrix_block_structure(self):
        A = analog_matrix([np.ones(3), 2 * np.ones(3)], 6)
        assert A.shape == (6, 2)
        np.testing.assert_array_equal(A[:3, 1], 0)
        np.testing.assert_array_equal(A[3:, 1], 2)


class TestTransmit:
    def setup_method(self):
        self.H = FullChannel(np.array([[1.0, 0.5j], [0.2, -1.0]]))

    def test_noiseless(self):
        tx = np.random.default_rng(0).standard_normal((2, 50)) + 0j
        np.testing.assert_array_equal(transmit(tx, self.H, np.inf), self.H.entries @ tx)

    def test_noise_variance(self):
        rx = transmit(np.zeros((2, 100_000)), self.H, 10.0, rng=1, signal_power=1.0)
        assert np.var(rx[0]) == pytest.approx(0.1, rel=0.05)
        assert np.var(rx[1]) == pytest.approx(0.1, rel=0.05)

    def test_measured_reference(self):
        rng = np.random.default_rng(5)
        tx = rng.standard_normal((2, 100_000)) + 0j
        clean = transmit(tx, self.H, np.inf)
        noise = transmit(tx, self.H, 20.0, rng=2) - clean
        p = np.mean(np.abs(clean) ** 2, axis=1)
        np.testing.assert_allclose(np.var(noise, axis=1), p / 100, rtol=0.05)

    def test_seed_determinism(self):
        tx = np.ones((2, 64), dtype=complex)
        np.testing.assert_array_equal(transmit(tx, self.H, 5.0, rng=9), transmit(tx, self.H, 5.0, rng=9))

    def test_linearity_noiseless(self):
        tx = np.random.default_rng(1).standard_normal((2, 30)) + 0j
        np.testing.assert_allclose(transmit(3 * tx, self.H, np.inf), 3 * transmit(tx, self.H, np.inf))

    def test_shape(self):
        with pytest.raises(ShapeError):
            transmit(np.ones((3, 10)), self.H, np.inf)

    def test_nan_snr(self):
        with pytest.raises(ValueError):
            transmit(np.ones((2, 10)), self.H, np.nan, rng=0)
