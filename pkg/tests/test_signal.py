import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays as np_arrays

from losq.signal import (
    NoiseModel,
    SignalError,
    SignVector,
    build_constellation,
    custom_constellation,
    enumerate_inputs,
    quantize_1bit,
    rng_stream,
    sample_received,
)
from losq.geometry import ula_positions

from conftest import make_channel


class TestConstellation:
    def test_qam4_points(self):
        c = build_constellation("qam4")
        want = {(1 + 1j), (1 - 1j), (-1 + 1j), (-1 - 1j)}
        got = {complex(np.round(p * np.sqrt(2), 12)) for p in c.points}
        assert got == want
        assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_qam16_grid(self):
        c = build_constellation("qam16")
        scaled = c.points * np.sqrt(10)
        assert {round(v, 9) for v in scaled.real} == {-3.0, -1.0, 1.0, 3.0}
        assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert c.size == 16

    def test_unknown_name(self):
        with pytest.raises(SignalError):
            build_constellation("qam32")

    def test_duplicate_points_rejected(self):
        with pytest.raises(SignalError):
            custom_constellation([1.0, 1.0])

    def test_power_must_be_unit(self):
        with pytest.raises(SignalError):
            custom_constellation([2.0, -2.0])


class TestEnsemble:
    def test_qam4_two_antennas(self):
        ens = enumerate_inputs(build_constellation("qam4"), 2)
        assert ens.size == 16
        np.testing.assert_allclose(ens.priors, 1 / 16)
        cov = np.einsum("k,ki,kj->ij", ens.priors, ens.vectors, ens.vectors.conj())
        np.testing.assert_allclose(cov, np.eye(2) / 2, atol=1e-12)

    def test_qam16_two_antennas_size(self):
        assert enumerate_inputs(build_constellation("qam16"), 2).size == 256

    def test_qam4_four_antennas_covariance(self):
        ens = enumerate_inputs(build_constellation("qam4"), 4)
        assert ens.size == 256
        cov = np.einsum("k,ki,kj->ij", ens.priors, ens.vectors, ens.vectors.conj())
        np.testing.assert_allclose(cov, np.eye(4) / 4, atol=1e-12)

    def test_lexicographic_order(self):
        c = build_constellation("qam4")
        ens = enumerate_inputs(c, 2)
        np.testing.assert_allclose(ens.vectors[0], np.array([c.points[0]] * 2) / np.sqrt(2))
        np.testing.assert_allclose(
            ens.vectors[1], np.array([c.points[0], c.points[1]]) / np.sqrt(2)
        )

    def test_cap(self):
        with pytest.raises(SignalError):
            enumerate_inputs(build_constellation("qam16"), 5)  # 16^5 > 65536


class TestNoise:
    def test_snr_round_trip_is_exact(self):
        for snr in (-5.0, -2.0, 7.0, 25.0, 0.1):
            assert NoiseModel.from_snr_db(snr).snr_db == snr

    def test_sigma2_from_snr(self):
        assert NoiseModel.from_snr_db(0.0).sigma2 == pytest.approx(1.0)
        assert NoiseModel.from_snr_db(10.0).sigma2 == pytest.approx(0.1)

    def test_rejects_nonpositive_variance(self):
        with pytest.raises(SignalError):
            NoiseModel(0.0)


class TestQuantizer:
    def test_componentwise_signs(self):
        sv = quantize_1bit([1 + 2j, -0.3 - 0.0001j])
        np.testing.assert_array_equal(sv.signs, [[1, 1], [-1, -1]])

    def test_zero_maps_to_plus_one(self):
        sv = quantize_1bit([0.0 + 0.0j, -5 + 0j])
        np.testing.assert_array_equal(sv.signs, [[1, 1], [-1, 1]])

    def test_rejects_nonfinite(self):
        with pytest.raises(SignalError):
            quantize_1bit([np.inf + 0j])

    @given(
        np_arrays(np.complex128, 4,
                  elements=st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e6,
                                              allow_nan=False, allow_infinity=False)),
        st.floats(min_value=1e-6, max_value=1e6),
    )
    def test_positive_scale_invariance(self, y, c):
        np.testing.assert_array_equal(quantize_1bit(c * y).signs, quantize_1bit(y).signs)

    @given(
        np_arrays(np.complex128, 5,
                  elements=st.complex_numbers(min_magnitude=1e-9, max_magnitude=1e6,
                                              allow_nan=False, allow_infinity=False)),
    )
    def test_negation_flips_nonzero_components(self, y):
        a, b = quantize_1bit(y).signs, quantize_1bit(-y).signs
        re_im = np.stack([y.real, y.imag], axis=1)
        flipped = re_im != 0
        np.testing.assert_array_equal(b[flipped], -a[flipped])
        np.testing.assert_array_equal(b[~flipped], a[~flipped])


class TestSignVectorIndex:
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    def test_pack_unpack_bijection_exhaustive(self, m):
        seen = set()
        for idx in range(4**m):
            sv = SignVector.from_index(idx, m)
            assert sv.index == idx
            seen.add(tuple(sv.signs.ravel()))
        assert len(seen) == 4**m

    def test_index_out_of_range(self):
        with pytest.raises(SignalError):
            SignVector.from_index(16, 2)

    def test_quantize_roundtrip(self):
        y = np.array([1 + 1j, -2 + 3j, 0.5 - 0.5j])
        sv = quantize_1bit(y)
        np.testing.assert_array_equal(SignVector.from_index(sv.index, 3).signs, sv.signs)


class TestSampling:
    def test_zero_noise_limit(self):
        h = make_channel(ula_positions(0.5, 2), ula_positions(0.5, 4))
        x = np.array([0.3 + 0.1j, -0.2j])
        tiny = NoiseModel(1e-30)
        y = sample_received(h, x, tiny, rng_stream(0, "t"))
        np.testing.assert_allclose(y, h.entries @ x, atol=1e-12)

    def test_fixed_seed_is_bit_identical(self):
        h = make_channel(ula_positions(0.5, 2), ula_positions(0.5, 4))
        x = np.array([1.0, 1.0]) / np.sqrt(2)
        noise = NoiseModel.from_snr_db(10)
        y1 = sample_received(h, x, noise, rng_stream(7, "exp", 0))
        y2 = sample_received(h, x, noise, rng_stream(7, "exp", 0))
        np.testing.assert_array_equal(y1, y2)
        y3 = sample_received(h, x, noise, rng_stream(7, "exp", 1))
        assert not np.array_equal(y1, y3)

    def test_per_dimension_variance(self):
        # x = 0: each real dimension is N(0, sigma2 / 2); one million real
        # dimensions keep the 1% tolerance comfortable
        h = make_channel(ula_positions(0.5, 2), ula_positions(0.5, 50))
        x = np.zeros(2, complex)
        noise = NoiseModel(0.8)
        rng = rng_stream(123, "variance-check")
        draws = np.array([sample_received(h, x, noise, rng) for _ in range(10_000)])
        dims = np.concatenate([draws.real.ravel(), draws.imag.ravel()])
        assert dims.size == 1_000_000
        assert abs(dims.mean()) < 3e-3
        assert dims.var() == pytest.approx(noise.sigma2 / 2, rel=0.01)

    def test_dimension_mismatch(self):
        h = make_channel(ula_positions(0.5, 2), ula_positions(0.5, 4))
        with pytest.raises(SignalError):
            sample_received(h, np.ones(3), NoiseModel(1.0), rng_stream(0, "x"))


def test_rng_streams_are_independent_and_stable():
    a = rng_stream(5, "exp", 0, 0).standard_normal(4)
    b = rng_stream(5, "exp", 0, 0).standard_normal(4)
    c = rng_stream(5, "exp", 0, 1).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
