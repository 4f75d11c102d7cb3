"""Tests for Haar and p-adic wavelets (padic_series.wavelets)."""

import math

import numpy as np
import pytest

from padic_series.errors import InvalidLengthError, InvalidParameterError
from padic_series.models import SampledSeries, UltrametricIndex, WaveletIndex
from padic_series.wavelets import (
    analyze,
    coefficients_from_vector,
    forward,
    forward_dense,
    haar_eval,
    haar_project,
    inverse,
    monna_project,
    padic_wavelet_eval,
    pi_project,
    synthesize,
    wavelet_basis,
    wavelet_indices,
    wavelet_samples,
)

ROOT_HALF = 2**-0.5


def _series(values, p=2, level=0):
    return SampledSeries(p, level, np.asarray(values, dtype=float))


def _random_window(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


# ---------------------------------------------------------------------------
# Real Haar side
# ---------------------------------------------------------------------------


class TestHaar:
    def test_eval(self):
        assert haar_eval(1, 0, 0) == pytest.approx(ROOT_HALF)
        assert haar_eval(1, 0, 1) == pytest.approx(-ROOT_HALF)
        assert haar_eval(1, 0, 2) == 0

    def test_scale_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            haar_eval(0, 0, 0)

    def test_project(self):
        s = _series([1, 3, 5, 7])
        assert haar_project(s, 0).samples.real.tolist() == [1, 3, 5, 7]
        assert haar_project(s, 1).samples.real.tolist() == [2, 2, 6, 6]
        assert haar_project(s, 2).samples.real.tolist() == [4, 4, 4, 4]

    def test_nested_projections(self):
        rng = np.random.default_rng(0)
        s = _series(rng.integers(-50, 50, size=32))
        for j in range(4):
            for k in range(4):
                nested = haar_project(haar_project(s, j), k)
                assert np.array_equal(nested.samples, haar_project(s, max(j, k)).samples)

    def test_block_mismatch(self):
        with pytest.raises(InvalidLengthError):
            haar_project(_series([1, 2, 3]), 1)


class TestMonnaProjection:
    def test_binary_matches_haar(self):
        s = _series([1, 3, 5, 7])
        assert monna_project(s, 1).samples.real.tolist() == [2, 2, 6, 6]

    def test_ternary(self):
        s = _series(range(9), p=3)
        assert monna_project(s, 1).samples.real.tolist() == [1, 1, 1, 4, 4, 4, 7, 7, 7]

    def test_identity_at_zero(self):
        s = _series([4, -1, 2], p=3)
        assert np.array_equal(monna_project(s, 0).samples, s.samples)

    def test_haar_correspondence(self):
        rng = np.random.default_rng(1)
        s = _series(rng.integers(-100, 100, size=64))
        for j in range(7):
            assert np.array_equal(monna_project(s, j).samples, haar_project(s, j).samples)


class TestPiProjection:
    def test_block_means(self):
        out = pi_project(_series([2, 4, 10, 14]), 1)
        assert out.level == 1
        assert out.samples.real.tolist() == [3, 12]

    def test_two_levels(self):
        out = pi_project(_series([1, 1, 1, 1, 5, 5, 5, 5]), 2)
        assert out.samples.real.tolist() == [1, 5]

    def test_constant(self):
        out = pi_project(_series([7.0] * 9, p=3), 1)
        assert out.samples.real.tolist() == [7.0] * 3

    def test_target_must_be_coarser(self):
        with pytest.raises(InvalidParameterError):
            pi_project(_series([1, 2], p=2, level=1), 1)


# ---------------------------------------------------------------------------
# p-adic wavelets
# ---------------------------------------------------------------------------


class TestWaveletEval:
    def test_examples(self):
        w = WaveletIndex(1, 1, 0)
        assert padic_wavelet_eval(w, UltrametricIndex(2, 0), 3) == pytest.approx(ROOT_HALF)
        assert padic_wavelet_eval(w, UltrametricIndex(2, 1), 3) == pytest.approx(-ROOT_HALF)
        assert padic_wavelet_eval(w, UltrametricIndex(2, 2), 3) == 0

    def test_matches_haar_for_p2(self):
        J = 6
        for j in range(1, J + 1):
            for b in range(2 ** (J - j)):
                for x in range(2**J):
                    value = padic_wavelet_eval(WaveletIndex(1, j, b), UltrametricIndex(2, x), J)
                    assert abs(value - haar_eval(j, b, x)) <= 1e-12

    def test_matches_samples(self):
        for p, J in ((3, 3), (5, 2)):
            for w in wavelet_indices(p, J, 0):
                exact = [padic_wavelet_eval(w, UltrametricIndex(p, x), J) for x in range(p**J)]
                assert np.allclose(exact, wavelet_samples(p, J, 0, w), atol=1e-12)

    def test_invalid_wavelet(self):
        with pytest.raises(InvalidParameterError):
            padic_wavelet_eval(WaveletIndex(2, 1, 0), UltrametricIndex(2, 0), 3)


class TestBasis:
    @pytest.mark.parametrize("p,J", [(2, 6), (3, 4), (5, 3)])
    def test_orthonormal(self, p, J):
        basis = wavelet_basis(p, J)
        gram = basis.conj() @ basis.T
        assert np.abs(gram - np.eye(p**J)).max() <= 1e-12

    def test_orthonormal_at_level(self):
        basis = wavelet_basis(3, 4, level=2)
        assert basis.shape == (9, 9)
        assert np.abs(basis.conj() @ basis.T - np.eye(9)).max() <= 1e-12

    def test_details_sum_to_zero(self):
        for p, J in ((2, 5), (3, 3), (7, 2)):
            for w in wavelet_indices(p, J, 0):
                assert abs(wavelet_samples(p, J, 0, w).sum()) <= 1e-14

    def test_canonical_order(self):
        assert wavelet_indices(3, 2, 0)[:3] == [
            WaveletIndex(1, 1, 0),
            WaveletIndex(2, 1, 0),
            WaveletIndex(1, 1, 1),
        ]
        assert len(wavelet_indices(3, 2, 0)) == 8


class TestTransform:
    def test_delta(self):
        coeffs = forward(SampledSeries(2, 0, [1.0, 0.0]))
        assert coeffs.mean == pytest.approx(ROOT_HALF)
        assert coeffs[WaveletIndex(1, 1, 0)] == pytest.approx(ROOT_HALF)

    def test_constant(self):
        p, J, level = 3, 4, 1
        coeffs = forward(SampledSeries(p, level, np.full(p ** (J - level), 2.5)))
        assert coeffs.J == J
        assert coeffs.mean == pytest.approx(2.5 * p ** ((J - level) / 2))
        for _, c in coeffs.items():
            assert abs(c) <= 1e-12

    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        window = SampledSeries(3, 0, _random_window(rng, 27))
        back = inverse(forward(window))
        assert np.abs(back.samples - window.samples).max() <= 1e-12

    def test_fast_matches_dense(self):
        rng = np.random.default_rng(4)
        for p, n, level in ((2, 32, 0), (3, 27, 1), (5, 25, 0)):
            window = SampledSeries(p, level, _random_window(rng, n))
            fast, dense = forward(window), forward_dense(window)
            assert np.abs(fast.to_vector() - dense.to_vector()).max() <= 1e-12

    def test_parseval(self):
        rng = np.random.default_rng(6)
        window = SampledSeries(2, 0, _random_window(rng, 64))
        energy = float(np.sum(np.abs(window.samples) ** 2))
        assert forward(window).energy() == pytest.approx(energy, rel=1e-12)

    def test_vector_roundtrip(self):
        rng = np.random.default_rng(8)
        window = SampledSeries(3, 0, _random_window(rng, 9))
        coeffs = forward(window)
        again = coefficients_from_vector(coeffs.to_vector(), 3, coeffs.J)
        assert np.array_equal(again.to_vector(), coeffs.to_vector())
        assert len(coeffs) == 9

    def test_batch_axes(self):
        rng = np.random.default_rng(9)
        batch = _random_window(rng, 5 * 16).reshape(5, 16)
        mean, details = analyze(batch, 2)
        assert mean.shape == (5,)
        assert details[1].shape == (5, 8, 1)
        for row in range(5):
            single = forward(SampledSeries(2, 0, batch[row]))
            assert mean[row] == pytest.approx(single.mean)
        assert np.abs(synthesize(mean, details, 2) - batch).max() <= 1e-12

    def test_length_must_be_power(self):
        with pytest.raises(InvalidLengthError):
            forward(SampledSeries(3, 0, np.ones(10)))

    def test_coefficient_lookup(self):
        coeffs = forward(SampledSeries(2, 0, np.arange(8.0)))
        with pytest.raises(KeyError):
            coeffs[WaveletIndex(1, 4, 0)]
        expected = np.vdot(wavelet_samples(2, 3, 0, WaveletIndex(1, 2, 1)), np.arange(8.0))
        assert coeffs[WaveletIndex(1, 2, 1)] == pytest.approx(expected)
        assert math.isclose(abs(coeffs.mean), 28 / math.sqrt(8))
