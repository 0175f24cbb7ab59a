"""MSE, the DFT wrapper, and Fourier ring correlation."""

import numpy as np
import pytest

from nfpr.metrics import FrcCurve, dft2, frc, mse, write_frc_csv
from oracles import naive_dft2, naive_frc_from_spectra, naive_mse
from synthetic import rand_image


class TestMse:
    def test_identical_images(self):
        img = rand_image(np.random.default_rng(1), 6, 6)
        assert mse(img, img) == 0.0

    def test_hand_computed_value(self):
        assert mse(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == 12.5

    def test_symmetry_and_quadratic_scaling(self):
        rng = np.random.default_rng(2)
        a, b = rand_image(rng, 5, 7), rand_image(rng, 5, 7)
        assert mse(a, b) == mse(b, a)
        assert mse(3 * a, 3 * b) == pytest.approx(9 * mse(a, b), rel=1e-12)

    def test_matches_naive(self):
        rng = np.random.default_rng(3)
        a, b = rand_image(rng, 8, 8), rand_image(rng, 8, 8)
        assert mse(a, b) == pytest.approx(naive_mse(a.tolist(), b.tolist()), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestDft2:
    def test_constant_image(self):
        spec = dft2(np.full((4, 4), 3.0))
        assert spec[0, 0] == pytest.approx(48.0)
        spec[0, 0] = 0
        np.testing.assert_allclose(np.abs(spec), 0.0, atol=1e-9)

    def test_unit_impulse_is_flat(self):
        img = np.zeros((4, 4))
        img[0, 0] = 1.0
        np.testing.assert_allclose(dft2(img), np.ones((4, 4)), atol=1e-12)

    def test_matches_naive_dft(self):
        img = rand_image(np.random.default_rng(4), 8, 8)
        expected = np.array(naive_dft2(img.tolist()))
        np.testing.assert_allclose(dft2(img), expected, atol=1e-9)


class TestFrc:
    def test_self_correlation_is_one(self):
        img = rand_image(np.random.default_rng(5), 16, 16)
        curve = frc(img, img, levels=8)
        assert isinstance(curve, FrcCurve)
        ok = ~curve.degenerate
        assert ok.any()
        np.testing.assert_allclose(curve.corr[ok], 1.0, atol=1e-9)

    def test_negated_image_gives_minus_one(self):
        img = rand_image(np.random.default_rng(6), 16, 16)
        curve = frc(img, -img, levels=8)
        ok = ~curve.degenerate
        np.testing.assert_allclose(curve.corr[ok], -1.0, atol=1e-9)

    def test_bounded_by_one(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            curve = frc(rand_image(rng, 12, 12), rand_image(rng, 12, 12), levels=6)
            assert np.all(np.abs(curve.corr) <= 1.0 + 1e-9)

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(8)
        a, b = rand_image(rng, 16, 16), rand_image(rng, 16, 16)
        np.testing.assert_allclose(frc(a, b, 8).corr, frc(b, a, 8).corr, atol=1e-12)

    def test_invariant_under_common_positive_scaling(self):
        rng = np.random.default_rng(9)
        a, b = rand_image(rng, 16, 16), rand_image(rng, 16, 16)
        np.testing.assert_allclose(frc(7.5 * a, 7.5 * b, 8).corr, frc(a, b, 8).corr,
                                   atol=1e-12)

    def test_default_levels_is_64(self):
        img = rand_image(np.random.default_rng(10), 16, 16)
        curve = frc(img, img)
        assert curve.levels == 64 and len(curve) == 64

    def test_frequencies_strictly_increasing_up_to_nyquist(self):
        curve = frc(np.ones((8, 8)), np.ones((8, 8)), levels=5)
        assert np.all(np.diff(curve.freq) > 0)
        assert 0.0 < curve.freq[0] and curve.freq[-1] < 0.5
        assert curve.n_bins.sum() > 0

    def test_empty_rings_are_flagged_not_poisoned(self):
        # 64 levels on an 8x8 grid leaves most rings without any lattice point
        img = rand_image(np.random.default_rng(11), 8, 8)
        curve = frc(img, img, levels=64)
        assert curve.degenerate.sum() > 0
        np.testing.assert_array_equal(curve.corr[curve.degenerate], 0.0)
        assert np.all(curve.n_bins[curve.corr != 0] > 0)

    def test_all_bins_land_in_some_ring(self):
        # every non-DC bin inside Nyquist is counted exactly once
        n = 16
        curve = frc(np.ones((n, n)), np.ones((n, n)), levels=4)
        k = ((np.arange(n) + n // 2) % n) - n // 2
        r2 = k[:, None] ** 2 + k[None, :] ** 2
        inside = (r2 > 0) & (r2 <= (0.5 * n) ** 2)
        assert curve.n_bins.sum() == inside.sum()

    @pytest.mark.parametrize("n,levels", [(8, 4), (8, 8), (12, 5), (16, 64)])
    def test_matches_per_bin_accumulation_oracle(self, n, levels):
        rng = np.random.default_rng(12)
        a, b = rand_image(rng, n, n), rand_image(rng, n, n)
        curve = frc(a, b, levels=levels)
        fa = np.fft.fft2(a)
        fb = np.fft.fft2(b)
        corr, cnt = naive_frc_from_spectra(
            [list(row) for row in fa], [list(row) for row in fb], levels)
        np.testing.assert_array_equal(curve.n_bins, cnt)
        np.testing.assert_allclose(curve.corr, corr, atol=1e-9)

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            frc(np.zeros((4, 6)), np.zeros((4, 6)))
        with pytest.raises(ValueError):
            frc(np.zeros((4, 4)), np.zeros((6, 6)))
        with pytest.raises(ValueError):
            frc(np.zeros((4, 4)), np.zeros((4, 4)), levels=0)


class TestFrcCsv:
    def test_roundtrip_parse(self, tmp_path):
        rng = np.random.default_rng(13)
        curve = frc(rand_image(rng, 16, 16), rand_image(rng, 16, 16), levels=8)
        path = tmp_path / "curve.csv"
        write_frc_csv(curve, path)

        lines = path.read_text().splitlines()
        comments = [ln for ln in lines if ln.startswith("#")]
        assert any("edges:" in ln for ln in comments)  # binning documented
        rows = [ln for ln in lines if ln and not ln.startswith("#")]
        assert rows[0] == "ring_index,freq_center,correlation,n_bins"
        data = [row.split(",") for row in rows[1:]]
        assert len(data) == 8
        got_corr = np.array([float(r[2]) for r in data])
        np.testing.assert_array_equal(got_corr, curve.corr)
        assert [int(r[0]) for r in data] == list(range(8))
        assert [int(r[3]) for r in data] == list(curve.n_bins)
