"""Per-series summary features and the two feature catalogs.

Oracles: autocorrelation against the direct centered-ratio formula,
partial autocorrelation against explicitly solved Yule-Walker systems,
spectral magnitudes against a literal O(n^2) transform, and exponential
smoothing parameters against a brute-force grid scan.
"""

import numpy as np
import pytest

from clustercast.core import Dataset, Schema, SeriesRecord
from clustercast.errors import TooShort, ZeroVariance
from clustercast.features import (
    CATALOG_A,
    CATALOG_B,
    CWT_WIDTHS,
    HOLT_GRID,
    acf,
    build_feature_matrix,
    cwt_mean_abs,
    fft_magnitudes,
    fit_holt,
    holt_sse,
    method_a,
    method_b,
    pacf,
    spectral_entropy,
    stability,
)


def ar1(phi, n, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, scale, size=n + 200)
    x = np.zeros(n + 200)
    for t in range(1, n + 200):
        x[t] = phi * x[t - 1] + eps[t]
    return x[200:]


def acf_direct(x, k):
    """Lag-k autocorrelation written out longhand."""
    m = x.mean()
    c = x - m
    return float(np.sum(c[:-k] * c[k:]) / np.sum(c * c))


def pacf_yule_walker(x, max_lag):
    """Last coefficient of each explicitly solved Yule-Walker system."""
    r = acf(x, max_lag)
    full = np.concatenate([[1.0], r])
    out = []
    for k in range(1, max_lag + 1):
        toeplitz = np.array([[full[abs(i - j)] for j in range(k)] for i in range(k)])
        phi = np.linalg.solve(toeplitz, r[:k])
        out.append(phi[-1])
    return np.array(out)


class TestAcf:
    def test_matches_direct_formula(self):
        x = ar1(0.6, 400, seed=1)
        got = acf(x, 10)
        assert got.shape == (10,)
        for k in range(1, 11):
            assert got[k - 1] == pytest.approx(acf_direct(x, k), abs=1e-12)

    def test_ar1_theoretical_decay(self):
        x = ar1(0.8, 10_000, seed=2)
        got = acf(x, 3)
        assert got[0] == pytest.approx(0.8, abs=0.05)
        assert got[1] == pytest.approx(0.64, abs=0.05)

    def test_lag_bounds(self):
        with pytest.raises(Exception):
            acf(np.arange(5.0), 0)
        with pytest.raises(Exception):
            acf(np.arange(5.0), 5)

    def test_constant_series_rejected(self):
        with pytest.raises(ZeroVariance):
            acf(np.full(20, 3.0), 2)


class TestPacf:
    def test_first_lag_equals_acf(self):
        x = ar1(0.5, 300, seed=3)
        assert pacf(x, 1)[0] == acf(x, 1)[0]

    def test_matches_yule_walker_solve(self):
        x = ar1(0.7, 500, seed=4)
        got = pacf(x, 6)
        want = pacf_yule_walker(x, 6)
        assert np.allclose(got, want, atol=1e-8)

    def test_ar1_cuts_off_after_lag_one(self):
        x = ar1(0.8, 10_000, seed=5)
        p = pacf(x, 2)
        assert p[0] == pytest.approx(0.8, abs=0.05)
        assert p[1] == pytest.approx(0.0, abs=0.05)


class TestSpectralEntropy:
    def test_white_noise_is_nearly_flat(self):
        x = np.random.default_rng(6).normal(size=4096)
        assert spectral_entropy(x) > 0.9

    def test_pure_tone_is_concentrated(self):
        t = np.arange(512)
        x = np.sin(2 * np.pi * 16 * t / 512)
        assert spectral_entropy(x) < 0.2

    def test_bounds(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            x = rng.normal(size=rng.integers(16, 200))
            assert 0.0 <= spectral_entropy(x) <= 1.0 + 1e-12

    def test_short_series_rejected(self):
        with pytest.raises(TooShort):
            spectral_entropy(np.arange(3.0))


class TestStability:
    def test_constant_series_is_zero(self):
        assert stability(np.full(50, 4.0)) == 0.0

    def test_level_shift_beats_stationary(self):
        rng = np.random.default_rng(8)
        flat = rng.normal(10.0, 1.0, size=200)
        shifted = flat + np.repeat([0.0, 25.0], 100)
        assert stability(shifted) > stability(flat)

    def test_hand_value_two_tiles(self):
        # tiles [1,1] and [3,3] -> means 1, 3 -> population variance 1
        assert stability(np.array([1.0, 1.0, 3.0, 3.0]), n_tiles=2) == pytest.approx(1.0)


class TestHolt:
    def test_sse_near_zero_on_linear_series(self):
        x = 2.0 * np.arange(30.0) + 5.0
        alpha, beta = fit_holt(x)
        assert holt_sse(x, alpha, beta) == pytest.approx(0.0, abs=1e-16)

    def test_parameters_come_from_the_grid(self):
        x = ar1(0.4, 120, seed=9) + 50.0
        alpha, beta = fit_holt(x)
        assert alpha in HOLT_GRID
        assert beta in HOLT_GRID

    def test_matches_exhaustive_grid_scan(self):
        """First-occurrence argmin over the full grid, scanned longhand."""
        for seed in range(5):
            x = ar1(0.5, 80, seed=seed) + 20.0
            best = (np.inf, None, None)
            for a in HOLT_GRID:
                for b in HOLT_GRID:
                    s = holt_sse(x, a, b)
                    if s < best[0]:
                        best = (s, a, b)
            alpha, beta = fit_holt(x)
            assert (alpha, beta) == (best[1], best[2])

    def test_sse_oracle_recurrence(self):
        """holt_sse agrees with a literal level/trend recurrence."""
        x = ar1(0.3, 60, seed=10) + 10.0
        for alpha, beta in [(0.2, 0.1), (0.5, 0.5), (1.0, 0.0)]:
            level, trend = x[0], x[1] - x[0]
            sse = 0.0
            for t in range(1, len(x)):
                pred = level + trend
                err = x[t] - pred
                sse += err * err
                new_level = alpha * x[t] + (1 - alpha) * (level + trend)
                trend = beta * (new_level - level) + (1 - beta) * trend
                level = new_level
            assert holt_sse(x, alpha, beta) == pytest.approx(sse, rel=1e-12)

    def test_too_short_rejected(self):
        with pytest.raises(TooShort):
            fit_holt(np.array([1.0, 2.0]))


class TestFftMagnitudes:
    def naive_padded_dft_mags(self, x, n_coeffs):
        """Literal O(n^2) transform of the demeaned, power-of-two padded series."""
        x = np.asarray(x, dtype=float)
        x = x - x.mean()
        size = 1 << max(4, (len(x) - 1).bit_length())
        padded = np.zeros(size)
        padded[: len(x)] = x
        n = len(padded)
        mags = []
        for k in range(1, n_coeffs + 1):
            re = sum(padded[t] * np.cos(-2 * np.pi * k * t / n) for t in range(n))
            im = sum(padded[t] * np.sin(-2 * np.pi * k * t / n) for t in range(n))
            mags.append(np.hypot(re, im))
        return np.array(mags)

    def test_matches_naive_transform(self):
        rng = np.random.default_rng(11)
        for _ in range(6):
            x = rng.normal(size=int(rng.integers(16, 200)))
            got = fft_magnitudes(x, 5)
            want = self.naive_padded_dft_mags(x, 5)
            assert np.allclose(got, want, atol=1e-8)

    def test_single_tone_lands_in_one_bin(self):
        t = np.arange(64)
        x = np.cos(2 * np.pi * 3 * t / 64)
        mags = fft_magnitudes(x, 5)
        assert mags.argmax() == 2  # bin for k=3 sits at index 2 (bins start at k=1)
        assert mags[2] == pytest.approx(32.0, rel=1e-9)


class TestCwt:
    def brute_force(self, x, width):
        """Same wavelet response computed with explicit loops."""
        n = len(x)
        klen = min(10 * int(width), n)
        t = np.arange(klen) - (klen - 1) / 2.0
        amp = 2.0 / (np.sqrt(3.0 * width) * np.pi**0.25)
        kernel = amp * (1 - (t / width) ** 2) * np.exp(-(t**2) / (2 * width**2))
        conv = np.convolve(x, kernel, mode="same")
        return float(np.mean(np.abs(conv)))

    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=150)
        for w in CWT_WIDTHS:
            assert cwt_mean_abs(x, w) == pytest.approx(self.brute_force(x, w), rel=1e-10)

    def test_responds_to_matching_scale(self):
        t = np.arange(400)
        slow = np.sin(2 * np.pi * t / 80)
        fast = np.sin(2 * np.pi * t / 8)
        # the wide wavelet prefers the slow oscillation and vice versa
        assert cwt_mean_abs(slow, 20) > cwt_mean_abs(fast, 20)
        assert cwt_mean_abs(fast, 2) > cwt_mean_abs(slow, 2)


class TestCatalogVectors:
    def test_method_a_names_and_order(self):
        x = ar1(0.5, 100, seed=13) + 30.0
        fv = method_a(x)
        assert fv.catalog == "A"
        assert fv.names == CATALOG_A
        assert len(fv.values) == 8
        assert np.isfinite(fv.values).all()
        assert fv.values[1] == acf(x, 1)[0]
        assert fv.values[5] == stability(x)

    def test_method_b_names_and_order(self):
        x = ar1(0.5, 100, seed=14) + 30.0
        fv = method_b(x)
        assert fv.catalog == "B"
        assert fv.names == CATALOG_B
        assert len(fv.values) == 14
        assert fv.values[0] == pytest.approx(np.sum(x * x))  # abs_energy
        assert fv.values[1] == pytest.approx(x.mean())
        assert fv.values[2] == pytest.approx(x.var())

    def test_method_b_moment_features_on_known_shapes(self):
        rng = np.random.default_rng(15)
        x = rng.normal(size=20_000)
        fv = method_b(x)
        skew, kurt = fv.values[3], fv.values[4]
        assert skew == pytest.approx(0.0, abs=0.1)
        assert kurt == pytest.approx(0.0, abs=0.1)  # excess kurtosis

    def test_constant_series_falls_back_with_warning(self):
        fv = method_a(np.full(60, 5.0))
        assert np.array_equal(fv.values, np.zeros(8))
        assert fv.warnings
        fvb = method_b(np.full(60, 5.0))
        assert any("skew" in w or "constant" in w.lower() for w in fvb.warnings)

    def test_short_series_rejected(self):
        with pytest.raises(TooShort):
            method_a(np.arange(5.0))
        with pytest.raises(TooShort):
            method_b(np.arange(3.0))

    def test_nan_rejected(self):
        x = np.arange(60.0)
        x[3] = np.nan
        with pytest.raises(ValueError):
            method_a(x)


class TestBuildFeatureMatrix:
    def make_dataset(self, n=6, length=80, cols=("p", "q")):
        rng = np.random.default_rng(16)
        records = []
        for i in range(n):
            data = {c: rng.normal(50.0, 5.0, size=length).cumsum() / 10 + 20 for c in cols}
            records.append(SeriesRecord(f"r{i}", data, np.zeros(0)))
        return Dataset(tuple(records), Schema(tuple(cols), length, 0))

    def test_shape_names_and_standardization(self):
        ds = self.make_dataset()
        fm = build_feature_matrix(ds, "A")
        assert fm.values.shape == (6, 2 * len(CATALOG_A))
        assert fm.feature_names[0] == "p__spectral_entropy"
        assert fm.feature_names[len(CATALOG_A)] == "q__spectral_entropy"
        assert fm.record_ids == tuple(f"r{i}" for i in range(6))
        # standardized: columns have mean 0 and spread 1 unless degenerate
        mean = fm.values.mean(axis=0)
        std = fm.values.std(axis=0)
        assert np.allclose(mean, 0.0, atol=1e-9)
        for s in std:
            assert s == pytest.approx(1.0, abs=1e-9) or s == pytest.approx(0.0, abs=1e-9)

    def test_measurement_selection_subsets_columns(self):
        ds = self.make_dataset()
        fm = build_feature_matrix(ds, "B", measurement_selection=["q"])
        assert fm.values.shape == (6, len(CATALOG_B))
        assert all(name.startswith("q__") for name in fm.feature_names)

    def test_catalog_b_selected(self):
        ds = self.make_dataset(n=4)
        fm = build_feature_matrix(ds, "B")
        assert fm.catalog == "B"
        assert fm.seconds >= 0.0

    def test_unknown_catalog_and_column_rejected(self):
        ds = self.make_dataset(n=3)
        with pytest.raises(Exception):
            build_feature_matrix(ds, "C")
        with pytest.raises(Exception):
            build_feature_matrix(ds, "A", measurement_selection=["nope"])

    def test_warning_rows_are_prefixed_with_record_and_column(self):
        length = 80
        rng = np.random.default_rng(17)
        rec_ok = SeriesRecord("good", {"p": rng.normal(size=length) + 10}, np.zeros(0))
        rec_flat = SeriesRecord("flat", {"p": np.full(length, 2.0)}, np.zeros(0))
        ds = Dataset((rec_ok, rec_flat), Schema(("p",), length, 0))
        fm = build_feature_matrix(ds, "A")
        assert fm.warnings
        assert all(w.startswith("flat/p: ") for w in fm.warnings)
