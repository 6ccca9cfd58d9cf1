"""Smoothing, anomaly detection, repair, and imputation."""

import dataclasses

import numpy as np
import pytest

from clustercast.datagen import desk_config, generate_dataset
from clustercast.errors import AllMissing, BadSpan, TooShort
from clustercast.preprocess import (
    clean_dataset,
    clean_series,
    decompose,
    detect_outliers,
    impute,
    loess_smooth,
    repair,
)


class TestLoess:
    def test_reproduces_a_line_exactly(self):
        """Local degree-1 fits recover any affine signal to round-off."""
        x = 3.0 * np.arange(80, dtype=float) - 7.0
        sm = loess_smooth(x, span_fraction=0.3)
        assert np.allclose(sm, x, atol=1e-8)

    def test_flattens_noise_toward_trend(self):
        rng = np.random.default_rng(0)
        trend = np.linspace(0.0, 10.0, 400)
        noisy = trend + rng.normal(0.0, 1.0, size=400)
        sm = loess_smooth(noisy, span_fraction=0.25)
        assert np.mean((sm - trend) ** 2) < 0.25 * np.mean((noisy - trend) ** 2)

    def test_rejects_bad_span(self):
        with pytest.raises(BadSpan):
            loess_smooth(np.arange(10.0), span_fraction=0.0)
        with pytest.raises(BadSpan):
            loess_smooth(np.arange(10.0), span_fraction=1.5)


class TestDecompose:
    def test_components_sum_to_original(self):
        rng = np.random.default_rng(1)
        x = np.linspace(0, 5, 120) + np.sin(np.arange(120) * 2 * np.pi / 12) + rng.normal(0, 0.1, 120)
        d = decompose(x, period=12)
        assert np.allclose(d.trend + d.seasonal + d.remainder, x, atol=1e-9)

    def test_without_period_seasonal_is_zero(self):
        x = np.arange(60, dtype=float)
        d = decompose(x)
        assert np.array_equal(d.seasonal, np.zeros(60))


class TestDetectAndRepair:
    def test_planted_spike_and_zero_are_flagged(self):
        rng = np.random.default_rng(2)
        x = rng.normal(100.0, 2.0, size=300)
        x[50] = 400.0
        x[200] = 0.0
        report = detect_outliers(x)
        assert 50 in report.flagged
        assert 200 in report.flagged
        assert report.lower < report.upper

    def test_smooth_series_mostly_unflagged(self):
        x = np.linspace(10.0, 20.0, 200) + np.sin(np.arange(200) / 7.0)
        report = detect_outliers(x)
        assert len(report.flagged) <= 2

    def test_repair_interpolates_between_clean_neighbors(self):
        out = repair(np.array([1.0, 2.0, 100.0, 4.0, 5.0]), np.array([2]))
        assert np.array_equal(out, [1.0, 2.0, 3.0, 4.0, 5.0])

    def test_repair_at_edges_uses_nearest_clean_value(self):
        out = repair(np.array([99.0, 2.0, 3.0, 4.0]), np.array([0]))
        assert np.array_equal(out, [2.0, 2.0, 3.0, 4.0])
        out = repair(np.array([1.0, 2.0, 3.0, 99.0]), np.array([3]))
        assert np.array_equal(out, [1.0, 2.0, 3.0, 3.0])

    def test_repair_with_no_flags_returns_copy(self):
        x = np.array([1.0, 2.0, 3.0])
        out = repair(x, [])
        assert np.array_equal(out, x)
        out[0] = 99.0
        assert x[0] == 1.0

    def test_clean_series_returns_repaired_and_report(self):
        rng = np.random.default_rng(3)
        x = rng.normal(50.0, 1.0, size=250)
        x[100] = 500.0
        fixed, report = clean_series(x)
        assert 100 in report.flagged
        assert abs(fixed[100] - 50.0) < 10.0
        assert report.replacements is not None
        assert len(report.replacements) == len(report.flagged)

    def test_too_short_series_rejected(self):
        with pytest.raises(TooShort):
            clean_series(np.ones(3))

    def test_detection_on_generated_data_with_known_truth(self):
        """Injected spikes/zeros are recovered well on one generated record."""
        cfg = dataclasses.replace(desk_config(seed=11), n_records=2, length=200)
        ds, log = generate_dataset(cfg)
        rec = ds.records[0]
        col = ds.schema.columns[0]
        truth = {e.index for e in log.entries[(rec.id, col)]}
        report = detect_outliers(rec.measurements[col])
        found = set(report.flagged.tolist())
        recall = len(truth & found) / len(truth)
        fp_rate = len(found - truth) / (cfg.length - len(truth))
        assert recall >= 0.8
        assert fp_rate <= 0.05


class TestCleanDataset:
    def test_cleans_all_columns_by_default(self, tiny_dataset):
        ds, log = tiny_dataset
        cleaned, reports = clean_dataset(ds)
        assert set(reports) == {
            (r.id, c) for r in ds.records for c in ds.schema.columns
        }
        assert cleaned.schema == ds.schema

    def test_selected_columns_only(self, tiny_dataset):
        ds, _ = tiny_dataset
        col = ds.schema.columns[0]
        cleaned, reports = clean_dataset(ds, columns=[col])
        assert set(c for _, c in reports) == {col}
        other = ds.schema.columns[1]
        assert np.array_equal(
            cleaned.records[0].measurements[other], ds.records[0].measurements[other]
        )

    def test_unknown_column_rejected(self, tiny_dataset):
        ds, _ = tiny_dataset
        with pytest.raises(ValueError):
            clean_dataset(ds, columns=["nope"])


class TestImpute:
    def make_gappy(self):
        return np.array([np.nan, 2.0, np.nan, np.nan, 8.0, np.nan])

    def test_linear_interpolation(self):
        out = impute(self.make_gappy(), "linear_interpolation")
        assert np.array_equal(out, [2.0, 2.0, 4.0, 6.0, 8.0, 8.0])

    def test_locf_with_head_fallback(self):
        out = impute(self.make_gappy(), "locf")
        assert np.array_equal(out, [2.0, 2.0, 2.0, 2.0, 8.0, 8.0])

    def test_nocb_with_tail_fallback(self):
        out = impute(self.make_gappy(), "nocb")
        assert np.array_equal(out, [2.0, 2.0, 8.0, 8.0, 8.0, 8.0])

    def test_moving_average_uses_observed_neighbors_only(self):
        out = impute(self.make_gappy(), "moving_average", window=2)
        # index 2 sees observed 2.0 and 8.0 within +/-2 -> 5.0
        assert out[2] == pytest.approx(5.0)
        # observed values never change
        assert out[1] == 2.0 and out[4] == 8.0

    def test_mean_and_median(self):
        x = np.array([1.0, np.nan, 3.0, 10.0])
        assert impute(x, "mean")[1] == pytest.approx(14.0 / 3.0)
        assert impute(x, "median")[1] == 3.0

    def test_imputing_twice_changes_nothing(self):
        once = impute(self.make_gappy(), "moving_average", window=1)
        again = impute(once, "moving_average", window=1)
        assert np.array_equal(once, again)

    def test_all_missing_rejected(self):
        with pytest.raises(AllMissing):
            impute(np.array([np.nan, np.nan]), "locf")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            impute(np.array([1.0, np.nan]), "banana")

    def test_moving_average_needs_window(self):
        with pytest.raises(BadSpan):
            impute(np.array([1.0, np.nan]), "moving_average")

    def test_no_missing_returns_copy(self):
        x = np.array([1.0, 2.0])
        out = impute(x, "locf")
        assert np.array_equal(out, x)
        out[0] = 99.0
        assert x[0] == 1.0
