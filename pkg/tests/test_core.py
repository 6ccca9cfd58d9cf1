"""Domain types, windowing, prefix splits, and standardization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercast.core import (
    Dataset,
    Schema,
    SeriesRecord,
    SupervisedSet,
    fit_standardizer,
    is_missing,
    make_supervised,
    split_prefix,
)
from clustercast.errors import EmptyInput, OutOfRange, SchemaError, TooShort


def record(rid="r0", length=6, static=(1.0, 2.0)):
    t = np.arange(length, dtype=float)
    return SeriesRecord(rid, {"a": t, "b": t * 10}, np.asarray(static))


class TestSchema:
    def test_duplicate_columns_rejected(self):
        with pytest.raises(SchemaError):
            Schema(("a", "a"), 10, 0)

    def test_nonpositive_length_rejected(self):
        with pytest.raises(SchemaError):
            Schema(("a",), 0, 0)

    def test_negative_static_dim_rejected(self):
        with pytest.raises(SchemaError):
            Schema(("a",), 10, -1)


class TestSeriesRecord:
    def test_length_and_columns(self):
        rec = record(length=7)
        assert rec.length == 7
        assert rec.columns == ("a", "b")

    def test_mismatched_column_lengths_rejected(self):
        with pytest.raises(SchemaError):
            SeriesRecord("r", {"a": np.arange(5.0), "b": np.arange(6.0)}, np.zeros(0))

    def test_two_dimensional_column_rejected(self):
        with pytest.raises(SchemaError):
            SeriesRecord("r", {"a": np.zeros((3, 2))}, np.zeros(0))

    def test_empty_record_rejected(self):
        with pytest.raises(SchemaError):
            SeriesRecord("r", {}, np.zeros(0))

    def test_with_measurements_replaces_only_named_columns(self):
        rec = record()
        new = rec.with_measurements({"a": np.full(6, 9.0)})
        assert np.array_equal(new.measurements["a"], np.full(6, 9.0))
        assert np.array_equal(new.measurements["b"], rec.measurements["b"])
        assert np.array_equal(rec.measurements["a"], np.arange(6.0))  # original intact

    def test_stacked_orders_columns_as_requested(self):
        rec = record(length=4)
        arr = rec.stacked(["b", "a"])
        assert arr.shape == (4, 2)
        assert np.array_equal(arr[:, 0], rec.measurements["b"])
        assert np.array_equal(arr[:, 1], rec.measurements["a"])


class TestDataset:
    def test_duplicate_ids_rejected(self):
        schema = Schema(("a", "b"), 6, 2)
        with pytest.raises(SchemaError):
            Dataset((record("x"), record("x")), schema)

    def test_schema_mismatches_rejected(self):
        with pytest.raises(SchemaError):
            Dataset((record(),), Schema(("a", "b", "c"), 6, 2))
        with pytest.raises(SchemaError):
            Dataset((record(),), Schema(("a", "b"), 9, 2))
        with pytest.raises(SchemaError):
            Dataset((record(),), Schema(("a", "b"), 6, 3))

    def test_len_and_subset(self):
        schema = Schema(("a", "b"), 6, 2)
        ds = Dataset((record("x"), record("y"), record("z")), schema)
        assert len(ds) == 3
        sub = ds.subset([2, 0])
        assert [r.id for r in sub.records] == ["z", "x"]
        assert sub.schema == schema


class TestSupervisedSet:
    def test_wrong_input_width_rejected(self):
        with pytest.raises(SchemaError):
            SupervisedSet(np.zeros((3, 5)), np.zeros(3), window_length=4, horizon=1)

    def test_dynamic_and_static_views(self):
        # 2 examples, window 3, 2 series columns, 2 static features.
        inputs = np.arange(16.0).reshape(2, 8)
        ss = SupervisedSet(inputs, np.zeros(2), 3, 1, n_series_columns=2, static_dim=2)
        dyn = ss.dynamic()
        assert dyn.shape == (2, 3, 2)
        assert np.array_equal(dyn[0].ravel(), inputs[0, :6])
        stat = ss.static()
        assert np.array_equal(stat, inputs[:, 6:])

    def test_static_none_when_absent(self):
        ss = SupervisedSet(np.zeros((2, 3)), np.zeros(2), 3, 1)
        assert ss.static() is None


class TestMakeSupervised:
    def test_hand_example(self):
        ss = make_supervised([1.0, 2.0, 3.0, 4.0, 5.0], w=2, h=2)
        assert len(ss) == 2
        assert np.array_equal(ss.inputs, [[1.0, 2.0], [2.0, 3.0]])
        assert np.array_equal(ss.targets, [4.0, 5.0])

    @given(
        n=st.integers(3, 40),
        w=st.integers(1, 10),
        h=st.integers(1, 10),
        seed=st.integers(0, 1000),
    )
    @settings(max_examples=60, deadline=None)
    def test_window_alignment_property(self, n, w, h, seed):
        x = np.random.default_rng(seed).normal(size=n)
        if n - w - h + 1 < 1:
            with pytest.raises(TooShort):
                make_supervised(x, w, h)
            return
        ss = make_supervised(x, w, h)
        assert len(ss) == n - w - h + 1
        for i in range(len(ss)):
            assert np.array_equal(ss.inputs[i], x[i : i + w])
            assert ss.targets[i] == x[i + w + h - 1]

    def test_bad_window_or_horizon(self):
        with pytest.raises(OutOfRange):
            make_supervised(np.arange(10.0), 0, 1)
        with pytest.raises(OutOfRange):
            make_supervised(np.arange(10.0), 1, 0)

    def test_missing_values_rejected(self):
        x = np.array([1.0, np.nan, 3.0, 4.0])
        with pytest.raises(ValueError):
            make_supervised(x, 2, 1)


class TestSplitPrefix:
    def test_split_lengths_and_values(self):
        rec = record(length=6)
        head, tail = split_prefix(rec, 4)
        assert np.array_equal(head["a"], [0.0, 1.0, 2.0, 3.0])
        assert np.array_equal(tail["a"], [4.0, 5.0])
        assert np.array_equal(head["b"], [0.0, 10.0, 20.0, 30.0])

    def test_bounds(self):
        rec = record(length=6)
        with pytest.raises(OutOfRange):
            split_prefix(rec, 0)
        with pytest.raises(OutOfRange):
            split_prefix(rec, 6)


class TestStandardizer:
    def test_fitted_columns_have_zero_mean_unit_spread(self):
        m = np.random.default_rng(0).normal(5.0, 3.0, size=(40, 3))
        z = fit_standardizer(m).apply(m)
        assert np.allclose(z.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(z.std(axis=0), 1.0, atol=1e-12)

    @given(seed=st.integers(0, 500), rows=st.integers(1, 30), cols=st.integers(1, 5))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_within_1e_10(self, seed, rows, cols):
        m = np.random.default_rng(seed).normal(100.0, 37.0, size=(rows, cols))
        s = fit_standardizer(m)
        assert np.allclose(s.invert(s.apply(m)), m, atol=1e-10, rtol=0.0)

    def test_constant_column_maps_to_zero_and_inverts_exactly(self):
        m = np.column_stack([np.full(10, 7.5), np.arange(10.0)])
        s = fit_standardizer(m)
        z = s.apply(m)
        assert np.array_equal(z[:, 0], np.zeros(10))
        assert np.array_equal(s.invert(z)[:, 0], m[:, 0])

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyInput):
            fit_standardizer(np.zeros((0, 3)))

    def test_vector_promoted_to_column(self):
        s = fit_standardizer(np.array([1.0, 3.0]))
        assert s.mean.shape == (1,)


def test_is_missing_flags_nan_only():
    mask = is_missing([1.0, np.nan, 0.0])
    assert mask.tolist() == [False, True, False]
