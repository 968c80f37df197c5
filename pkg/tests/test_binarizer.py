from __future__ import annotations

import numpy as np
import pytest

from conftest import make_dataset
from lib import binarizer
from lib.binarizer import BinarizerModel
from lib.data import FeatureSchema
from lib.errors import ConfigError, ModelError, SchemaMismatchError
from lib.predicates import AtomicPredicate
from lib.synthetic import SynthConfig, generate_synthetic


def test_single_quantile_is_the_median():
    ds = make_dataset({"x": np.arange(1, 11)}, [0, 1] * 5, numeric=("x",))
    model = binarizer.fit(ds, n_quantiles=1)
    assert model.thresholds["x"] == (5.5,)
    assert model.column_layout == (AtomicPredicate("x", "<=", 5.5), AtomicPredicate("x", ">", 5.5))


def test_constant_feature_emits_no_columns():
    ds = make_dataset({"x": [7, 7, 7], "y": [1, 2, 3]}, [0, 1, 0], numeric=("x", "y"))
    model = binarizer.fit(ds, n_quantiles=3)
    assert model.thresholds["x"] == ()
    assert model.columns_of("x") == []


def test_categorical_vocabulary_is_sorted():
    ds = make_dataset({"contract": ["monthly", "annual", "monthly"]}, [1, 0, 1], categorical=("contract",))
    model = binarizer.fit(ds)
    assert model.categories["contract"] == ("annual", "monthly")
    assert [str(p) for p in model.column_layout] == [
        'contract == "annual"', 'contract != "annual"', 'contract == "monthly"', 'contract != "monthly"']


def test_numeric_bits_follow_thresholds():
    schema = FeatureSchema((("tenure", "numeric"),), "churn")
    model = BinarizerModel.from_vocabulary(schema, {"tenure": [3, 7]}, {})
    ds = make_dataset({"tenure": [5]}, [0], numeric=("tenure",))
    assert binarizer.binarize(model, ds).bits[0].tolist() == [0, 1, 1, 0]


def test_categorical_bits_and_unseen_category():
    schema = FeatureSchema((("contract", "categorical"),), "churn")
    model = BinarizerModel.from_vocabulary(schema, {}, {"contract": ["monthly", "annual"]})
    ds = make_dataset({"contract": ["monthly", "weekly"]}, [0, 1], categorical=("contract",))
    bits = binarizer.binarize(model, ds).bits
    assert bits[0].tolist() == [0, 1, 1, 0]
    assert bits[1].tolist() == [0, 1, 0, 1]


def test_transform_row_agrees_with_binarize(small_dataset):
    model = binarizer.fit(small_dataset, n_quantiles=3)
    bits = binarizer.binarize(model, small_dataset).bits
    for i in range(len(small_dataset)):
        assert np.array_equal(model.transform_row(small_dataset.row(i)), bits[i])


def test_complementarity_and_monotone_thresholds():
    ds, _ = generate_synthetic(SynthConfig(n_rows=400, seed=2))
    model = binarizer.fit(ds, n_quantiles=9)
    bm = binarizer.binarize(model, ds)
    assert (bm.bits[:, 0::2] + bm.bits[:, 1::2] == 1).all()
    for name in ds.schema.numeric:
        le_cols = [j for j in model.columns_of(name) if model.column_layout[j].op == "<="]
        for lo, hi in zip(le_cols, le_cols[1:]):
            assert (bm.bits[:, lo] <= bm.bits[:, hi]).all()


def test_fit_and_binarize_are_deterministic():
    ds, _ = generate_synthetic(SynthConfig(n_rows=300, seed=4))
    a = binarizer.binarize(binarizer.fit(ds), ds)
    b = binarizer.binarize(binarizer.fit(ds), ds)
    assert a.columns == b.columns
    assert np.array_equal(a.bits, b.bits)


def test_schema_mismatch_names_feature(small_dataset):
    model = binarizer.fit(small_dataset)
    other = make_dataset({"tenure": [1.0]}, [0], numeric=("tenure",))
    with pytest.raises(SchemaMismatchError) as err:
        binarizer.binarize(model, other)
    assert err.value.feature == "contract"
    retyped = make_dataset({"tenure": ["a"], "contract": ["x"]}, [0], categorical=("tenure", "contract"))
    with pytest.raises(SchemaMismatchError) as err:
        binarizer.binarize(model, retyped)
    assert err.value.feature == "tenure"


def test_fit_errors(small_dataset):
    with pytest.raises(ConfigError):
        binarizer.fit(small_dataset, n_quantiles=0)
    with pytest.raises(ModelError):
        binarizer.fit(small_dataset.subset([]))


def test_serialized_model_reloads(small_dataset):
    model = binarizer.fit(small_dataset, n_quantiles=4)
    payload = model.to_dict()
    assert payload["version"] == 1 and payload["kind"] == "binarizer"
    assert BinarizerModel.from_dict(payload) == model
    payload["column_layout"] = payload["column_layout"][:-2]
    with pytest.raises(ModelError):
        BinarizerModel.from_dict(payload)
