#%%
# Feature Binarizer
# -----------------------------------------------------------------------------------------
"""Encodes raw features as bit columns of atomic predicates and their negations.

Numeric features get (f <= t, f > t) column pairs at quantile thresholds, categorical
features get (f == v, f != v) pairs over the sorted vocabulary. Adjacent columns
2k and 2k+1 are always complementary.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .data import CATEGORICAL, NUMERIC, FeatureSchema
from .errors import ConfigError, ModelError, SchemaMismatchError
from .predicates import AtomicPredicate, parse_predicate

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BinarizerModel:
    schema: FeatureSchema
    thresholds: dict
    categories: dict
    column_layout: tuple
    n_quantiles: int

    @property
    def n_columns(self):
        return len(self.column_layout)

    def columns_of(self, feature):
        return [j for j, p in enumerate(self.column_layout) if p.feature == feature]

    def transform_row(self, row):
        """Bit vector for one raw row (mapping of feature -> value)."""
        for name in self.schema.names:
            if name not in row:
                raise SchemaMismatchError(name, f"row has no value for feature '{name}'")
        return np.array([p.evaluate(row[p.feature]) for p in self.column_layout], dtype=np.uint8)

    def to_dict(self):
        features = {}
        for name, kind in self.schema.features:
            if kind == NUMERIC:
                features[name] = {"thresholds": list(self.thresholds[name])}
            else:
                features[name] = {"categories": list(self.categories[name])}
        return {
            "version": FORMAT_VERSION,
            "kind": "binarizer",
            "n_quantiles": self.n_quantiles,
            "schema": self.schema.to_dict(),
            "features": features,
            "column_layout": [str(p) for p in self.column_layout],
        }

    @classmethod
    def from_vocabulary(cls, schema, thresholds, categories, n_quantiles=9):
        """Model with explicit thresholds and category vocabularies."""
        thresholds = {n: tuple(sorted(set(float(t) for t in thresholds.get(n, ())))) for n in schema.numeric}
        categories = {n: tuple(sorted(set(categories.get(n, ())))) for n in schema.categorical}
        return cls(schema, thresholds, categories, _layout(schema, thresholds, categories), n_quantiles)

    @classmethod
    def from_dict(cls, d):
        schema = FeatureSchema.from_dict(d["schema"])
        thresholds = {n: tuple(float(t) for t in d["features"][n]["thresholds"]) for n in schema.numeric}
        categories = {n: tuple(d["features"][n]["categories"]) for n in schema.categorical}
        layout = _layout(schema, thresholds, categories)
        stored = tuple(parse_predicate(s) for s in d["column_layout"])
        if stored != layout:
            raise ModelError("binarizer column_layout does not match its thresholds and categories")
        return cls(schema, thresholds, categories, layout, int(d["n_quantiles"]))


@dataclass(frozen=True, eq=False)
class BinarizedMatrix:
    columns: tuple
    bits: np.ndarray

    @property
    def n_rows(self):
        return self.bits.shape[0]

    @property
    def n_columns(self):
        return self.bits.shape[1]

    def column_index(self, predicate):
        return self.columns.index(predicate)


def _layout(schema, thresholds, categories):
    layout = []
    for name, kind in schema.features:
        if kind == NUMERIC:
            for t in thresholds[name]:
                layout += [AtomicPredicate(name, "<=", t), AtomicPredicate(name, ">", t)]
        else:
            for v in categories[name]:
                layout += [AtomicPredicate(name, "==", v), AtomicPredicate(name, "!=", v)]
    return tuple(layout)


def fit(ds, n_quantiles=9):
    """Learns thresholds and vocabularies from a dataset.

    Thresholds are the n_quantiles internal quantiles k/(n_quantiles+1) with linear
    interpolation, deduplicated. Constant numeric features produce no columns.
    """
    if n_quantiles < 1:
        raise ConfigError(f"n_quantiles must be >= 1, got {n_quantiles}")
    if len(ds) == 0:
        raise ModelError("cannot fit a binarizer on an empty dataset")

    probs = np.arange(1, n_quantiles + 1) / (n_quantiles + 1)
    thresholds, categories = {}, {}
    for name, kind in ds.schema.features:
        values = ds.column(name)
        if kind == NUMERIC:
            values = values.astype(float)
            if values.min() == values.max():
                thresholds[name] = ()
                logger.debug(f"Feature '{name}' is constant; no columns emitted")
            else:
                thresholds[name] = tuple(float(t) for t in np.unique(np.quantile(values, probs)))
        else:
            categories[name] = tuple(sorted(set(str(v) for v in values)))

    layout = _layout(ds.schema, thresholds, categories)
    logger.info(f"Binarizer fitted: {len(layout)} columns over {len(ds.schema.features)} features")
    return BinarizerModel(ds.schema, thresholds, categories, layout, n_quantiles)


def binarize(model, ds):
    """Evaluates every column predicate on every row; unseen categories fail all == tests."""
    for name, kind in model.schema.features:
        if name not in ds.schema.names:
            raise SchemaMismatchError(name)
        if ds.schema.kind_of(name) != kind:
            raise SchemaMismatchError(name, f"feature '{name}' is {ds.schema.kind_of(name)}, binarizer expects {kind}")

    bits = np.empty((len(ds), model.n_columns), dtype=np.uint8)
    for j, p in enumerate(model.column_layout):
        bits[:, j] = p.mask(ds.column(p.feature))

    for name in model.schema.categorical:
        unseen = ~np.isin(ds.column(name).astype(str), model.categories[name])
        if unseen.any():
            logger.warning(f"Feature '{name}': {int(unseen.sum())} rows carry categories unseen at fit time")
    return BinarizedMatrix(model.column_layout, bits)
