#%%
# Dataset Loading and Splitting
# -----------------------------------------------------------------------------------------
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import ConfigError, DataParseError, LabelError, SchemaError, SplitError

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature list plus the label column and the identifier columns dropped on load."""
    features: tuple
    label_column: str
    id_columns: tuple = field(default=())

    def __post_init__(self):
        features = tuple((str(name), str(kind)) for name, kind in self.features)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "id_columns", tuple(self.id_columns))
        names = [name for name, _ in features]
        for name, kind in features:
            if not name:
                raise SchemaError(name, "feature names must be non-empty")
            if kind not in (NUMERIC, CATEGORICAL):
                raise SchemaError(name, f"feature '{name}' has unknown kind '{kind}'")
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise SchemaError(duplicates[0], f"duplicate feature '{duplicates[0]}'")
        if not self.label_column:
            raise SchemaError(self.label_column, "label column name is empty")
        if self.label_column in self.id_columns:
            raise SchemaError(self.label_column, "label column is listed among id columns")
        if self.label_column in names:
            raise SchemaError(self.label_column, "label column is listed as a feature")

    @property
    def names(self):
        return [name for name, _ in self.features]

    @property
    def numeric(self):
        return [name for name, kind in self.features if kind == NUMERIC]

    @property
    def categorical(self):
        return [name for name, kind in self.features if kind == CATEGORICAL]

    def kind_of(self, name):
        for feature, kind in self.features:
            if feature == name:
                return kind
        raise KeyError(name)

    def to_dict(self):
        return {
            "label": self.label_column,
            "ids": list(self.id_columns),
            "numeric": self.numeric,
            "categorical": self.categorical,
        }

    @classmethod
    def from_dict(cls, d):
        """Sidecar form; feature order is the numeric list followed by the categorical list."""
        try:
            features = [(n, NUMERIC) for n in d.get("numeric", [])]
            features += [(n, CATEGORICAL) for n in d.get("categorical", [])]
            return cls(tuple(features), d["label"], tuple(d.get("ids", [])))
        except KeyError as e:
            raise SchemaError(str(e.args[0]), f"schema sidecar is missing key {e.args[0]!r}") from None

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature frame (schema column order, original row index kept) plus {0,1} labels."""
    schema: FeatureSchema
    frame: pd.DataFrame
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if list(self.frame.columns) != self.schema.names:
            raise SchemaError(",".join(map(str, self.frame.columns)), "frame columns do not follow the schema order")
        if len(labels) != len(self.frame):
            raise ValueError(f"{len(labels)} labels for {len(self.frame)} rows")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise LabelError(int(np.flatnonzero(~np.isin(labels, (0, 1)))[0]), "non-binary")

    def __len__(self):
        return len(self.frame)

    @property
    def row_index(self):
        return self.frame.index.to_numpy()

    @property
    def n_churn(self):
        return int(self.labels.sum())

    def column(self, name):
        return self.frame[name].to_numpy()

    def row(self, i):
        """Row i (positional) as a feature -> value dict."""
        return self.frame.iloc[i].to_dict()

    def subset(self, positions):
        positions = np.asarray(positions, dtype=np.int64)
        return Dataset(self.schema, self.frame.iloc[positions], self.labels[positions])


# --- CSV input/output ---
def load_csv(path, schema):
    """Loads a churn CSV, drops id columns and parses features and label by the schema.

    Args:
        path: CSV file with a header row.
        schema: FeatureSchema naming the columns to keep.

    Returns:
        Dataset with rows in file order.
    """
    raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    for column in list(schema.id_columns) + schema.names + [schema.label_column]:
        if column not in raw.columns:
            raise SchemaError(column)

    frame = pd.DataFrame(index=pd.RangeIndex(len(raw)))
    for name, kind in schema.features:
        cells = raw[name]
        if kind == NUMERIC:
            values = pd.to_numeric(cells.str.strip(), errors="coerce").to_numpy(dtype=float)
            bad = np.flatnonzero(~np.isfinite(values))
            if bad.size:
                raise DataParseError(int(bad[0]), name, cells.iloc[bad[0]])
            frame[name] = values
        else:
            bad = np.flatnonzero(cells.str.len().to_numpy() == 0)
            if bad.size:
                raise DataParseError(int(bad[0]), name, "")
            frame[name] = cells.to_numpy(dtype=object)

    label_cells = raw[schema.label_column].str.strip()
    bad = np.flatnonzero(~label_cells.isin(["0", "1"]).to_numpy())
    if bad.size:
        raise LabelError(int(bad[0]), raw[schema.label_column].iloc[bad[0]])
    labels = (label_cells == "1").to_numpy(dtype=np.int64)

    logger.info(f"Loaded {len(frame)} rows ({int(labels.sum())} churn) from {path}")
    return Dataset(schema, frame, labels)


def write_csv(ds, path, id_column=None):
    """Writes features and label (and optionally a running id) in the load_csv layout."""
    out = ds.frame.copy()
    if id_column:
        out.insert(0, id_column, ds.row_index)
    out[ds.schema.label_column] = ds.labels
    out.to_csv(path, index=False, lineterminator="\n")


# --- Splitting ---
def split(ds, test_fraction, seed):
    """Stratified, seeded train/test partition.

    Each label's rows are permuted with one shared generator and the first
    round(n_label * test_fraction) go to test. Both sides keep input order.
    """
    if not 0 < test_fraction < 1:
        raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_parts = []
    for label in (0, 1):
        positions = np.flatnonzero(ds.labels == label)
        if positions.size == 0:
            continue
        n_test = int(np.floor(positions.size * test_fraction + 0.5))
        test_parts.append(rng.permutation(positions)[:n_test])

    test_pos = np.sort(np.concatenate(test_parts)) if test_parts else np.array([], dtype=np.int64)
    train_pos = np.setdiff1d(np.arange(len(ds)), test_pos)
    if train_pos.size == 0 or test_pos.size == 0:
        raise SplitError(f"split of {len(ds)} rows at fraction {test_fraction} leaves an empty side")
    return ds.subset(train_pos), ds.subset(test_pos)
