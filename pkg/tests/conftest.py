from __future__ import annotations

import os

import numpy as np
import pandas as pd
import pytest

from lib.data import Dataset, FeatureSchema
from lib.synthetic import LEVELS, SynthConfig

RULES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "rules")
GOLDEN4 = os.path.join(RULES_DIR, "golden4.rules")
MANUAL8 = os.path.join(RULES_DIR, "manual8.rules")
TRIO3 = os.path.join(RULES_DIR, "trio3.rules")


def make_dataset(columns, labels, numeric=(), categorical=(), label="churn"):
    """Dataset from plain column lists; numeric columns become floats."""
    schema = FeatureSchema(tuple([(n, "numeric") for n in numeric] + [(n, "categorical") for n in categorical]), label)
    frame = pd.DataFrame({n: (np.asarray(columns[n], dtype=float) if n in numeric else np.asarray(columns[n], dtype=object))
                          for n in schema.names})
    return Dataset(schema, frame, np.asarray(labels))


def equivalent_on_levels(pred, planted):
    """True when two predicates on the same synthetic feature agree on every level."""
    if pred.feature != planted.feature:
        return False
    return all(pred.evaluate(v) == planted.evaluate(v) for v in LEVELS[pred.feature])


@pytest.fixture
def churn_schema():
    return FeatureSchema((("tenure", "numeric"), ("contract", "categorical")), "churn", ("id",))


@pytest.fixture
def small_dataset():
    return make_dataset(
        {"tenure": [1, 5, 9, 12, 3, 7, 2, 10], "contract": ["monthly", "annual", "monthly", "two_year",
                                                            "monthly", "annual", "monthly", "two_year"]},
        [1, 0, 1, 0, 1, 0, 1, 0],
        numeric=("tenure",), categorical=("contract",),
    )


@pytest.fixture
def anna_karenina_config():
    """Two dense stay patterns, eight sparse churn disjuncts, no noise."""
    return SynthConfig(n_rows=1000, churn_rate=0.56, n_safety_patterns=2, n_risk_disjuncts=8,
                       risk_disjunct_coverage=0.015, noise_rate=0.0, seed=11)


@pytest.fixture
def frontier_config():
    return SynthConfig(n_rows=2000, churn_rate=0.56, n_safety_patterns=2, n_risk_disjuncts=4,
                       risk_disjunct_coverage=0.12, noise_rate=0.05, seed=7)
