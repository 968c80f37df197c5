from __future__ import annotations

import numpy as np
import pytest

from lib.errors import ConfigError
from lib.ruledsl import match_mask
from lib.synthetic import (SynthConfig, generate_synthetic, planted_risk_rules, planted_safety_patterns,
                           safety_code)


def pattern_mask(pattern, frame):
    mask = np.ones(len(frame), dtype=bool)
    for p in pattern.predicates:
        mask &= p.mask(frame[p.feature].to_numpy())
    return mask


def test_churn_count_without_noise(anna_karenina_config):
    ds, truth = generate_synthetic(anna_karenina_config)
    assert len(ds) == 1000
    assert ds.n_churn == 560
    assert len(truth) == 1000


def test_each_disjunct_covers_its_share(anna_karenina_config):
    ds, _ = generate_synthetic(anna_karenina_config)
    rules = planted_risk_rules(anna_karenina_config)
    assert len(rules) == 8
    for rule in rules:
        assert int(match_mask(rule, ds.frame).sum()) == 15


def test_generation_is_deterministic(frontier_config):
    a, ta = generate_synthetic(frontier_config)
    b, tb = generate_synthetic(frontier_config)
    assert a.frame.equals(b.frame)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(ta.codes, tb.codes)
    assert ta.provenance == tb.provenance


def test_truth_codes_agree_with_planted_conjunctions(anna_karenina_config):
    ds, truth = generate_synthetic(anna_karenina_config)
    for rule in planted_risk_rules(anna_karenina_config):
        rows = truth.codes == rule.code
        assert rows.sum() == 15
        assert match_mask(rule, ds.frame)[rows].all()
        assert (ds.labels[rows] == 1).all()
    for j, pattern in enumerate(planted_safety_patterns(anna_karenina_config)):
        rows = truth.codes == safety_code(j)
        assert pattern_mask(pattern, ds.frame)[rows].all()
        assert (ds.labels[rows] == 0).all()
    drift = truth.codes == 12
    assert (ds.labels[drift] == 1).all()
    assert set(np.unique(truth.codes)) <= {1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12}


def test_background_churn_matches_nothing_planted(anna_karenina_config):
    ds, truth = generate_synthetic(anna_karenina_config)
    drift = truth.codes == 12
    for pattern in planted_safety_patterns(anna_karenina_config):
        assert not pattern_mask(pattern, ds.frame)[drift].any()
    for rule in planted_risk_rules(anna_karenina_config):
        assert not match_mask(rule, ds.frame)[drift].any()


def test_noise_flips_labels_only():
    clean_cfg = SynthConfig(n_rows=500, noise_rate=0.0, seed=5)
    noisy_cfg = SynthConfig(n_rows=500, noise_rate=0.1, seed=5)
    clean, _ = generate_synthetic(clean_cfg)
    noisy, truth = generate_synthetic(noisy_cfg)
    assert clean.frame.equals(noisy.frame)
    flipped = clean.labels != noisy.labels
    assert int(flipped.sum()) == 50
    assert (truth.codes[flipped] == 12).all()


@pytest.mark.parametrize("overrides", [
    {"n_risk_disjuncts": 8, "risk_disjunct_coverage": 0.1},
    {"churn_rate": 1.0},
    {"noise_rate": 0.5},
    {"n_safety_patterns": 0},
    {"n_safety_patterns": 4},
    {"n_risk_disjuncts": 9, "risk_disjunct_coverage": 0.01},
])
def test_invalid_configs_are_rejected(overrides):
    with pytest.raises(ConfigError):
        generate_synthetic(SynthConfig(**{**SynthConfig().to_dict(), **overrides}))


def test_unknown_config_key():
    with pytest.raises(ConfigError):
        SynthConfig.from_dict({"n_rows": 10, "rows": 5})
