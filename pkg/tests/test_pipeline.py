from __future__ import annotations

import json
import os

import pandas as pd
import pytest

from conftest import GOLDEN4, MANUAL8
from lib.config import PipelineConfig
from lib.errors import ConfigError, StageError, RuleSyntaxError
from lib.frontier import RuleSubset, parse_subset, run_frontier
from lib.pipeline import ARTIFACTS, reevaluate, run_pipeline
from lib.synthetic import SynthConfig


@pytest.fixture
def quick_config(tmp_path):
    synth = SynthConfig(n_rows=600, churn_rate=0.5, n_safety_patterns=2, n_risk_disjuncts=4,
                        risk_disjunct_coverage=0.1, noise_rate=0.02, seed=3)
    return PipelineConfig(synthetic=synth, out=str(tmp_path / "run"), epochs=150).validate()


def test_zero_rule_run_writes_every_artifact(quick_config):
    result = run_pipeline(quick_config)
    assert result.rule_count == 0
    assert result.selection is None
    for name in ARTIFACTS:
        assert os.path.isfile(os.path.join(quick_config.out, name))
    codes = set(result.train_codes.codes.tolist()) | set(result.test_codes.codes.tolist())
    assert codes <= {1, 2, 3, 12}

    with open(os.path.join(quick_config.out, "selection.json")) as f:
        assert json.load(f)["applied"] is False


def test_run_with_rules_reports_both_splits(quick_config):
    result = run_pipeline(quick_config.override(rules=GOLDEN4))
    assert 0 < result.rule_count <= 4
    assert result.report.split == "test"
    assert result.train_report.split == "train"
    assert result.report.n + result.train_report.n == 600
    assert result.report.ye_accuracy <= min(result.report.y_accuracy, result.report.e_accuracy)

    frame = pd.read_csv(os.path.join(quick_config.out, "explanations.csv"))
    assert list(frame.columns) == ["row_index", "split", "code", "provenance"]
    assert frame["row_index"].is_monotonic_increasing
    assert len(frame) == 600


def test_artifacts_are_byte_identical_across_runs(quick_config, tmp_path):
    cfg = quick_config.override(rules=GOLDEN4)
    run_pipeline(cfg, out_dir=str(tmp_path / "a"))
    run_pipeline(cfg, out_dir=str(tmp_path / "b"))
    for name in ARTIFACTS:
        with open(tmp_path / "a" / name, "rb") as fa, open(tmp_path / "b" / name, "rb") as fb:
            assert fa.read() == fb.read(), name


def test_reevaluate_reproduces_stored_report(quick_config):
    cfg = quick_config.override(rules=GOLDEN4)
    result = run_pipeline(cfg)
    assert reevaluate(cfg.out, cfg) == result.report
    with open(os.path.join(cfg.out, "report.json")) as f:
        stored = json.load(f)
    assert stored["test"]["ye_accuracy"] == result.report.ye_accuracy
    assert "out" not in stored["config"]


def test_malformed_rules_fail_the_rules_stage(quick_config, tmp_path):
    bad = tmp_path / "bad.rules"
    bad.write_text('rule "ok" code 4 quadrant financial: tenure <= 6\n\nrule "broken" code 5 quadrant : tenure <= 6\n')
    with pytest.raises(StageError) as info:
        run_pipeline(quick_config.override(rules=str(bad)))
    assert info.value.stage == "rules"
    assert isinstance(info.value.cause, RuleSyntaxError)
    assert info.value.cause.line == 3


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig().validate()
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict({"synthetic": {"n_rows": 10}, "lambda3": 1.0})
    with pytest.raises(ConfigError):
        PipelineConfig(synthetic=SynthConfig(), precedence="sideways").validate()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"synthetic": {"n_rows": 100, "seed": 4}, "epochs": 10}))
    cfg = PipelineConfig.from_json(str(path))
    assert cfg.synthetic.n_rows == 100 and cfg.epochs == 10


# --- Frontier ---
def test_parse_subset():
    assert parse_subset("golden=rules/golden4.rules") == RuleSubset("golden", "rules/golden4.rules")
    assert parse_subset("none=") == RuleSubset("none", None)
    assert parse_subset("manual=rules/manual8.rules:raw") == RuleSubset("manual", "rules/manual8.rules", raw=True)
    with pytest.raises(ConfigError):
        parse_subset("no_separator")


def test_frontier_needs_two_subsets(quick_config):
    with pytest.raises(ConfigError):
        run_frontier(quick_config, [RuleSubset("golden", GOLDEN4)])
    with pytest.raises(ConfigError):
        run_frontier(quick_config, [RuleSubset("x"), RuleSubset("x", GOLDEN4)])


def test_frontier_writes_one_row_per_subset(quick_config, capsys):
    rows = run_frontier(quick_config, [RuleSubset("none"), RuleSubset("golden", GOLDEN4),
                                       RuleSubset("manual", MANUAL8, raw=True)])
    assert [r.configuration for r in rows] == ["none", "golden", "manual"]
    assert rows[0].rule_count == 0
    assert rows[2].rule_count == 8
    table = pd.read_csv(os.path.join(quick_config.out, "frontier.csv"))
    assert list(table.columns) == ["configuration", "rule_count", "y_acc", "e_acc", "ye_acc"]
    assert os.path.isfile(os.path.join(quick_config.out, "golden", "report.json"))
    assert "Efficiency Frontier" in capsys.readouterr().out
