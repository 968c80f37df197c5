from __future__ import annotations

import os
import time

import pytest

from conftest import GOLDEN4, MANUAL8, RULES_DIR, TRIO3
from lib import pareto
from lib.config import PipelineConfig
from lib.frontier import RuleSubset, run_frontier
from lib.pipeline import run_pipeline
from lib.ruledsl import RiskRuleSet, load_rules

SYNTHETIC_CONFIG = os.path.join(os.path.dirname(RULES_DIR), "configs", "synthetic.json")


def synthetic_config(tmp_path, **overrides):
    return PipelineConfig.from_json(SYNTHETIC_CONFIG).override(out=str(tmp_path), **overrides).validate()


@pytest.mark.slow
def test_efficiency_frontier_direction(tmp_path):
    cfg = synthetic_config(tmp_path)
    start = time.perf_counter()
    rows = run_frontier(cfg, [RuleSubset("none"), RuleSubset("trio3", TRIO3), RuleSubset("golden4", GOLDEN4),
                              RuleSubset("manual8", MANUAL8, raw=True)])
    assert time.perf_counter() - start < 120.0

    by_name = {r.configuration: r for r in rows}
    none, trio, golden, manual = (by_name[k] for k in ("none", "trio3", "golden4", "manual8"))
    assert [none.rule_count, trio.rule_count, golden.rule_count, manual.rule_count] == [0, 3, 4, 8]
    assert none.ye_accuracy < trio.ye_accuracy <= golden.ye_accuracy
    assert golden.ye_accuracy >= none.ye_accuracy + 0.10
    assert golden.ye_accuracy >= manual.ye_accuracy - 0.02
    for row in rows:
        assert row.ye_accuracy <= min(row.y_accuracy, row.e_accuracy)


@pytest.mark.slow
def test_selection_collapses_manual_set_to_golden(tmp_path):
    result = run_pipeline(synthetic_config(tmp_path, rules=MANUAL8, epochs=100))
    assert sorted(r.code for r in result.rules) == [4, 5, 6, 7]
    reasons = {d.rule.code: d.reason for d in result.selection.dropped}
    assert reasons == {8: pareto.REDUNDANT, 9: pareto.LOW_COVERAGE, 10: pareto.LOW_COVERAGE, 11: pareto.LOW_COVERAGE}


@pytest.mark.slow
def test_adding_planted_risk_rules_never_lowers_train_accuracy(tmp_path):
    golden = load_rules(GOLDEN4)
    scores = []
    for k in range(len(golden) + 1):
        result = run_pipeline(synthetic_config(tmp_path), rules=RiskRuleSet(golden.rules[:k]),
                              out_dir=str(tmp_path / f"prefix{k}"))
        assert result.rule_count == k
        scores.append(result.train_report.ye_accuracy)
    for before, after in zip(scores, scores[1:]):
        assert after >= before
