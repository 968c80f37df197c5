#%%
# Efficiency Frontier Sweep
# -----------------------------------------------------------------------------------------
import logging
import os
from dataclasses import dataclass, replace
from typing import Optional

import pandas as pd

from .errors import ConfigError
from .pipeline import run_pipeline
from .ruledsl import RiskRuleSet, load_rules

logger = logging.getLogger(__name__)

RAW_SUFFIX = ":raw"
CSV_COLUMNS = ["configuration", "rule_count", "y_acc", "e_acc", "ye_acc"]


@dataclass(frozen=True)
class RuleSubset:
    """One frontier configuration; raw subsets skip rule selection."""
    name: str
    path: Optional[str] = None
    raw: bool = False


@dataclass(frozen=True)
class FrontierRow:
    configuration: str
    rule_count: int
    y_accuracy: float
    e_accuracy: float
    ye_accuracy: float

    def as_record(self):
        return [self.configuration, self.rule_count, self.y_accuracy, self.e_accuracy, self.ye_accuracy]


def parse_subset(text):
    """``name=path`` or ``name=path:raw``; an empty path means no expert rules."""
    name, sep, path = text.partition("=")
    if not sep or not name:
        raise ConfigError(f"subset must look like name=path, got '{text}'")
    raw = path.endswith(RAW_SUFFIX)
    if raw:
        path = path[:-len(RAW_SUFFIX)]
    return RuleSubset(name, path or None, raw)


def run_frontier(cfg, rule_subsets, out_dir=None):
    """One full pipeline run per rule subset on the same data, split and seeds.

    Args:
        cfg: validated PipelineConfig.
        rule_subsets: list of RuleSubset.
        out_dir: sweep directory; each run writes to <out_dir>/<name>/.

    Returns:
        List of FrontierRow, also written to <out_dir>/frontier.csv.
    """
    if len(rule_subsets) < 2:
        raise ConfigError(f"a frontier needs at least 2 rule subsets, got {len(rule_subsets)}")
    names = [s.name for s in rule_subsets]
    if len(set(names)) != len(names):
        raise ConfigError(f"subset names must be unique: {names}")
    out_dir = out_dir or cfg.out

    rows = []
    for subset in rule_subsets:
        mode = " without selection" if subset.raw else ""
        logger.info(f"=== Frontier run '{subset.name}' ({subset.path or 'no expert rules'}{mode}) ===")
        rules = load_rules(subset.path) if subset.path else RiskRuleSet()
        run_cfg = replace(cfg, rules=subset.path, apply_pareto=cfg.apply_pareto and not subset.raw)
        result = run_pipeline(run_cfg, rules=rules, out_dir=os.path.join(out_dir, subset.name))
        r = result.report
        rows.append(FrontierRow(subset.name, result.rule_count, r.y_accuracy, r.e_accuracy, r.ye_accuracy))

    table = frontier_frame(rows)
    os.makedirs(out_dir, exist_ok=True)
    table.to_csv(os.path.join(out_dir, "frontier.csv"), index=False, lineterminator="\n")
    print("\n--- Efficiency Frontier ---")
    print(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    return rows


def frontier_frame(rows):
    return pd.DataFrame([row.as_record() for row in rows], columns=CSV_COLUMNS)
