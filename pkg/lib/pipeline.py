#%%
# End-to-End Pipeline
# -----------------------------------------------------------------------------------------
"""data -> binarize -> lrr -> rules -> pareto -> explain -> ted -> evaluate.

Each stage failure is re-raised as StageError naming the stage. Artifacts go to
one output directory:

    binarizer.json  lrr.json  selection.json  explanations.csv  ted.json  report.json
"""
import json
import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from . import binarizer as binarizer_mod
from . import lrr, ted
from .data import FeatureSchema, load_csv, split
from .errors import StageError
from .explain import build_matrix
from .metrics import EvalReport
from .pareto import select
from .ruledsl import RiskRuleSet, load_rules
from .synthetic import generate_synthetic

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
ARTIFACTS = ("binarizer.json", "lrr.json", "selection.json", "explanations.csv", "ted.json", "report.json")


@dataclass(frozen=True, eq=False)
class PipelineResult:
    report: EvalReport
    train_report: EvalReport
    binarizer: object
    rule_model: object
    tiers: object
    rules: RiskRuleSet
    selection: Optional[object]
    train_codes: object
    test_codes: object
    ted_model: object

    @property
    def rule_count(self):
        return len(self.rules)


@contextmanager
def stage(name):
    logger.info(f"--- Stage {name} ---")
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}")
        raise StageError(name, e) from e


def load_data(cfg):
    if cfg.synthetic is not None:
        ds, _ = generate_synthetic(cfg.synthetic)
        return ds
    return load_csv(cfg.data, FeatureSchema.from_json(cfg.schema))


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def run_pipeline(cfg, rules=None, out_dir=None):
    """Runs every stage and writes the artifacts.

    Args:
        cfg: validated PipelineConfig.
        rules: RiskRuleSet overriding cfg.rules; None loads cfg.rules (or no rules).
        out_dir: output directory; defaults to cfg.out.

    Returns:
        PipelineResult with the held-out and training EvalReports.
    """
    out_dir = out_dir or cfg.out

    with stage("data"):
        ds = load_data(cfg)
        train, test = split(ds, cfg.test_fraction, cfg.split_seed)
        logger.info(f"Split: {len(train)} train / {len(test)} test rows")

    with stage("binarize"):
        bin_model = binarizer_mod.fit(train, cfg.n_quantiles)
        bm_train = binarizer_mod.binarize(bin_model, train)
        bm_test = binarizer_mod.binarize(bin_model, test)

    with stage("lrr"):
        Y = train.labels.astype(float)
        candidates = lrr.enumerate_candidates(bm_train, Y, cfg.max_degree, cfg.max_pairs)
        R = lrr.rule_matrix(bm_train, candidates)
        if cfg.lambda1 is None:
            lambda1, lambda2 = lrr.default_lambdas(Y, R, cfg.lambda_ratio)
        else:
            lambda1, lambda2 = cfg.lambda1, cfg.lambda1 / 2.0
        if cfg.lambda2 is not None:
            lambda2 = cfg.lambda2
        rule_model = lrr.fit(Y, R, lambda1, lambda2, cfg.tol, cfg.max_iters, candidates)
        logger.debug(f"LRR max KKT slack {lrr.kkt_violations(Y, R, rule_model).max():.3g}")
        tiers = lrr.extract_safety_tiers(rule_model)

    with stage("rules"):
        if rules is None:
            rules = load_rules(cfg.rules) if cfg.rules else RiskRuleSet()
        rules.bind(train.schema)

    with stage("pareto"):
        selection = None
        if cfg.apply_pareto and len(rules):
            selection = select(rules, train, cfg.min_coverage, cfg.max_jaccard)
            kept = selection.kept_ruleset()
        else:
            kept = rules

    with stage("explain"):
        e_train = build_matrix(train, tiers, bin_model, kept, cfg.precedence)
        e_test = build_matrix(test, tiers, bin_model, kept, cfg.precedence)

    with stage("ted"):
        ted_model = ted.fit(bm_train, train.labels, e_train.codes, cfg.ted_config())

    with stage("evaluate"):
        train_report = ted.evaluate(ted_model, bm_train, train.labels, e_train.codes, split="train")
        report = ted.evaluate(ted_model, bm_test, test.labels, e_test.codes, split="test")
        logger.info(f"Held-out Y+E accuracy {report.ye_accuracy:.4f} with {len(kept)} expert rules")

    result = PipelineResult(report, train_report, bin_model, rule_model, tiers, kept, selection,
                            e_train, e_test, ted_model)
    with stage("write"):
        write_artifacts(result, cfg, out_dir, train, test)
    return result


def write_artifacts(result, cfg, out_dir, train, test):
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "binarizer.json"), result.binarizer.to_dict())

    lrr_payload = result.rule_model.to_dict()
    lrr_payload["safety_tiers"] = result.tiers.to_dict()
    _write_json(os.path.join(out_dir, "lrr.json"), lrr_payload)

    if result.selection is not None:
        selection = result.selection.to_dict()
    else:
        selection = {"version": FORMAT_VERSION, "kind": "selection", "applied": False,
                     "kept": [{"rule": r.name, "code": r.code, "quadrant": r.quadrant} for r in result.rules],
                     "dropped": []}
    _write_json(os.path.join(out_dir, "selection.json"), selection)

    frame = pd.concat([result.train_codes.to_frame(train.row_index, "train"),
                       result.test_codes.to_frame(test.row_index, "test")])
    frame = frame.sort_values("row_index", kind="stable")
    frame.to_csv(os.path.join(out_dir, "explanations.csv"), index=False, lineterminator="\n")

    _write_json(os.path.join(out_dir, "ted.json"), result.ted_model.to_dict())
    _write_json(os.path.join(out_dir, "report.json"), {
        "version": FORMAT_VERSION,
        "kind": "pipeline_report",
        "rule_count": result.rule_count,
        "rules": [r.name for r in result.rules],
        "train": result.train_report.to_dict(),
        "test": result.report.to_dict(),
        "config": cfg.to_dict(),
    })
    logger.info(f"Artifacts written to {out_dir}")


def reevaluate(out_dir, cfg):
    """Rebuilds the held-out EvalReport from serialized artifacts alone."""
    bin_model = binarizer_mod.BinarizerModel.from_dict(_read_json(os.path.join(out_dir, "binarizer.json")))
    ted_model = ted.TedModel.from_dict(_read_json(os.path.join(out_dir, "ted.json")))
    codes = pd.read_csv(os.path.join(out_dir, "explanations.csv"))
    codes = codes[codes["split"] == "test"].set_index("row_index")["code"]

    _, test = split(load_data(cfg), cfg.test_fraction, cfg.split_seed)
    bm_test = binarizer_mod.binarize(bin_model, test)
    e_test = codes.loc[test.row_index].to_numpy(dtype=np.int64)
    return ted.evaluate(ted_model, bm_test, test.labels, e_test, split="test")


def _read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
