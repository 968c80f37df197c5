#%%
# Rule Selection by Coverage and Overlap
# -----------------------------------------------------------------------------------------
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, CoverageError
from .ruledsl import RiskRuleSet, match_mask

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
LOW_COVERAGE = "low_coverage"
REDUNDANT = "redundant"


@dataclass(frozen=True)
class RuleStats:
    """Coverage is measured on churn rows; match_set holds positions of all matched rows."""
    rule: object
    coverage: float
    match_set: frozenset


@dataclass(frozen=True)
class DroppedRule:
    rule: object
    reason: str
    coverage: float
    with_rule: Optional[str] = None
    jaccard: Optional[float] = None

    def to_dict(self):
        d = {"rule": self.rule.name, "code": self.rule.code, "reason": self.reason, "coverage": self.coverage}
        if self.reason == REDUNDANT:
            d.update({"with": self.with_rule, "jaccard": self.jaccard})
        return d


@dataclass(frozen=True, eq=False)
class SelectionReport:
    kept: tuple
    dropped: tuple
    stats: dict
    pairwise_jaccard: np.ndarray

    def kept_ruleset(self):
        return RiskRuleSet(tuple(self.kept))

    def summary(self):
        """Mean and max off-diagonal Jaccard among kept rules (0 with fewer than two)."""
        k = len(self.kept)
        if k < 2:
            return {"mean_jaccard": 0.0, "max_jaccard": 0.0}
        off = self.pairwise_jaccard[~np.eye(k, dtype=bool)]
        return {"mean_jaccard": float(off.mean()), "max_jaccard": float(off.max())}

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "kind": "selection",
            "applied": True,
            "kept": [{"rule": r.name, "code": r.code, "quadrant": r.quadrant,
                      "coverage": self.stats[r.name].coverage} for r in self.kept],
            "dropped": [d.to_dict() for d in self.dropped],
            "pairwise_jaccard": self.pairwise_jaccard.tolist(),
            **self.summary(),
        }


def jaccard(a, b):
    """|A & B| / |A | B|, with 0 for two empty sets."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def coverage(rule, ds):
    churn = ds.labels == 1
    n_churn = int(churn.sum())
    if n_churn == 0:
        raise CoverageError("coverage is undefined on a dataset without churn rows")
    mask = match_mask(rule, ds.frame)
    return RuleStats(rule, float((mask & churn).sum()) / n_churn, frozenset(np.flatnonzero(mask).tolist()))


def select(rules, ds, min_coverage=0.01, max_jaccard=0.5):
    """Greedy down-selection of expert rules.

    Rules under min_coverage are dropped first. The rest are scanned by descending
    coverage (ties by ascending code); a rule is kept iff its Jaccard with every
    rule kept so far is <= max_jaccard.
    """
    if not 0 <= min_coverage <= 1:
        raise ConfigError(f"min_coverage must lie in [0, 1], got {min_coverage}")
    if not 0 <= max_jaccard <= 1:
        raise ConfigError(f"max_jaccard must lie in [0, 1], got {max_jaccard}")

    stats = {rule.name: coverage(rule, ds) for rule in rules}
    dropped, kept = [], []
    ranked = []
    for rule in rules:
        s = stats[rule.name]
        if s.coverage < min_coverage:
            dropped.append(DroppedRule(rule, LOW_COVERAGE, s.coverage))
        else:
            ranked.append(rule)
    ranked.sort(key=lambda r: (-stats[r.name].coverage, r.code))

    for rule in ranked:
        s = stats[rule.name]
        overlaps = [(jaccard(s.match_set, stats[k.name].match_set), k) for k in kept]
        over = [(j, k) for j, k in overlaps if j > max_jaccard]
        if over:
            worst = max(over, key=lambda item: item[0])
            dropped.append(DroppedRule(rule, REDUNDANT, s.coverage, worst[1].name, worst[0]))
        else:
            kept.append(rule)

    matrix = np.array([[jaccard(stats[a.name].match_set, stats[b.name].match_set) for b in kept] for a in kept],
                      dtype=float).reshape(len(kept), len(kept))
    report = SelectionReport(tuple(kept), tuple(dropped), stats, matrix)
    logger.info(f"Rule selection: kept {[r.name for r in kept]}, dropped {len(dropped)}; {report.summary()}")
    return report
