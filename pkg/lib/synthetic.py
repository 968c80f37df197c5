#%%
# Synthetic Churn Data with Planted Rules
# -----------------------------------------------------------------------------------------
"""Generator for churn tables whose explanation structure is known exactly.

Stay rows come from a few dense safety patterns (2-3 conditions each). Churn rows come
from sparse, mutually exclusive risk conjunctions, plus background churn that matches
no planted rule. Risk rows are placed inside a compatible safety pattern so they look
safe to a learner that only sees dense structure. Every row is resampled until it
matches exactly the planted conjunctions its group allows.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from .data import CATEGORICAL, NUMERIC, Dataset, FeatureSchema
from .errors import ConfigError
from .explain import DRIFT, ExplanationVector, tier_label
from .predicates import AtomicPredicate as P
from .ruledsl import RiskRule, RiskRuleSet

logger = logging.getLogger(__name__)

LEVELS = {
    "tenure": (1, 3, 6, 12, 24, 48, 72),
    "monthly_charges": (20, 40, 60, 80, 100, 120),
    "payment_delay": (0, 5, 10, 20, 30, 45, 60),
    "support_calls": (0, 1, 2, 4, 6, 8),
    "usage_hours": (5, 15, 30, 50, 80),
    "spend_change": (-40, -20, -10, 0, 10, 20),
    "logins": (0, 2, 5, 10, 20, 30),
    "age": (20, 30, 40, 50, 60, 70),
    "contract": ("annual", "monthly", "two_year"),
    "payment_method": ("auto", "card", "check"),
    "plan": ("basic", "plus", "premium"),
}
NUMERIC_FEATURES = ("tenure", "monthly_charges", "payment_delay", "support_calls",
                    "usage_hours", "spend_change", "logins", "age")
CATEGORICAL_FEATURES = ("contract", "payment_method", "plan")
LABEL_COLUMN = "churn"
ID_COLUMN = "customer_id"

MAX_SAFETY_PATTERNS = 3
MAX_RISK_DISJUNCTS = 8
_MAX_REPAIR_PASSES = 200


@dataclass(frozen=True)
class SafetyPattern:
    name: str
    predicates: tuple

    def __str__(self):
        return " AND ".join(str(p) for p in self.predicates)


SAFETY_CATALOGUE = (
    SafetyPattern("two_year_low_support", (P("contract", "==", "two_year"), P("support_calls", "<=", 2))),
    SafetyPattern("autopay_on_time", (P("payment_method", "==", "auto"), P("payment_delay", "<=", 5))),
    SafetyPattern("premium_annual_quiet", (P("plan", "==", "premium"), P("contract", "==", "annual"),
                                           P("support_calls", "<=", 1))),
)

RISK_CATALOGUE = (
    ("late_payer", "financial", (P("payment_delay", ">", 20), P("monthly_charges", ">", 80))),
    ("monthly_newcomer", "structural", (P("contract", "==", "monthly"), P("tenure", "<=", 6))),
    ("support_escalation", "interaction", (P("support_calls", ">", 4), P("spend_change", "<=", -20))),
    ("disengaged", "engagement", (P("logins", "<=", 2), P("usage_hours", "<=", 15))),
    ("price_shock", "financial", (P("monthly_charges", ">", 100), P("spend_change", ">", 10))),
    ("basic_plan_senior", "structural", (P("plan", "==", "basic"), P("age", ">", 60))),
    ("silent_heavy_user", "interaction", (P("support_calls", "<=", 0), P("usage_hours", ">", 50))),
    ("lapsed_login", "engagement", (P("logins", "<=", 0), P("tenure", ">", 24))),
)


@dataclass(frozen=True)
class SynthConfig:
    n_rows: int = 2000
    churn_rate: float = 0.56
    n_safety_patterns: int = 2
    n_risk_disjuncts: int = 4
    risk_disjunct_coverage: float = 0.10
    noise_rate: float = 0.05
    seed: int = 0

    def validate(self):
        if self.n_rows < 1:
            raise ConfigError(f"n_rows must be >= 1, got {self.n_rows}")
        if not 0 < self.churn_rate < 1:
            raise ConfigError(f"churn_rate must lie in (0, 1), got {self.churn_rate}")
        if not 0 <= self.noise_rate < 0.5:
            raise ConfigError(f"noise_rate must lie in [0, 0.5), got {self.noise_rate}")
        if not 1 <= self.n_safety_patterns <= MAX_SAFETY_PATTERNS:
            raise ConfigError(f"n_safety_patterns must lie in 1..{MAX_SAFETY_PATTERNS}, got {self.n_safety_patterns}")
        if not 0 <= self.n_risk_disjuncts <= MAX_RISK_DISJUNCTS:
            raise ConfigError(f"n_risk_disjuncts must lie in 0..{MAX_RISK_DISJUNCTS}, got {self.n_risk_disjuncts}")
        if not 0 <= self.risk_disjunct_coverage <= 1:
            raise ConfigError(f"risk_disjunct_coverage must lie in [0, 1], got {self.risk_disjunct_coverage}")
        if self.n_risk_disjuncts * self.risk_disjunct_coverage > self.churn_rate + 1e-12:
            raise ConfigError(
                f"risk coverage budget exceeded: {self.n_risk_disjuncts} x {self.risk_disjunct_coverage} > churn_rate {self.churn_rate}")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown synthetic config keys: {sorted(unknown)}")
        return cls(**d)


def synthetic_schema():
    features = [(n, NUMERIC) for n in NUMERIC_FEATURES] + [(n, CATEGORICAL) for n in CATEGORICAL_FEATURES]
    return FeatureSchema(tuple(features), LABEL_COLUMN, (ID_COLUMN,))


def safety_code(index):
    return min(index + 1, 3)


def planted_safety_patterns(cfg):
    return list(SAFETY_CATALOGUE[:cfg.n_safety_patterns])


def planted_risk_rules(cfg):
    """The active risk conjunctions as a rule set (codes 4, 5, ...)."""
    return RiskRuleSet(tuple(RiskRule(name, 4 + i, quadrant, preds)
                             for i, (name, quadrant, preds) in enumerate(RISK_CATALOGUE[:cfg.n_risk_disjuncts])))


# --- Row sampling ---
def _allowed_levels(pinned):
    allowed = {}
    for feature, levels in LEVELS.items():
        keep = [v for v in levels if all(p.evaluate(v) for p in pinned if p.feature == feature)]
        allowed[feature] = keep
    return allowed


def _compatible(pinned):
    return all(_allowed_levels(pinned).values())


def _matches(values, predicates):
    return all(p.evaluate(values[p.feature]) for p in predicates)


def _sample_row(rng, pinned, forbidden):
    """Draws one row satisfying all pinned predicates and none of the forbidden conjunctions."""
    allowed = _allowed_levels(pinned)
    empty = [f for f, levels in allowed.items() if not levels]
    if empty:
        raise ConfigError(f"pinned conditions leave no level for '{empty[0]}'")
    values = {f: levels[rng.integers(len(levels))] for f, levels in allowed.items()}

    for _ in range(_MAX_REPAIR_PASSES):
        violated = [conj for conj in forbidden if _matches(values, conj)]
        if not violated:
            return values
        for conj in violated:
            if not _matches(values, conj):
                continue
            options = [p for p in conj if any(not p.evaluate(v) for v in allowed[p.feature])]
            if not options:
                raise ConfigError(f"pinned conditions imply a forbidden conjunction: {' AND '.join(map(str, conj))}")
            p = options[rng.integers(len(options))]
            levels = [v for v in allowed[p.feature] if not p.evaluate(v)]
            values[p.feature] = levels[rng.integers(len(levels))]
    raise ConfigError("could not draw a row that avoids all forbidden conjunctions")


def generate_synthetic(cfg):
    """Generates a dataset with planted structure and its ground-truth explanation codes.

    Args:
        cfg: SynthConfig.

    Returns:
        (Dataset, ExplanationVector). Truth codes are the safety tier of a stay row's
        pattern, 4 + index for a risk row, and 12 for background churn and flipped rows.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    patterns = planted_safety_patterns(cfg)
    risks = list(planted_risk_rules(cfg))
    safety_conjs = [pat.predicates for pat in patterns]
    risk_conjs = [rule.predicates for rule in risks]

    n = cfg.n_rows
    n_churn = int(np.floor(n * cfg.churn_rate + 0.5))
    n_risk_each = int(np.floor(n * cfg.risk_disjunct_coverage + 0.5))
    n_background = n_churn - n_risk_each * len(risks)
    if n_background < 0:
        raise ConfigError(f"{len(risks)} disjuncts of {n_risk_each} rows exceed {n_churn} churn rows")
    n_stay = n - n_churn

    rows, labels, codes, prov = [], [], [], []

    # --- Stay rows: split evenly over the safety patterns ---
    for j, pat in enumerate(patterns):
        count = n_stay // len(patterns) + (1 if j < n_stay % len(patterns) else 0)
        forbidden = [c for k, c in enumerate(safety_conjs) if k != j] + risk_conjs
        for _ in range(count):
            rows.append(_sample_row(rng, pat.predicates, forbidden))
            labels.append(0)
            codes.append(safety_code(j))
            prov.append(tier_label(safety_code(j), pat))

    # --- Risk rows: hosted round-robin in compatible safety patterns ---
    for i, rule in enumerate(risks):
        hosts = [j for j, pat in enumerate(patterns) if _compatible(pat.predicates + rule.predicates)]
        other_risks = [c for k, c in enumerate(risk_conjs) if k != i]
        for k in range(n_risk_each):
            host = hosts[k % len(hosts)] if hosts else None
            pinned = rule.predicates + (patterns[host].predicates if host is not None else ())
            forbidden = [c for m, c in enumerate(safety_conjs) if m != host] + other_risks
            rows.append(_sample_row(rng, pinned, forbidden))
            labels.append(1)
            codes.append(rule.code)
            prov.append(f"rule:{rule.name}")

    # --- Background churn: matches nothing planted ---
    for _ in range(n_background):
        rows.append(_sample_row(rng, (), safety_conjs + risk_conjs))
        labels.append(1)
        codes.append(DRIFT)
        prov.append("drift")

    order = rng.permutation(n)
    frame = pd.DataFrame(rows, columns=list(LEVELS)).iloc[order].reset_index(drop=True)
    schema = synthetic_schema()
    frame = frame[schema.names]
    for name in NUMERIC_FEATURES:
        frame[name] = frame[name].astype(float)
    for name in CATEGORICAL_FEATURES:
        frame[name] = frame[name].astype(object)
    labels = np.asarray(labels, dtype=np.int64)[order]
    codes = np.asarray(codes, dtype=np.int64)[order]
    prov = [prov[k] for k in order]

    n_flip = int(np.floor(cfg.noise_rate * n + 0.5))
    if n_flip:
        flipped = rng.choice(n, size=n_flip, replace=False)
        labels[flipped] = 1 - labels[flipped]
        codes[flipped] = DRIFT
        for k in flipped:
            prov[k] = "drift"

    logger.info(f"Synthetic data: {n} rows, {int(labels.sum())} churn, "
                f"{len(patterns)} safety patterns, {len(risks)} risk disjuncts x {n_risk_each} rows, {n_flip} flipped")
    return Dataset(schema, frame, labels), ExplanationVector(codes, tuple(prov))
