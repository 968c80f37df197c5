#%%
# Explanation Codes
# -----------------------------------------------------------------------------------------
"""Fuses safety tiers (codes 1-3) and expert risk rules (codes 4-11) into one code per
row, with 12 (drift) for rows neither stream explains. Codes never look at the label.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .binarizer import binarize
from .errors import ConfigError
from .ruledsl import match_mask

logger = logging.getLogger(__name__)

DRIFT = 12
SAFETY_CODES = (1, 2, 3)
PRECEDENCES = ("risk_first", "safety_first")


@dataclass(frozen=True, eq=False)
class ExplanationVector:
    codes: np.ndarray
    provenance: tuple

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "provenance", tuple(self.provenance))
        if len(self.provenance) != len(codes):
            raise ValueError(f"{len(self.provenance)} provenance entries for {len(codes)} codes")
        if codes.size and (codes.min() < 1 or codes.max() > DRIFT):
            raise ValueError("explanation codes must lie in 1..12")

    def __len__(self):
        return len(self.codes)

    def histogram(self):
        counts = np.bincount(self.codes, minlength=DRIFT + 1)
        return {code: int(counts[code]) for code in range(1, DRIFT + 1)}

    def to_frame(self, row_index, split):
        return pd.DataFrame({
            "row_index": np.asarray(row_index),
            "split": split,
            "code": self.codes,
            "provenance": list(self.provenance),
        })


def tier_label(code, candidate):
    return f"tier{code}:{candidate}"


def _check_precedence(precedence):
    if precedence not in PRECEDENCES:
        raise ConfigError(f"precedence must be one of {PRECEDENCES}, got '{precedence}'")


def assign_code(row, tiers, binarizer, risks, precedence="risk_first"):
    """Code and provenance for one raw row.

    Risk rules are tried in ascending code order, safety tiers strongest first
    (safety rules are tested on the binarized row). With risk_first a matching risk
    rule beats any tier; safety_first reverses that.
    """
    _check_precedence(precedence)
    bits = binarizer.transform_row(row)[None, :]

    risk = None
    for rule in risks.by_precedence():
        if rule.evaluate(row):
            risk = (rule.code, f"rule:{rule.name}")
            break
    safety = None
    for code in SAFETY_CODES:
        hit = next((c for c in tiers.tiers[code] if c.mask(bits)[0]), None)
        if hit is not None:
            safety = (code, tier_label(code, hit))
            break

    order = (risk, safety) if precedence == "risk_first" else (safety, risk)
    for found in order:
        if found is not None:
            return found
    return DRIFT, "drift"


def build_matrix(ds, tiers, binarizer, risks, precedence="risk_first"):
    """Vectorized assign_code over a whole dataset."""
    _check_precedence(precedence)
    n = len(ds)
    bits = binarize(binarizer, ds).bits

    risk_code = np.zeros(n, dtype=np.int64)
    risk_prov = np.empty(n, dtype=object)
    for rule in risks.by_precedence():
        hit = match_mask(rule, ds.frame) & (risk_code == 0)
        risk_code[hit] = rule.code
        risk_prov[hit] = f"rule:{rule.name}"

    safety_code = np.zeros(n, dtype=np.int64)
    safety_prov = np.empty(n, dtype=object)
    for code in SAFETY_CODES:
        for candidate in tiers.tiers[code]:
            hit = candidate.mask(bits) & (safety_code == 0)
            safety_code[hit] = code
            safety_prov[hit] = tier_label(code, candidate)

    first, second = (risk_code, risk_prov), (safety_code, safety_prov)
    if precedence == "safety_first":
        first, second = second, first
    codes = np.full(n, DRIFT, dtype=np.int64)
    prov = np.full(n, "drift", dtype=object)
    for code_arr, prov_arr in (second, first):
        hit = code_arr > 0
        codes[hit] = code_arr[hit]
        prov[hit] = prov_arr[hit]

    ev = ExplanationVector(codes, tuple(prov))
    hist = {k: v for k, v in ev.histogram().items() if v}
    logger.info(f"Explanation codes over {n} rows: {hist}")
    return ev
