#%%
# Evaluation Metrics
# -----------------------------------------------------------------------------------------
import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from .errors import ModelError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
LABELS = (0, 1)
CLASS_NAMES = {0: "0 (Stay)", 1: "1 (Churn)"}


def weighted_average(values, supports):
    """Support-weighted mean of per-class values."""
    values = np.asarray(values, dtype=float)
    supports = np.asarray(supports, dtype=float)
    total = supports.sum()
    if total == 0:
        return 0.0
    return float((values * supports).sum() / total)


@dataclass(frozen=True)
class EvalReport:
    """Joint label/explanation accuracies plus a per-label classification report."""
    y_accuracy: float
    e_accuracy: float
    ye_accuracy: float
    n: int
    per_class: dict
    weighted: dict
    confusion: tuple
    split: str = field(default="test")

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "kind": "eval_report",
            "split": self.split,
            "n": self.n,
            "y_accuracy": self.y_accuracy,
            "e_accuracy": self.e_accuracy,
            "ye_accuracy": self.ye_accuracy,
            "per_class": {str(k): dict(v) for k, v in self.per_class.items()},
            "weighted": dict(self.weighted),
            "confusion": [list(r) for r in self.confusion],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            y_accuracy=float(d["y_accuracy"]),
            e_accuracy=float(d["e_accuracy"]),
            ye_accuracy=float(d["ye_accuracy"]),
            n=int(d["n"]),
            per_class={int(k): dict(v) for k, v in d["per_class"].items()},
            weighted=dict(d["weighted"]),
            confusion=tuple(tuple(int(x) for x in r) for r in d["confusion"]),
            split=d.get("split", "test"),
        )

    def format_table(self):
        """Aligned text report: one row per label and a support-weighted average row."""
        lines = [f"{'Class':<12}{'Precision':>10}{'Recall':>10}{'F1-Score':>10}{'Support':>10}"]
        for label in LABELS:
            row = self.per_class[label]
            lines.append(f"{CLASS_NAMES[label]:<12}{row['precision']:>10.2f}{row['recall']:>10.2f}"
                         f"{row['f1']:>10.2f}{row['support']:>10d}")
        w = self.weighted
        lines.append(f"{'Wt. Avg':<12}{w['precision']:>10.2f}{w['recall']:>10.2f}{w['f1']:>10.2f}{self.n:>10d}")
        lines.append("")
        lines.append(f"Y accuracy:   {self.y_accuracy:.4f}")
        lines.append(f"E accuracy:   {self.e_accuracy:.4f}")
        lines.append(f"Y+E accuracy: {self.ye_accuracy:.4f}")
        return "\n".join(lines)


def build_report(y_true, y_pred, e_true, e_pred, split="test"):
    """Scores joint predictions against label and explanation targets."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    e_true = np.asarray(e_true, dtype=np.int64)
    e_pred = np.asarray(e_pred, dtype=np.int64)
    n = len(y_true)
    if n == 0:
        raise ModelError("cannot evaluate on an empty set")
    if not (len(y_pred) == len(e_true) == len(e_pred) == n):
        raise ModelError("prediction and target lengths differ")

    y_ok = y_true == y_pred
    e_ok = e_true == e_pred
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=list(LABELS), zero_division=0)
    per_class = {
        label: {"precision": float(precision[k]), "recall": float(recall[k]),
                "f1": float(f1[k]), "support": int(support[k])}
        for k, label in enumerate(LABELS)
    }
    weighted = {
        "precision": weighted_average(precision, support),
        "recall": weighted_average(recall, support),
        "f1": weighted_average(f1, support),
    }
    cm = confusion_matrix(y_true, y_pred, labels=list(LABELS))
    return EvalReport(
        y_accuracy=float(y_ok.mean()),
        e_accuracy=float(e_ok.mean()),
        ye_accuracy=float((y_ok & e_ok).mean()),
        n=n,
        per_class=per_class,
        weighted=weighted,
        confusion=tuple(tuple(int(x) for x in r) for r in cm),
        split=split,
    )
