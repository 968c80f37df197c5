#%%
# Linear Rule Regression
# -----------------------------------------------------------------------------------------
"""Sparse least-squares regression over conjunction rules.

Minimizes

    1/2 ||Y - b - R w||^2 + lambda1 ||w||_1 + lambda2 * sum_{w_j != 0} C(r_j) |w_j|

with C(r) = 1 + number of atoms and b unpenalized. The complexity term acts as a
per-rule addition to the L1 threshold, so each coordinate update is a soft-threshold
at lambda1 + lambda2 * C(r_j). Rules with negative weight push toward retention and
become the safety tiers.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ModelError
from .predicates import parse_predicate

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class RuleCandidate:
    """Conjunction of binarized columns; predicates may be empty for anonymous columns."""
    atoms: tuple
    predicates: tuple = ()

    @property
    def complexity(self):
        return 1 + len(self.atoms)

    @property
    def degree(self):
        return len(self.atoms)

    def mask(self, bits):
        return bits[:, list(self.atoms)].all(axis=1)

    def __str__(self):
        if not self.predicates:
            return " AND ".join(f"col{j}" for j in self.atoms)
        return " AND ".join(str(p) for p in self.predicates)

    def to_dict(self):
        return {"rule": str(self), "atoms": list(self.atoms), "predicates": [str(p) for p in self.predicates]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(int(j) for j in d["atoms"]), tuple(parse_predicate(p) for p in d["predicates"]))


def anonymous_candidates(n_columns):
    """One degree-1 candidate per column of a raw rule matrix."""
    return [RuleCandidate((j,)) for j in range(n_columns)]


@dataclass(frozen=True, eq=False)
class RuleModel:
    candidates: tuple
    weights: np.ndarray
    intercept: float
    lambda1: float
    lambda2: float
    converged: bool = True
    n_iter: int = 0
    objective_history: tuple = field(default=())

    def __post_init__(self):
        if len(self.weights) != len(self.candidates):
            raise ModelError(f"{len(self.weights)} weights for {len(self.candidates)} candidates")

    @property
    def complexities(self):
        return np.array([c.complexity for c in self.candidates], dtype=float)

    def nonzero(self):
        return np.flatnonzero(self.weights)

    def predict(self, R):
        return self.intercept + np.asarray(R, dtype=float) @ self.weights

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "kind": "rule_model",
            "candidates": [c.to_dict() for c in self.candidates],
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "lambda1": float(self.lambda1),
            "lambda2": float(self.lambda2),
            "converged": bool(self.converged),
            "n_iter": int(self.n_iter),
            "objective_history": [float(v) for v in self.objective_history],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            candidates=tuple(RuleCandidate.from_dict(c) for c in d["candidates"]),
            weights=np.array(d["weights"], dtype=float),
            intercept=float(d["intercept"]),
            lambda1=float(d["lambda1"]),
            lambda2=float(d["lambda2"]),
            converged=bool(d["converged"]),
            n_iter=int(d["n_iter"]),
            objective_history=tuple(d["objective_history"]),
        )


@dataclass(frozen=True)
class SafetyTiers:
    """Negative-weight rules grouped into codes 1 (strongest) to 3 by |w| tertiles."""
    tiers: dict
    weights: dict
    tier_cutoffs: tuple

    def members(self, code):
        return list(zip(self.tiers[code], self.weights[code]))

    def is_empty(self):
        return not any(self.tiers[k] for k in (1, 2, 3))

    def to_dict(self):
        return {
            "tier_cutoffs": [float(c) for c in self.tier_cutoffs],
            "tiers": {str(k): [{"rule": str(c), "atoms": list(c.atoms), "weight": float(w)}
                               for c, w in self.members(k)] for k in (1, 2, 3)},
        }


# --- Candidate pool ---
def enumerate_candidates(bm, Y, max_degree=2, max_pairs=32):
    """All atomic columns, plus the best-scoring cross-feature pairs.

    Pairs are scored by support * |corr(pair indicator, Y)| and ranked by descending
    score, then by column indices. Pairs that never fire stay in the pool with score 0.
    """
    if max_degree not in (1, 2):
        raise ConfigError(f"max_degree must be 1 or 2, got {max_degree}")
    if max_pairs < 0:
        raise ConfigError(f"max_pairs must be >= 0, got {max_pairs}")

    candidates = [RuleCandidate((j,), (p,)) for j, p in enumerate(bm.columns)]
    if max_degree == 1 or max_pairs == 0 or bm.n_columns < 2:
        return candidates

    X = bm.bits.astype(float)
    Y = np.asarray(Y, dtype=float)
    n = X.shape[0]
    support = (X.T @ X) / n
    joint = (X * Y[:, None]).T @ X / n
    y_mean = Y.mean()
    y_std = Y.std()
    cov = joint - support * y_mean
    z_std = np.sqrt(np.clip(support * (1.0 - support), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where((z_std > 0) & (y_std > 0), cov / (z_std * y_std), 0.0)
    score = support * np.abs(corr)

    features = np.array([p.feature for p in bm.columns], dtype=object)
    i_idx, j_idx = np.triu_indices(bm.n_columns, k=1)
    keep = features[i_idx] != features[j_idx]
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    pair_scores = score[i_idx, j_idx]
    order = np.lexsort((j_idx, i_idx, -pair_scores))[:max_pairs]

    for k in order:
        i, j = int(i_idx[k]), int(j_idx[k])
        candidates.append(RuleCandidate((i, j), (bm.columns[i], bm.columns[j])))
    logger.info(f"Candidate pool: {bm.n_columns} atoms + {len(order)} pairs")
    return candidates


def rule_matrix(bm, candidates):
    """N x K float matrix of candidate truth values."""
    R = np.empty((bm.n_rows, len(candidates)), dtype=float)
    for k, c in enumerate(candidates):
        R[:, k] = c.mask(bm.bits)
    return R


# --- Objective and solver ---
def _penalty(weights, complexities, lambda1, lambda2):
    absw = np.abs(weights)
    return lambda1 * absw.sum() + lambda2 * (complexities * absw)[weights != 0].sum()


def objective(Y, R, model):
    """Penalized objective of a fitted (or hand-built) model on (Y, R)."""
    w = np.asarray(model.weights, dtype=float)
    if not np.isfinite(w).all() or not math.isfinite(model.intercept):
        raise ModelError("objective is undefined for non-finite weights")
    residual = np.asarray(Y, dtype=float) - model.predict(R)
    return 0.5 * float(residual @ residual) + float(_penalty(w, model.complexities, model.lambda1, model.lambda2))


def default_lambdas(Y, R, ratio=0.1):
    """lambda1 = ratio * max_j |centered column_j . centered Y|, lambda2 = lambda1 / 2."""
    Y = np.asarray(Y, dtype=float)
    R = np.asarray(R, dtype=float)
    if R.shape[1] == 0:
        return 0.0, 0.0
    grad = (R - R.mean(axis=0)).T @ (Y - Y.mean())
    lambda1 = float(ratio * np.abs(grad).max())
    return lambda1, lambda1 / 2.0


def fit(Y, R, lambda1, lambda2, tol=1e-6, max_iters=1000, candidates=None):
    """Cyclic coordinate descent with soft-thresholding.

    Columns and Y are centered so the intercept drops out and is recovered as
    mean(Y) - mean(R) . w. Coordinates are visited in candidate order; the sweep
    loop stops once the largest weight change in a sweep is below tol.

    Args:
        Y: N targets (churn = 1).
        R: N x K rule evaluation matrix.
        lambda1: L1 strength.
        lambda2: complexity strength.
        tol: convergence threshold on max |delta w| per sweep.
        max_iters: sweep cap; hitting it flags the model non-converged.
        candidates: K RuleCandidates; anonymous degree-1 candidates when omitted.

    Returns:
        RuleModel
    """
    if lambda1 < 0 or lambda2 < 0:
        raise ConfigError(f"lambdas must be >= 0, got {lambda1}, {lambda2}")
    if tol <= 0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    Y = np.asarray(Y, dtype=float)
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != Y.shape[0]:
        raise ModelError(f"rule matrix shape {R.shape} does not match {Y.shape[0]} targets")
    if candidates is None:
        candidates = anonymous_candidates(R.shape[1])
    candidates = tuple(candidates)
    if len(candidates) != R.shape[1]:
        raise ModelError(f"{len(candidates)} candidates for {R.shape[1]} rule columns")

    complexities = np.array([c.complexity for c in candidates], dtype=float)
    thresh = lambda1 + lambda2 * complexities
    x_mean = R.mean(axis=0)
    y_mean = Y.mean()
    Xc = R - x_mean
    yc = Y - y_mean
    gram = Xc.T @ Xc
    norms = np.diag(gram).copy()
    grad = Xc.T @ yc                      # Xc^T r, kept current as w changes
    w = np.zeros(R.shape[1])

    def surrogate():
        r = yc - Xc @ w
        return 0.5 * float(r @ r) + float(_penalty(w, complexities, lambda1, lambda2))

    history = [surrogate()]
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        max_delta = 0.0
        for j in range(len(w)):
            if norms[j] <= 0.0:
                continue
            rho = grad[j] + norms[j] * w[j]
            if abs(rho) <= thresh[j] * (1.0 + _TIE_RTOL):
                new = 0.0
            else:
                new = math.copysign(abs(rho) - thresh[j], rho) / norms[j]
            delta = new - w[j]
            if delta != 0.0:
                grad -= delta * gram[:, j]
                w[j] = new
                max_delta = max(max_delta, abs(delta))
        history.append(surrogate())
        if history[-1] > history[-2] + 1e-9 * max(1.0, abs(history[-2])):
            logger.warning(f"LRR objective rose in sweep {n_iter}: {history[-2]:.12g} -> {history[-1]:.12g}")
        if max_delta < tol:
            converged = True
            break

    if not converged:
        logger.warning(f"LRR did not converge in {max_iters} sweeps (tol={tol})")
    intercept = float(y_mean - x_mean @ w)
    model = RuleModel(candidates, w, intercept, float(lambda1), float(lambda2), converged, n_iter, tuple(history))
    n_neg = int((w < 0).sum())
    logger.info(f"LRR fitted: {int((w != 0).sum())} nonzero rules ({n_neg} safety) in {n_iter} sweeps")
    return model


def kkt_violations(Y, R, model):
    """Per-coordinate optimality slack; <= 0 everywhere at an exact optimum.

    Zero coordinates: |x_j . r| - threshold_j. Nonzero: |x_j . r + sign(w_j) threshold_j|.
    """
    Y = np.asarray(Y, dtype=float)
    R = np.asarray(R, dtype=float)
    Xc = R - R.mean(axis=0)
    r = (Y - Y.mean()) - Xc @ model.weights
    g = Xc.T @ r
    thresh = model.lambda1 + model.lambda2 * model.complexities
    return np.where(model.weights == 0, np.abs(g) - thresh, np.abs(g - np.sign(model.weights) * thresh))


# --- Safety tiers ---
def extract_safety_tiers(model):
    """Splits negative-weight rules into |w| tertiles; ties at a cutoff go to the stronger tier."""
    neg = [k for k in range(len(model.candidates)) if model.weights[k] < 0]
    neg.sort(key=lambda k: (-abs(model.weights[k]), k))
    mags = [abs(float(model.weights[k])) for k in neg]

    tiers = {1: [], 2: [], 3: []}
    weights = {1: [], 2: [], 3: []}
    if not neg:
        logger.warning("No negative-weight rules: safety tiers are empty")
        return SafetyTiers({k: () for k in tiers}, {k: () for k in tiers}, (0.0, 0.0))

    if len(neg) < 3:
        cutoffs = (mags[-1], mags[-1])
    else:
        n = len(neg)
        cutoffs = (mags[math.ceil(n / 3) - 1], mags[math.ceil(2 * n / 3) - 1])

    for k, m in zip(neg, mags):
        code = 1 if m >= cutoffs[0] else 2 if m >= cutoffs[1] else 3
        tiers[code].append(model.candidates[k])
        weights[code].append(float(model.weights[k]))

    logger.info(f"Safety tiers: {len(tiers[1])}/{len(tiers[2])}/{len(tiers[3])} rules")
    return SafetyTiers({k: tuple(v) for k, v in tiers.items()},
                       {k: tuple(v) for k, v in weights.items()}, cutoffs)
