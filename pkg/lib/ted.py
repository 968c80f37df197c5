#%%
# Joint Label + Explanation Classifier
# -----------------------------------------------------------------------------------------
"""One-vs-rest logistic regression over Cartesian (y, e) classes.

Every observed (label, explanation code) pair becomes one class, so a single argmax
predicts both. Training is full-batch gradient descent from zero weights on
column-centered bits with step min(learning_rate, 1/L), L being the smoothness
bound of the loss, which keeps the training loss non-increasing.
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CodecError, ConfigError, ModelError
from .metrics import build_report

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class CartesianCodec:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(y), int(e)) for y, e in self.pairs)
        if len(set(pairs)) != len(pairs):
            raise ModelError("codec pairs must be unique")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "_index", {p: k for k, p in enumerate(pairs)})

    @classmethod
    def from_labels(cls, Y, E):
        return cls(tuple(sorted(set(zip(np.asarray(Y).tolist(), np.asarray(E).tolist())))))

    @property
    def n_classes(self):
        return len(self.pairs)

    def encode(self, y, e):
        try:
            return self._index[(int(y), int(e))]
        except KeyError:
            raise CodecError((int(y), int(e))) from None

    def encode_many(self, Y, E):
        return np.array([self.encode(y, e) for y, e in zip(Y, E)], dtype=np.int64)

    def decode(self, index):
        return self.pairs[index]


@dataclass(frozen=True)
class TedConfig:
    learning_rate: float = 1.0
    epochs: int = 800
    l2: float = 1e-4
    seed: int = 0

    def validate(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.l2 < 0:
            raise ConfigError(f"l2 must be >= 0, got {self.l2}")
        return self


@dataclass(frozen=True, eq=False)
class TedModel:
    codec: CartesianCodec
    weights: np.ndarray
    biases: np.ndarray
    offsets: np.ndarray
    config: TedConfig
    loss_history: tuple = field(default=())

    @property
    def n_features(self):
        return self.weights.shape[1]

    def scores(self, bits):
        bits = np.asarray(bits, dtype=float)
        if bits.shape[-1] != self.n_features:
            raise ModelError(f"feature width {bits.shape[-1]} does not match model width {self.n_features}")
        return (bits - self.offsets) @ self.weights.T + self.biases

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "kind": "ted_model",
            "pairs": [list(p) for p in self.codec.pairs],
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "offsets": self.offsets.tolist(),
            "config": asdict(self.config),
            "loss_history": [float(v) for v in self.loss_history],
        }

    @classmethod
    def from_dict(cls, d):
        n_features = len(d["offsets"])
        return cls(
            codec=CartesianCodec(tuple(tuple(p) for p in d["pairs"])),
            weights=np.array(d["weights"], dtype=float).reshape(len(d["pairs"]), n_features),
            biases=np.array(d["biases"], dtype=float),
            offsets=np.array(d["offsets"], dtype=float),
            config=TedConfig(**d["config"]),
            loss_history=tuple(d["loss_history"]),
        )


# --- Loss ---
def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def ovr_loss_and_grad(W, b, X, T, l2):
    """Mean over rows of the summed per-class logistic losses, plus l2/2 ||W||^2.

    Args:
        W: K x M weights.
        b: K biases.
        X: N x M features.
        T: N x K one-hot targets.
        l2: ridge strength on W (biases unpenalized).

    Returns:
        (loss, grad_W, grad_b)
    """
    n = X.shape[0]
    Z = X @ W.T + b
    loss = float((np.logaddexp(0.0, Z) - T * Z).sum() / n + 0.5 * l2 * (W * W).sum())
    G = (_sigmoid(Z) - T) / n
    return loss, G.T @ X + l2 * W, G.sum(axis=0)


def _step_size(X, config):
    n = X.shape[0]
    sigma_max = float(np.linalg.norm(X, 2)) if X.size else 0.0
    smoothness = 0.25 * max(sigma_max ** 2 / n, 1.0) + config.l2
    return min(config.learning_rate, 1.0 / smoothness)


# --- Training and prediction ---
def fit(bm, Y, E, config=None):
    """Trains the Cartesian one-vs-rest classifier on binarized features."""
    config = (config or TedConfig()).validate()
    bits = np.asarray(bm.bits, dtype=float)
    Y = np.asarray(Y, dtype=np.int64)
    E = np.asarray(E, dtype=np.int64)
    if bits.shape[0] == 0:
        raise ModelError("cannot train on an empty dataset")
    if not (len(Y) == len(E) == bits.shape[0]):
        raise ModelError(f"{len(Y)} labels, {len(E)} codes for {bits.shape[0]} rows")

    codec = CartesianCodec.from_labels(Y, E)
    classes = codec.encode_many(Y, E)
    counts = np.bincount(classes, minlength=codec.n_classes)
    for k in np.flatnonzero(counts < 2):
        logger.warning(f"Class {codec.decode(k)} has {counts[k]} training example(s)")

    offsets = bits.mean(axis=0)
    X = bits - offsets
    T = np.zeros((len(classes), codec.n_classes))
    T[np.arange(len(classes)), classes] = 1.0

    W = np.zeros((codec.n_classes, X.shape[1]))
    b = np.zeros(codec.n_classes)
    step = _step_size(X, config)
    loss, gW, gb = ovr_loss_and_grad(W, b, X, T, config.l2)
    history = [loss]
    for _ in range(config.epochs):
        W -= step * gW
        b -= step * gb
        loss, gW, gb = ovr_loss_and_grad(W, b, X, T, config.l2)
        history.append(loss)

    logger.info(f"TED fitted: {codec.n_classes} classes, {config.epochs} epochs, loss {history[0]:.4f} -> {history[-1]:.4f}")
    return TedModel(codec, W, b, offsets, config, tuple(history))


def predict(model, row_bits):
    """(y, e, class scores) for one bit row; ties go to the lowest class index."""
    row_bits = np.asarray(row_bits, dtype=float)
    if row_bits.ndim != 1:
        raise ModelError("predict takes a single bit row")
    scores = model.scores(row_bits)
    y, e = model.codec.decode(int(np.argmax(scores)))
    return y, e, scores


def predict_batch(model, bits):
    """Vectorized predict: arrays of predicted y, e and class index."""
    idx = np.argmax(model.scores(bits), axis=1)
    pairs = np.array(model.codec.pairs, dtype=np.int64).reshape(-1, 2)
    return pairs[idx, 0], pairs[idx, 1], idx


def evaluate(model, bm_test, Y_test, E_test, split="test"):
    if bm_test.n_rows == 0:
        raise ModelError("cannot evaluate on an empty set")
    y_hat, e_hat, _ = predict_batch(model, bm_test.bits)
    return build_report(Y_test, y_hat, E_test, e_hat, split=split)
