#%%
# Pipeline Configuration
# -----------------------------------------------------------------------------------------
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ConfigError
from .explain import PRECEDENCES
from .synthetic import SynthConfig
from .ted import TedConfig


@dataclass(frozen=True)
class PipelineConfig:
    """Every pipeline knob in one flat namespace.

    Data comes either from ``data`` + ``schema`` (CSV plus JSON sidecar) or from the
    nested ``synthetic`` block. ``lambda1 = None`` selects the data-driven default.
    """
    data: Optional[str] = None
    schema: Optional[str] = None
    synthetic: Optional[SynthConfig] = None
    rules: Optional[str] = None
    out: str = "out"
    # split
    test_fraction: float = 0.2
    split_seed: int = 0
    # binarizer
    n_quantiles: int = 9
    # lrr
    lambda1: Optional[float] = None
    lambda2: Optional[float] = None
    lambda_ratio: float = 0.1
    tol: float = 1e-6
    max_iters: int = 1000
    max_degree: int = 2
    max_pairs: int = 32
    # pareto
    apply_pareto: bool = True
    min_coverage: float = 0.01
    max_jaccard: float = 0.5
    # explain
    precedence: str = "risk_first"
    # ted
    learning_rate: float = 1.0
    epochs: int = 800
    l2: float = 1e-4
    ted_seed: int = 0

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        d = dict(d)
        if d.get("synthetic") is not None:
            d["synthetic"] = SynthConfig.from_dict(d["synthetic"])
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                return cls.from_dict(json.load(f))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None

    def to_dict(self, include_out=False):
        d = asdict(self)
        if not include_out:
            d.pop("out")
        return d

    def override(self, **values):
        """Copy with every non-None value replaced."""
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    def ted_config(self):
        return TedConfig(self.learning_rate, self.epochs, self.l2, self.ted_seed)

    def validate(self):
        if self.synthetic is not None:
            if self.data or self.schema:
                raise ConfigError("give either data + schema or a synthetic block, not both")
            self.synthetic.validate()
        else:
            if not self.data or not self.schema:
                raise ConfigError("data and schema paths are required without a synthetic block")
            for path in (self.data, self.schema):
                if not os.path.isfile(path):
                    raise ConfigError(f"file not found: {path}")
        if self.rules and not os.path.isfile(self.rules):
            raise ConfigError(f"rules file not found: {self.rules}")

        checks = [
            (0 < self.test_fraction < 1, "test_fraction must lie in (0, 1)"),
            (self.n_quantiles >= 1, "n_quantiles must be >= 1"),
            (self.lambda1 is None or self.lambda1 >= 0, "lambda1 must be >= 0"),
            (self.lambda2 is None or self.lambda2 >= 0, "lambda2 must be >= 0"),
            (self.lambda_ratio >= 0, "lambda_ratio must be >= 0"),
            (self.tol > 0, "tol must be > 0"),
            (self.max_iters >= 1, "max_iters must be >= 1"),
            (self.max_degree in (1, 2), "max_degree must be 1 or 2"),
            (self.max_pairs >= 0, "max_pairs must be >= 0"),
            (0 <= self.min_coverage <= 1, "min_coverage must lie in [0, 1]"),
            (0 <= self.max_jaccard <= 1, "max_jaccard must lie in [0, 1]"),
            (self.precedence in PRECEDENCES, f"precedence must be one of {PRECEDENCES}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        self.ted_config().validate()
        return self
