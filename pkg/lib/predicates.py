#%%
# Atomic Predicates
# -----------------------------------------------------------------------------------------
"""Single-feature conditions shared by the binarizer, the rule learner and the rule DSL.

Numeric predicates use the closed/open pair (<=, >); categorical predicates use
(==, !=). Conditions written with < or >= are moved onto that pair by stepping the
threshold to the next representable float below it, so ``x < 20`` becomes
``x <= 19.999999999999996`` and ``x >= 20`` becomes ``x > 19.999999999999996``.
"""
import json
import math
from dataclasses import dataclass

import numpy as np
import pyparsing as pp

from .errors import RuleSyntaxError

NUMERIC_OPS = ("<=", ">")
CATEGORICAL_OPS = ("==", "!=")
_NEGATION = {"<=": ">", ">": "<=", "==": "!=", "!=": "=="}


def format_number(value):
    """Shortest text that parses back to exactly the same float."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class AtomicPredicate:
    feature: str
    op: str
    value: object

    def __post_init__(self):
        if not self.feature:
            raise ValueError("predicate feature name is empty")
        if self.op in NUMERIC_OPS:
            value = float(self.value)
            if not math.isfinite(value):
                raise ValueError(f"threshold for '{self.feature}' must be finite")
            object.__setattr__(self, "value", value)
        elif self.op in CATEGORICAL_OPS:
            if not isinstance(self.value, str):
                raise ValueError(f"category for '{self.feature}' must be a string")
        else:
            raise ValueError(f"unknown comparator '{self.op}'")

    @property
    def is_numeric(self):
        return self.op in NUMERIC_OPS

    def negate(self):
        return AtomicPredicate(self.feature, _NEGATION[self.op], self.value)

    def evaluate(self, value):
        """Truth value on one raw cell."""
        if self.op == "<=":
            return float(value) <= self.value
        if self.op == ">":
            return float(value) > self.value
        if self.op == "==":
            return str(value) == self.value
        return str(value) != self.value

    def mask(self, values):
        """Vectorized truth values on a column of raw cells."""
        if self.is_numeric:
            values = np.asarray(values, dtype=float)
            return values <= self.value if self.op == "<=" else values > self.value
        values = np.asarray(values, dtype=object).astype(str)
        return values == self.value if self.op == "==" else values != self.value

    def __str__(self):
        if self.is_numeric:
            return f"{self.feature} {self.op} {format_number(self.value)}"
        return f"{self.feature} {self.op} {json.dumps(self.value, ensure_ascii=False)}"


# --- Condition grammar ---
KEYWORDS = ("rule", "code", "quadrant", "AND")

_keyword = pp.MatchFirst([pp.Keyword(k) for k in KEYWORDS])
identifier = pp.Combine(~_keyword + pp.Word(pp.alphas + "_", pp.alphanums + "_")).set_name("identifier")
string_literal = pp.QuotedString('"', esc_char="\\").set_name("quoted string")
number_literal = pp.Regex(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?").set_name("number")
number_literal.set_parse_action(lambda t: float(t[0]))
comparator = pp.one_of("<= >= == != < >").set_name("comparator")


def make_predicate(feature, op, value):
    """Builds a predicate from any of the six written comparators."""
    if isinstance(value, str):
        if op not in CATEGORICAL_OPS:
            raise ValueError(f"'{op}' cannot compare '{feature}' with a quoted category")
        return AtomicPredicate(feature, op, value)
    if op in CATEGORICAL_OPS:
        raise ValueError(f"'{op}' on '{feature}' needs a quoted category")
    value = float(value)
    if op == "<":
        return AtomicPredicate(feature, "<=", float(np.nextafter(value, -np.inf)))
    if op == ">=":
        return AtomicPredicate(feature, ">", float(np.nextafter(value, -np.inf)))
    return AtomicPredicate(feature, op, value)


def _condition_action(s, loc, tokens):
    try:
        return make_predicate(tokens[0], tokens[1], tokens[2])
    except ValueError as e:
        raise pp.ParseFatalException(s, loc, str(e))


condition = (identifier + comparator + (string_literal | number_literal)).set_name("condition")
condition.set_parse_action(_condition_action)


def parse_predicate(text):
    """Parses one condition such as ``tenure <= 6`` or ``contract == "monthly"``."""
    try:
        return condition.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise RuleSyntaxError(e.msg, e.lineno, e.col) from None
