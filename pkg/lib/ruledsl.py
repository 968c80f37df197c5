#%%
# Risk Rule DSL
# -----------------------------------------------------------------------------------------
"""Parser, printer and evaluator for expert risk rules.

    # comment to end of line
    rule "late_payer" code 4 quadrant financial: payment_delay > 20 AND monthly_charges > 80

Codes run 4..11 and must be unique; evaluation precedence is ascending code.
Conditions are conjunctions of 1..4 single-feature comparisons on raw values.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import pyparsing as pp

from .errors import RuleBindError, RuleEvaluationError, RuleSyntaxError
from .predicates import condition, identifier, string_literal

logger = logging.getLogger(__name__)

QUADRANTS = ("financial", "structural", "interaction", "engagement")
MIN_CODE, MAX_CODE = 4, 11
MAX_CONDITIONS = 4


@dataclass(frozen=True)
class RiskRule:
    name: str
    code: int
    quadrant: str
    predicates: tuple
    line: int = field(default=0, compare=False)

    def features(self):
        return [p.feature for p in self.predicates]

    def evaluate(self, row):
        """Conjunction truth value on one raw row (mapping of feature -> value)."""
        for feature in self.features():
            if feature not in row:
                raise RuleEvaluationError(feature)
        return all(p.evaluate(row[p.feature]) for p in self.predicates)

    def __str__(self):
        conj = " AND ".join(str(p) for p in self.predicates)
        return f"rule {json.dumps(self.name, ensure_ascii=False)} code {self.code} quadrant {self.quadrant}: {conj}"


@dataclass(frozen=True)
class RiskRuleSet:
    rules: tuple = ()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    @property
    def names(self):
        return [r.name for r in self.rules]

    def by_precedence(self):
        return sorted(self.rules, key=lambda r: r.code)

    def get(self, name):
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)

    def bind(self, schema):
        """Checks every referenced feature exists with a kind matching its comparator."""
        for rule in self.rules:
            for p in rule.predicates:
                try:
                    kind = schema.kind_of(p.feature)
                except KeyError:
                    raise RuleBindError(rule.name, p.feature) from None
                if (kind == "numeric") != p.is_numeric:
                    raise RuleBindError(rule.name, p.feature,
                                        f"rule '{rule.name}': '{p}' does not fit {kind} feature '{p.feature}'")
        return self


def match_mask(rule, frame):
    """Vectorized rule evaluation over a feature frame."""
    mask = np.ones(len(frame), dtype=bool)
    for p in rule.predicates:
        if p.feature not in frame.columns:
            raise RuleEvaluationError(p.feature)
        mask &= p.mask(frame[p.feature].to_numpy())
    return mask


# --- Grammar ---
def _int_action(s, loc, tokens):
    return int(tokens[0])


def _rule_action(s, loc, tokens):
    name, code, quadrant = tokens["name"], tokens["code"], tokens["quadrant"]
    predicates = tuple(tokens["conditions"])
    if not MIN_CODE <= code <= MAX_CODE:
        raise pp.ParseFatalException(s, loc, f"rule '{name}': code {code} outside {MIN_CODE}..{MAX_CODE}")
    if quadrant not in QUADRANTS:
        raise pp.ParseFatalException(s, loc, f"rule '{name}': unknown quadrant '{quadrant}'")
    if len(predicates) > MAX_CONDITIONS:
        raise pp.ParseFatalException(s, loc, f"rule '{name}': more than {MAX_CONDITIONS} conditions")
    return RiskRule(name, code, quadrant, predicates, line=pp.lineno(loc, s))


_integer = pp.Regex(r"[+-]?\d+").set_name("integer").set_parse_action(_int_action)
_conjunction = pp.Group(condition + pp.ZeroOrMore(pp.Suppress(pp.Keyword("AND")) - condition))
_rule = (
    pp.Suppress(pp.Keyword("rule")) - string_literal("name")
    - pp.Suppress(pp.Keyword("code")) - _integer("code")
    - pp.Suppress(pp.Keyword("quadrant")) - identifier("quadrant")
    - pp.Suppress(":") - _conjunction("conditions")
)
_rule.set_parse_action(_rule_action)
_ruleset = pp.OneOrMore(_rule)
_ruleset.ignore(pp.python_style_comment)


def parse(source):
    """Parses rule source text into a RiskRuleSet.

    Raises:
        RuleSyntaxError: on grammar errors and on bad code, quadrant or duplicates,
            carrying the 1-based line and column.
    """
    try:
        rules = list(_ruleset.parse_string(source, parse_all=True))
    except pp.ParseBaseException as e:
        raise RuleSyntaxError(e.msg, e.lineno, e.col) from None

    seen_codes, seen_names = {}, set()
    for rule in rules:
        if rule.code in seen_codes:
            raise RuleSyntaxError(f"duplicate code {rule.code} (first used by '{seen_codes[rule.code]}')", rule.line, 1)
        if rule.name in seen_names:
            raise RuleSyntaxError(f"duplicate rule name '{rule.name}'", rule.line, 1)
        seen_codes[rule.code] = rule.name
        seen_names.add(rule.name)
    return RiskRuleSet(tuple(rules))


def format_ruleset(ruleset):
    return "".join(f"{rule}\n" for rule in ruleset)


def load_rules(path):
    with open(path, "r", encoding="utf-8") as f:
        ruleset = parse(f.read())
    logger.info(f"Parsed {len(ruleset)} risk rules from {path}")
    return ruleset
