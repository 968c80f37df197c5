from __future__ import annotations

import numpy as np
import pytest

from lib.errors import RuleSyntaxError
from lib.predicates import AtomicPredicate, format_number, make_predicate, parse_predicate


def test_numeric_evaluation_and_negation():
    p = AtomicPredicate("tenure", "<=", 6)
    assert p.value == 6.0
    assert p.evaluate(6) and not p.evaluate(6.5)
    assert p.negate() == AtomicPredicate("tenure", ">", 6)
    assert p.negate().negate() == p


def test_categorical_evaluation():
    p = AtomicPredicate("contract", "==", "monthly")
    assert p.evaluate("monthly") and not p.evaluate("annual")
    assert p.negate().evaluate("annual")


def test_mask_agrees_with_evaluate():
    cells = [1.0, 6.0, 6.5, 12.0]
    for op in ("<=", ">"):
        p = AtomicPredicate("tenure", op, 6)
        assert p.mask(np.array(cells)).tolist() == [p.evaluate(v) for v in cells]
    cat = AtomicPredicate("plan", "!=", "basic")
    assert cat.mask(np.array(["basic", "plus"], dtype=object)).tolist() == [False, True]


def test_invalid_predicates():
    with pytest.raises(ValueError):
        AtomicPredicate("tenure", "~", 1)
    with pytest.raises(ValueError):
        AtomicPredicate("tenure", "<=", float("nan"))
    with pytest.raises(ValueError):
        AtomicPredicate("contract", "==", 3)
    with pytest.raises(ValueError):
        make_predicate("contract", "<=", "monthly")


def test_strict_and_inclusive_comparators_normalize():
    lt = make_predicate("tenure", "<", 6)
    assert lt.op == "<="
    assert lt.evaluate(5.999) and not lt.evaluate(6)
    ge = make_predicate("tenure", ">=", 6)
    assert ge.op == ">"
    assert ge.evaluate(6) and not ge.evaluate(5.999)


def test_parse_and_render():
    assert parse_predicate("tenure <= 6") == AtomicPredicate("tenure", "<=", 6)
    assert parse_predicate('contract == "month\\"ly"').value == 'month"ly'
    assert str(AtomicPredicate("tenure", ">", 2.5)) == "tenure > 2.5"
    assert str(AtomicPredicate("contract", "!=", "two_year")) == 'contract != "two_year"'
    for text in ("spend_change <= -20", 'plan == "premium"', "tenure > 0.1"):
        assert str(parse_predicate(text)) == text


def test_format_number_is_exact():
    assert format_number(6.0) == "6"
    assert float(format_number(0.1 + 0.2)) == 0.1 + 0.2


def test_parse_errors_carry_position():
    with pytest.raises(RuleSyntaxError) as info:
        parse_predicate("tenure <=")
    assert info.value.line == 1
    with pytest.raises(RuleSyntaxError):
        parse_predicate('tenure > "long"')
    with pytest.raises(RuleSyntaxError):
        parse_predicate("rule <= 3")
