import random

import pytest

from qcoiso.core.exceptions import FieldArithmeticError, NotRegularAtOneError, ParseError
from qcoiso.services.qfield import (
    ONE, ZERO, is_regular_at_one, parse_ratfunc, q_binomial, q_integer, qpow, render, rf, rf_eval_at_one,
    valuation_at_one,
)


def _random_element(rng: random.Random):
    num = sum(rng.randint(-3, 3) * qpow(k) for k in range(-2, 3))
    den = sum(rng.randint(0, 2) * qpow(k) for k in range(3)) + ONE
    return rf(num) / rf(den)


def test_field_axioms_on_random_triples():
    """Associativity, commutativity and distributivity hold exactly on random elements."""
    rng = random.Random(20240601)
    for _ in range(1000):
        a, b, c = (_random_element(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        if a:
            assert a * (ONE / a) == ONE


def test_quantum_integers():
    """[n] is the balanced sum of powers of q."""
    assert q_integer(1) == ONE
    assert q_integer(2) == qpow(1) + qpow(-1)
    assert q_integer(3, 2) == qpow(4) + ONE + qpow(-4)
    assert q_integer(-2) == -q_integer(2)


def test_quantum_binomial():
    """[4 choose 2] expands to q^4+q^2+2+q^-2+q^-4; out of range indices are rejected."""
    assert q_binomial(4, 2) == qpow(4) + qpow(2) + 2 * ONE + qpow(-2) + qpow(-4)
    assert q_binomial(3, 0) == ONE
    with pytest.raises(FieldArithmeticError):
        q_binomial(3, 4)


def test_valuation_at_one():
    """Order of vanishing at q=1, negative for poles, None for zero."""
    t = qpow(1) - ONE
    assert valuation_at_one(t * t / (qpow(1) + ONE)) == 2
    assert valuation_at_one(ONE / t) == -1
    assert valuation_at_one(q_integer(2)) == 0
    assert valuation_at_one(ZERO) is None
    assert is_regular_at_one((qpow(2) - ONE) / t)
    assert not is_regular_at_one(ONE / (qpow(3) - ONE))


def test_eval_at_one():
    """Quantum integers specialise to ordinary integers."""
    assert rf_eval_at_one(q_integer(3)) == 3
    assert rf_eval_at_one((qpow(2) - ONE) / (qpow(1) - ONE)) == 2
    with pytest.raises(NotRegularAtOneError):
        rf_eval_at_one(ONE / (qpow(1) - ONE))


def test_render_canonical_text():
    """Rendering is canonical and stable."""
    assert render(-qpow(3) / (qpow(2) + ONE)) == '-q^3/(q^2+1)'
    assert render(qpow(-1)) == '1/q'
    assert render(q_integer(2)) == '(q^2+1)/q'
    assert render(ZERO) == '0'


def test_parse_ratfunc():
    """Text in q parses back to the same field element; foreign symbols are rejected."""
    assert parse_ratfunc('(q^2+1)/q') == q_integer(2)
    assert parse_ratfunc(render(-qpow(3) / (qpow(2) + ONE))) == -qpow(3) / (qpow(2) + ONE)
    with pytest.raises(ParseError):
        parse_ratfunc('x+1')
    with pytest.raises(ParseError):
        parse_ratfunc('')
