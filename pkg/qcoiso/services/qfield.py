"""
Exact arithmetic in the rational function field Q(q).

Elements are sympy ``FracElement`` values of the field ``QF = Q(q)`` built over
``ZZ[q]``; sympy keeps numerator and denominator coprime with an integer
content-free numerator/denominator pair, so structural equality is value
equality. Specialisation at q=1 and the q=1 valuation are computed on the
integer coefficient lists.
"""
import re
from functools import lru_cache

import structlog
from sympy import Symbol
from sympy.polys.domains import QQ, ZZ
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.fields import FracElement, field
from sympy.polys.rings import PolyElement

from qcoiso.core.exceptions import FieldArithmeticError, NotRegularAtOneError, ParseError

logger = structlog.get_logger(__name__)

QF, q = field('q', ZZ)
QRing = QF.ring
q_poly = QRing.gens[0]

RatFunc = FracElement
IntPoly = PolyElement

ZERO = QF.zero
ONE = QF.one

_ALLOWED_TEXT = re.compile(r'^[0-9q\s\^\*\+\-/\(\)]*$')
_Q_SYMBOL = Symbol('q')


def rf(value) -> RatFunc:
    """Coerces an int, a polynomial in ZZ[q] or a field element into Q(q)."""
    if isinstance(value, FracElement):
        return value
    return QF(value)


def rf_canonicalize(num: IntPoly, den: IntPoly) -> RatFunc:
    if not den:
        raise FieldArithmeticError()
    return QF(num) / QF(den)


def rf_div(a, b) -> RatFunc:
    b = rf(b)
    if not b:
        raise FieldArithmeticError()
    return rf(a) / b


def rf_inv(a) -> RatFunc:
    return rf_div(ONE, a)


@lru_cache(maxsize=None)
def qpow(k: int) -> RatFunc:
    return q ** k


@lru_cache(maxsize=None)
def q_monomial(k: int) -> IntPoly:
    """q^k in ZZ[q] for k >= 0."""
    return q_poly ** k


@lru_cache(maxsize=None)
def q_integer(n: int, d: int = 1) -> RatFunc:
    """Balanced quantum integer [n]_{q^d} = sum_j q^{d(n-1-2j)}."""
    if n < 0:
        return -q_integer(-n, d)
    total = ZERO
    for j in range(n):
        total += qpow(d * (n - 1 - 2 * j))
    return total


@lru_cache(maxsize=None)
def q_factorial(n: int, d: int = 1) -> RatFunc:
    result = ONE
    for k in range(1, n + 1):
        result *= q_integer(k, d)
    return result


@lru_cache(maxsize=None)
def q_binomial(m: int, r: int, d: int = 1) -> RatFunc:
    if not 0 <= r <= m:
        raise FieldArithmeticError(f'q-binomial index r={r} outside 0..{m}.')
    return q_factorial(m, d) / (q_factorial(r, d) * q_factorial(m - r, d))


def _poly_sum_at_one(p: IntPoly) -> int:
    return int(sum(p.coeffs())) if p else 0


def _order_at_one(p: IntPoly) -> int:
    order = 0
    while p and _poly_sum_at_one(p) == 0:
        p = p.exquo(q_poly - 1)
        order += 1
    return order


def valuation_at_one(a: RatFunc) -> int | None:
    """Order of vanishing at q=1; None stands for +infinity (a == 0)."""
    a = rf(a)
    if not a:
        return None
    return _order_at_one(a.numer) - _order_at_one(a.denom)


def is_regular_at_one(a: RatFunc) -> bool:
    v = valuation_at_one(a)
    return v is None or v >= 0


def rf_eval_at_one(a: RatFunc):
    """Exact rational value at q=1 as a ``QQ`` element."""
    a = rf(a)
    if not a:
        return QQ(0)
    den = _poly_sum_at_one(a.denom)
    if den == 0:
        raise NotRegularAtOneError(f'{render(a)} is not regular at q=1.')
    return QQ(_poly_sum_at_one(a.numer), den)


def _render_poly(p: IntPoly) -> tuple[str, int]:
    pieces = []
    for (deg,), coeff in sorted(p.terms(), key=lambda t: -t[0][0]):
        c = int(coeff)
        sign = '-' if c < 0 else '+'
        c = abs(c)
        if deg == 0:
            body = str(c)
        else:
            mono = 'q' if deg == 1 else f'q^{deg}'
            body = mono if c == 1 else f'{c}*{mono}'
        pieces.append((sign, body))
    if not pieces:
        return '0', 0
    text = ('-' if pieces[0][0] == '-' else '') + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f'{sign}{body}'
    return text, len(pieces)


def render(a) -> str:
    """Canonical text such as ``-q^3/(q^2+1)``."""
    a = rf(a)
    num, num_terms = _render_poly(a.numer)
    if a.denom == QRing.one:
        return num
    den, den_terms = _render_poly(a.denom)
    if num_terms > 1:
        num = f'({num})'
    bare = den_terms == 1 and '*' not in den
    return f'{num}/{den}' if bare else f'{num}/({den})'


def parse_ratfunc(text: str) -> RatFunc:
    text = str(text).strip()
    if not text or not _ALLOWED_TEXT.match(text):
        raise ParseError(f'Not a rational function in q: {text!r}')
    try:
        expr = parse_expr(text.replace('^', '**'), local_dict={'q': _Q_SYMBOL})
        value = QF.from_expr(expr)
    except ZeroDivisionError as exc:
        raise FieldArithmeticError() from exc
    except Exception as exc:
        logger.debug('Rational function parse failed', text=text, error=str(exc))
        raise ParseError(f'Not a rational function in q: {text!r}') from exc
    return value
