"""
Cartan data, root enumeration and admissibility for simple Lie algebras.

Simple roots use Bourbaki numbering. The invariant form is normalised so
that short roots have squared length 2; ``d_i = (alpha_i, alpha_i)/2`` are the
symmetrisers and ``B[i][j] = d_i a_ij`` is the symmetric Gram matrix used by
every q-power in the quantum algebra.
"""
import re
from dataclasses import dataclass, field
from functools import lru_cache

import structlog
from sympy import Rational, sqrt

from qcoiso.core.exceptions import RootSystemError, UnsupportedCaseError

logger = structlog.get_logger(__name__)

ROOT_STRING_RANGE = 4


@dataclass(frozen=True)
class CartanType:
    series: str
    rank: int

    def __post_init__(self):
        limits = {'A': 1, 'B': 2, 'C': 2, 'D': 3}
        if self.series in limits:
            if self.rank < limits[self.series]:
                raise RootSystemError(f'{self.series}{self.rank} is not a valid Cartan type.')
        elif self.series == 'E':
            if self.rank not in (6, 7, 8):
                raise RootSystemError(f'E{self.rank} is not a valid Cartan type.')
        elif self.series == 'F':
            if self.rank != 4:
                raise RootSystemError(f'F{self.rank} is not a valid Cartan type.')
        elif self.series == 'G':
            if self.rank != 2:
                raise RootSystemError(f'G{self.rank} is not a valid Cartan type.')
        else:
            raise RootSystemError(f'Unknown Cartan series {self.series!r}.')

    @classmethod
    def parse(cls, text: str) -> 'CartanType':
        match = re.fullmatch(r'\s*([A-Ga-g])\s*_?\s*(\d+)\s*', str(text))
        if not match:
            raise RootSystemError(f'Cannot parse Cartan type {text!r}.')
        return cls(match.group(1).upper(), int(match.group(2)))

    @property
    def is_simply_laced(self) -> bool:
        return self.series in ('A', 'D', 'E')

    def __str__(self) -> str:
        return f'{self.series}{self.rank}'


@dataclass(frozen=True)
class Root:
    """A root identified by its simple-root coefficients.

    ``coords`` are ambient (Euclidean) coordinates when the type has a
    standard realisation, otherwise the decomposition itself.
    """
    simple_decomp: tuple[int, ...]
    coords: tuple = field(compare=False, hash=False)

    @property
    def height(self) -> int:
        return sum(self.simple_decomp)

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.simple_decomp)

    def __neg__(self) -> 'Root':
        return Root(tuple(-c for c in self.simple_decomp), tuple(-c for c in self.coords))

    def label(self) -> str:
        parts = []
        for i, c in enumerate(self.simple_decomp, start=1):
            if c == 0:
                continue
            sign = '-' if c < 0 else ('+' if parts else '')
            mag = '' if abs(c) == 1 else str(abs(c))
            parts.append(f'{sign}{mag}a{i}')
        return ''.join(parts) or '0'


def _gram_matrix(ctype: CartanType) -> list[list[int]]:
    n = ctype.rank
    s = ctype.series
    B = [[0] * n for _ in range(n)]

    def link(i, j, value):
        B[i - 1][j - 1] = value
        B[j - 1][i - 1] = value

    if s == 'A':
        for i in range(n):
            B[i][i] = 2
        for i in range(1, n):
            link(i, i + 1, -1)
    elif s == 'B':
        for i in range(n):
            B[i][i] = 4
        B[n - 1][n - 1] = 2
        for i in range(1, n):
            link(i, i + 1, -2)
    elif s == 'C':
        for i in range(n):
            B[i][i] = 2
        B[n - 1][n - 1] = 4
        for i in range(1, n - 1):
            link(i, i + 1, -1)
        link(n - 1, n, -2)
    elif s == 'D':
        for i in range(n):
            B[i][i] = 2
        for i in range(1, n - 1):
            link(i, i + 1, -1)
        link(n - 2, n, -1)
    elif s == 'E':
        for i in range(n):
            B[i][i] = 2
        link(1, 3, -1)
        link(2, 4, -1)
        for i in range(3, n):
            link(i, i + 1, -1)
    elif s == 'F':
        B[0][0] = B[1][1] = 4
        B[2][2] = B[3][3] = 2
        link(1, 2, -2)
        link(2, 3, -2)
        link(3, 4, -1)
    elif s == 'G':
        B[0][0] = 2
        B[1][1] = 6
        link(1, 2, -3)
    return B


def _ambient_simple_roots(ctype: CartanType) -> list[tuple] | None:
    n = ctype.rank
    s = ctype.series

    def unit(dim, *entries):
        v = [Rational(0)] * dim
        for idx, value in entries:
            v[idx] += value
        return tuple(v)

    if s == 'A':
        return [unit(n + 1, (i, 1), (i + 1, -1)) for i in range(n)]
    if s in ('B', 'C', 'D'):
        roots = [unit(n, (i, 1), (i + 1, -1)) for i in range(n - 1)]
        last = {'B': unit(n, (n - 1, 1)), 'C': unit(n, (n - 1, 2)), 'D': unit(n, (n - 2, 1), (n - 1, 1))}
        return roots + [last[s]]
    if s == 'F':
        half = Rational(1, 2)
        return [unit(4, (1, 1), (2, -1)), unit(4, (2, 1), (3, -1)), unit(4, (3, 1)),
                unit(4, (0, half), (1, -half), (2, -half), (3, -half))]
    if s == 'G':
        return [(Rational(1), Rational(0)), (Rational(-3, 2), sqrt(3) / 2)]
    return None


class RootSystem:
    """Root data of one Cartan type, enumerated by closure under simple reflections."""

    def __init__(self, ctype: CartanType):
        self.ctype = ctype
        self.rank = ctype.rank
        self.form_matrix = _gram_matrix(ctype)
        self.symmetrizers = tuple(self.form_matrix[i][i] // 2 for i in range(self.rank))
        self.cartan_matrix = tuple(
            tuple((2 * self.form_matrix[i][j]) // self.form_matrix[i][i] for j in range(self.rank))
            for i in range(self.rank)
        )
        self._ambient = _ambient_simple_roots(ctype)
        self.simple_roots = tuple(self._make_root(self._unit(i)) for i in range(self.rank))
        decomps = self._enumerate()
        self.roots = tuple(self._make_root(d) for d in sorted(decomps))
        self.positive_roots = tuple(r for r in self.roots if r.is_positive)
        self._by_decomp = {r.simple_decomp: r for r in self.roots}
        if len(self.roots) % self.rank:
            raise RootSystemError(f'Root count {len(self.roots)} is not a multiple of the rank.')
        self.coxeter_number = len(self.roots) // self.rank
        logger.debug('Root system built', cartan_type=str(ctype), roots=len(self.roots))

    def _unit(self, i: int) -> tuple[int, ...]:
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def _make_root(self, decomp: tuple[int, ...]) -> Root:
        if self._ambient is None:
            return Root(decomp, decomp)
        dim = len(self._ambient[0])
        coords = tuple(sum(decomp[i] * self._ambient[i][k] for i in range(self.rank)) for k in range(dim))
        return Root(decomp, coords)

    def _reflect(self, decomp: tuple[int, ...], i: int) -> tuple[int, ...]:
        pairing = sum(decomp[j] * self.cartan_matrix[i][j] for j in range(self.rank))
        return tuple(c - pairing if k == i else c for k, c in enumerate(decomp))

    def _enumerate(self) -> set[tuple[int, ...]]:
        seen = set()
        frontier = [self._unit(i) for i in range(self.rank)]
        while frontier:
            current = frontier.pop()
            if current in seen:
                continue
            seen.add(current)
            for i in range(self.rank):
                image = self._reflect(current, i)
                if image not in seen:
                    frontier.append(image)
        return seen

    def form(self, a, b) -> int:
        """Symmetric invariant form on root-lattice vectors (decompositions or roots)."""
        a = a.simple_decomp if isinstance(a, Root) else a
        b = b.simple_decomp if isinstance(b, Root) else b
        return sum(a[i] * self.form_matrix[i][j] * b[j]
                   for i in range(self.rank) if a[i] for j in range(self.rank) if b[j])

    def half_norm(self, root: Root) -> int:
        return self.form(root, root) // 2

    def is_long(self, root: Root) -> bool:
        return self.half_norm(root) == max(self.symmetrizers)

    def is_root(self, decomp) -> bool:
        return tuple(decomp) in self._by_decomp

    def root(self, decomp) -> Root:
        try:
            return self._by_decomp[tuple(decomp)]
        except KeyError:
            raise RootSystemError(f'{tuple(decomp)} is not a root of {self.ctype}.') from None

    def highest_root(self) -> Root:
        return max(self.positive_roots, key=lambda r: (r.height, r.simple_decomp))

    def coroot_coefficients(self, root: Root) -> tuple[int, ...]:
        """Coefficients of the coroot of ``root`` on the simple coroots."""
        d_beta = self.half_norm(root)
        values = []
        for i, c in enumerate(root.simple_decomp):
            numerator = c * self.symmetrizers[i]
            if numerator % d_beta:
                raise RootSystemError(f'Coroot of {root.label()} is not integral.')
            values.append(numerator // d_beta)
        return tuple(values)

    def parse_root(self, text: str) -> Root:
        """Accepts ``L1-L4``, ``2L1``, ``L1+L2`` or ``3a1+2a2`` style literals."""
        text = str(text).replace(' ', '')
        tokens = re.findall(r'([+-]?)(\d*)([La])(\d+)', text)
        if not tokens or ''.join(''.join(t) for t in tokens) != text:
            raise RootSystemError(f'Cannot parse root literal {text!r}.')
        kinds = {t[2] for t in tokens}
        if len(kinds) != 1:
            raise RootSystemError(f'Mixed root notation in {text!r}.')
        if kinds == {'a'}:
            decomp = [0] * self.rank
            for sign, mult, _, idx in tokens:
                k = int(idx)
                if not 1 <= k <= self.rank:
                    raise RootSystemError(f'Simple root index {k} out of range in {text!r}.')
                decomp[k - 1] += (-1 if sign == '-' else 1) * int(mult or 1)
            return self.root(decomp)
        if self._ambient is None or self.ctype.series == 'G':
            raise UnsupportedCaseError(f'Ambient root literals are not available for {self.ctype}.')
        dim = len(self._ambient[0])
        coords = [Rational(0)] * dim
        for sign, mult, _, idx in tokens:
            k = int(idx)
            if not 1 <= k <= dim:
                raise RootSystemError(f'Coordinate index {k} out of range in {text!r}.')
            coords[k - 1] += (-1 if sign == '-' else 1) * int(mult or 1)
        for r in self.roots:
            if tuple(r.coords) == tuple(coords):
                return r
        raise RootSystemError(f'{text} is not a root of {self.ctype}.')

    def ambient_label(self, root: Root) -> str:
        if self._ambient is None or self.ctype.series == 'G':
            return root.label()
        parts = []
        for k, c in enumerate(root.coords, start=1):
            if c == 0:
                continue
            sign = '-' if c < 0 else ('+' if parts else '')
            mag = '' if abs(c) == 1 else str(abs(c))
            parts.append(f'{sign}{mag}L{k}')
        return ''.join(parts)


@lru_cache(maxsize=None)
def root_system(ctype: CartanType) -> RootSystem:
    return RootSystem(ctype)


def root_string(rs: RootSystem, alpha: Root, beta: Root) -> list[int]:
    """Integers k in [-4, 4] with alpha + k*beta a root."""
    ks = []
    for k in range(-ROOT_STRING_RANGE, ROOT_STRING_RANGE + 1):
        decomp = tuple(a + k * b for a, b in zip(alpha.simple_decomp, beta.simple_decomp))
        if any(decomp) and rs.is_root(decomp):
            ks.append(k)
    if ks and (ks[0] == -ROOT_STRING_RANGE or ks[-1] == ROOT_STRING_RANGE):
        raise RootSystemError(f'Root string of {alpha.label()} through {beta.label()} is not saturated.')
    return ks


def is_admissible(rs: RootSystem, beta: Root) -> bool:
    """No root string through beta contains three consecutive integers."""
    for alpha in rs.roots:
        ks = set(root_string(rs, alpha, beta))
        if any(k in ks and k + 1 in ks and k + 2 in ks for k in ks):
            return False
    return True


def admissible_positive_roots(rs: RootSystem) -> list[Root]:
    return sorted((b for b in rs.positive_roots if is_admissible(rs, b)), key=lambda r: r.simple_decomp)
