"""
The positive part of U_q(g) extended by the Cartan group elements.

Elements are :class:`NCPoly` values: finite sums of normal-ordered monomials
``K^k E_w`` (group part on the left) with Q(q) coefficients. Relations used:

* ``K_i E_j = q^{(alpha_i, alpha_j)} E_j K_i``
* ``Delta(E_i) = E_i (x) K_i + 1 (x) E_i``, ``Delta(K_i) = K_i (x) K_i``
* the quantum Serre relations, kept as a two-sided ideal of the free algebra

Membership in the Serre ideal is decided with the quantum shuffle embedding:
``E_i -> [i]`` extends to an algebra map from the free algebra into the
shuffle algebra whose kernel is exactly the Serre ideal. Restricted to the
coordinates indexed by good words (Lyndon factorisations into good Lyndon
words) the embedding stays injective on the quotient, so every question about
U_q^+ becomes finite exact linear algebra over Q(q).
"""
import threading
from functools import lru_cache
from itertools import product as cartesian

import structlog
from sympy.utilities.iterables import multiset_permutations

from qcoiso.core.config import settings
from qcoiso.core.exceptions import AlgebraMismatchError, DegreeOverflowError, UnsupportedCaseError
from qcoiso.services.certificates import Certificate, CertificateTerm
from qcoiso.services.linalg import EchelonBasis
from qcoiso.services.qfield import ONE, RatFunc, q_binomial, q_monomial, qpow, render, rf
from qcoiso.services.rootsys import RootSystem

logger = structlog.get_logger(__name__)

Word = tuple[int, ...]
KExp = tuple[int, ...]
Monomial = tuple[KExp, Word]


def word_weight(word: Word, rank: int) -> tuple[int, ...]:
    counts = [0] * rank
    for letter in word:
        counts[letter - 1] += 1
    return tuple(counts)


def _k_pairing(rs: RootSystem, kexp: KExp) -> tuple[int, ...]:
    """``lam_j = (sum_i k_i alpha_i, alpha_j)`` for every simple root j."""
    B = rs.form_matrix
    return tuple(sum(kexp[i] * B[i][j] for i in range(rs.rank) if kexp[i]) for j in range(rs.rank))


def _mono_mul(rs: RootSystem, left: Monomial, right: Monomial) -> tuple[Monomial, int]:
    ka, wa = left
    kb, wb = right
    exponent = 0
    if wa and any(kb):
        lam = _k_pairing(rs, kb)
        exponent = -sum(lam[j - 1] for j in wa)
    kexp = tuple(a + b for a, b in zip(ka, kb))
    return (kexp, wa + wb), exponent


class NCPoly:
    """Normal-ordered element of U_q^{>=0}: ``{(kexp, word): coefficient}``."""
    __slots__ = ('rs', 'terms')

    def __init__(self, rs: RootSystem, terms: dict[Monomial, RatFunc] | None = None):
        self.rs = rs
        self.terms = {m: rf(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, rs: RootSystem) -> 'NCPoly':
        return cls(rs)

    @classmethod
    def scalar(cls, rs: RootSystem, value) -> 'NCPoly':
        return cls(rs, {((0,) * rs.rank, ()): rf(value)})

    @classmethod
    def one(cls, rs: RootSystem) -> 'NCPoly':
        return cls.scalar(rs, ONE)

    @classmethod
    def generator(cls, rs: RootSystem, i: int) -> 'NCPoly':
        if not 1 <= i <= rs.rank:
            raise AlgebraMismatchError(f'E{i} does not exist in rank {rs.rank}.')
        return cls(rs, {((0,) * rs.rank, (i,)): ONE})

    @classmethod
    def word(cls, rs: RootSystem, word: Word, kexp: KExp | None = None) -> 'NCPoly':
        return cls(rs, {(tuple(kexp or (0,) * rs.rank), tuple(word)): ONE})

    @classmethod
    def k_monomial(cls, rs: RootSystem, kexp: KExp) -> 'NCPoly':
        if len(kexp) != rs.rank:
            raise AlgebraMismatchError(f'K exponent {kexp} does not match rank {rs.rank}.')
        return cls(rs, {(tuple(kexp), ()): ONE})

    def zero_like(self) -> 'NCPoly':
        return NCPoly(self.rs)

    def _coerce(self, other) -> 'NCPoly':
        if isinstance(other, NCPoly):
            if other.rs is not self.rs and other.rs.ctype != self.rs.ctype:
                raise AlgebraMismatchError()
            return other
        return NCPoly.scalar(self.rs, other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, RatFunc)):
            other = NCPoly.scalar(self.rs, other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __neg__(self) -> 'NCPoly':
        return NCPoly(self.rs, {m: -c for m, c in self.terms.items()})

    def __add__(self, other) -> 'NCPoly':
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return NCPoly(self.rs, out)

    __radd__ = __add__

    def __sub__(self, other) -> 'NCPoly':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'NCPoly':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'NCPoly':
        if not isinstance(other, NCPoly):
            scale = rf(other)
            return NCPoly(self.rs, {m: c * scale for m, c in self.terms.items()})
        return nc_mul(self, self._coerce(other))

    def __rmul__(self, other) -> 'NCPoly':
        scale = rf(other)
        return NCPoly(self.rs, {m: scale * c for m, c in self.terms.items()})

    def __pow__(self, n: int) -> 'NCPoly':
        result = NCPoly.one(self.rs)
        for _ in range(n):
            result = result * self
        return result

    @property
    def degree(self) -> int:
        return max((len(w) for _, w in self.terms), default=0)

    def components(self) -> dict[tuple[KExp, tuple[int, ...]], 'NCPoly']:
        """Splits into pieces of fixed group part and fixed E-weight."""
        parts: dict = {}
        for (k, w), c in self.terms.items():
            key = (k, word_weight(w, self.rs.rank))
            parts.setdefault(key, {})[(k, w)] = c
        return {key: NCPoly(self.rs, terms) for key, terms in parts.items()}

    def homogeneous_key(self) -> tuple[KExp, tuple[int, ...]] | None:
        keys = list(self.components())
        return keys[0] if len(keys) == 1 else None

    def word_part(self) -> dict[Word, RatFunc]:
        return {w: c for (_, w), c in self.terms.items()}

    def render(self) -> str:
        if not self.terms:
            return '0'
        pieces = []
        for (k, w), c in sorted(self.terms.items(), key=lambda t: (len(t[0][1]), t[0][1], t[0][0])):
            factors = []
            if any(k):
                factors.append('K^(' + ','.join(str(e) for e in k) + ')')
            factors.extend(f'E{letter}' for letter in w)
            mono = ' '.join(factors) or '1'
            pieces.append(f'({render(c)})*{mono}')
        return ' + '.join(pieces)

    def __repr__(self) -> str:
        return f'NCPoly({self.render()})'


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    rs = a.rs
    out: dict[Monomial, RatFunc] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            mono, exponent = _mono_mul(rs, ma, mb)
            value = ca * cb
            if exponent:
                value = value * qpow(exponent)
            out[mono] = out[mono] + value if mono in out else value
    return NCPoly(rs, out)


def q_bracket(a: NCPoly, b: NCPoly, power: int = 0) -> NCPoly:
    """``[a, b]_{q^power} = ab - q^power ba``."""
    return a * b - qpow(power) * (b * a)


def q_commutator_power(rs: RootSystem, a: NCPoly, b: NCPoly) -> int:
    """Exponent p for which ``[a, b]_{q^p}`` is the natural braided commutator."""
    ka = a.homogeneous_key()
    kb = b.homogeneous_key()
    if ka is None or kb is None:
        raise UnsupportedCaseError('Automatic q-power needs homogeneous operands.')
    return -rs.form(ka[1], kb[1])


class TensorElem:
    """Element of U (x) U as ``{(left monomial, right monomial): coefficient}``."""
    __slots__ = ('rs', 'terms')

    def __init__(self, rs: RootSystem, terms: dict | None = None):
        self.rs = rs
        self.terms = {m: rf(c) for m, c in (terms or {}).items() if c}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, TensorElem) and self.terms == other.terms

    def __add__(self, other: 'TensorElem') -> 'TensorElem':
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return TensorElem(self.rs, out)

    def __sub__(self, other: 'TensorElem') -> 'TensorElem':
        return self + TensorElem(self.rs, {m: -c for m, c in other.terms.items()})

    def __mul__(self, other: 'TensorElem') -> 'TensorElem':
        out: dict = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                lm, le = _mono_mul(self.rs, l1, l2)
                rm, re_ = _mono_mul(self.rs, r1, r2)
                value = c1 * c2 * qpow(le + re_)
                key = (lm, rm)
                out[key] = out[key] + value if key in out else value
        return TensorElem(self.rs, out)

    @classmethod
    def pure(cls, left: NCPoly, right: NCPoly) -> 'TensorElem':
        out: dict = {}
        for ml, cl in left.terms.items():
            for mr, cr in right.terms.items():
                out[(ml, mr)] = cl * cr
        return cls(left.rs, out)


def _coproduct_monomial(rs: RootSystem, mono: Monomial) -> list[tuple[Monomial, Monomial, int]]:
    kexp, word = mono
    return _coproduct_monomial_cached(rs, kexp, word)


@lru_cache(maxsize=65536)
def _coproduct_monomial_cached(rs: RootSystem, kexp: KExp, word: Word) -> list[tuple[Monomial, Monomial, int]]:
    B = rs.form_matrix
    m = len(word)
    out = []
    for mask in range(1 << m):
        left_word = tuple(word[i] for i in range(m) if mask >> i & 1)
        right_word = tuple(word[i] for i in range(m) if not mask >> i & 1)
        right_k = list(kexp)
        exponent = 0
        for i in range(m):
            if mask >> i & 1:
                right_k[word[i] - 1] += 1
                for j in range(i):
                    if not mask >> j & 1:
                        exponent -= B[word[i] - 1][word[j] - 1]
        out.append(((kexp, left_word), (tuple(right_k), right_word), exponent))
    return out


def coproduct(x: NCPoly) -> TensorElem:
    """Coproduct of a normal-ordered element, term by term in closed form."""
    out: dict = {}
    for mono, c in x.terms.items():
        for left, right, exponent in _coproduct_monomial(x.rs, mono):
            key = (left, right)
            value = c * qpow(exponent) if exponent else c
            out[key] = out[key] + value if key in out else value
    return TensorElem(x.rs, out)


def iterated_coproduct(x: NCPoly, side: str) -> dict:
    """``(Delta (x) id) Delta`` for side='left', ``(id (x) Delta) Delta`` for side='right'."""
    out: dict = {}
    for (left, right), c in coproduct(x).terms.items():
        split, kept = (left, right) if side == 'left' else (right, left)
        for a, b, exponent in _coproduct_monomial(x.rs, split):
            key = (a, b, kept) if side == 'left' else (kept, a, b)
            value = c * qpow(exponent) if exponent else c
            out[key] = out[key] + value if key in out else value
    return {k: v for k, v in out.items() if v}


def counit(x: NCPoly) -> RatFunc:
    return sum((c for (_, w), c in x.terms.items() if not w), rf(0))


def serre_relation(rs: RootSystem, i: int, j: int) -> NCPoly:
    """``sum_r (-1)^r [1-a_ij choose r]_{q^{d_i}} E_i^{1-a_ij-r} E_j E_i^r``."""
    m = 1 - rs.cartan_matrix[i - 1][j - 1]
    d = rs.symmetrizers[i - 1]
    terms = {}
    for r in range(m + 1):
        word = (i,) * (m - r) + (j,) + (i,) * r
        terms[((0,) * rs.rank, word)] = (-1) ** r * q_binomial(m, r, d)
    return NCPoly(rs, terms)


def serre_relations(rs: RootSystem) -> 'SerreIdeal':
    return SerreIdeal(rs)


def words_of_weight(weight: tuple[int, ...]) -> list[Word]:
    letters = [i + 1 for i, c in enumerate(weight) for _ in range(c)]
    if not letters:
        return [()]
    return [tuple(w) for w in multiset_permutations(letters)]


def _sub_weights(weight: tuple[int, ...]):
    return cartesian(*(range(c + 1) for c in weight))


class ShuffleEmbedding:
    """Good-word coordinates of the quantum shuffle embedding."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.lyndon = self._good_lyndon_words()
        self._lock = threading.Lock()
        self._duals: dict[Word, tuple[dict[Word, object], int]] = {}
        self._good: dict[tuple[int, ...], list[Word]] = {}

    def _good_lyndon_words(self) -> dict[tuple[int, ...], Word]:
        rs = self.rs
        roots = sorted(rs.positive_roots, key=lambda r: (r.height, r.simple_decomp))
        lyndon: dict[tuple[int, ...], Word] = {}
        for beta in roots:
            decomp = beta.simple_decomp
            if beta.height == 1:
                lyndon[decomp] = (decomp.index(1) + 1,)
                continue
            best = None
            for gamma in roots:
                rest = tuple(b - g for b, g in zip(decomp, gamma.simple_decomp))
                if gamma.height >= beta.height or rest not in lyndon or gamma.simple_decomp not in lyndon:
                    continue
                w1, w2 = lyndon[gamma.simple_decomp], lyndon[rest]
                if w1 < w2 and (best is None or w1 + w2 > best):
                    best = w1 + w2
            lyndon[decomp] = best
        return lyndon

    def good_words(self, weight: tuple[int, ...]) -> list[Word]:
        weight = tuple(weight)
        if weight in self._good:
            return self._good[weight]
        items = sorted(self.lyndon.items())
        found: list[Word] = []

        def extend(idx: int, remaining: tuple[int, ...], chosen: list[Word]):
            if not any(remaining):
                found.append(tuple(letter for w in sorted(chosen, reverse=True) for letter in w))
                return
            if idx == len(items):
                return
            decomp, lw = items[idx]
            extend(idx + 1, remaining, chosen)
            count = 0
            rem = remaining
            while True:
                rem = tuple(r - d for r, d in zip(rem, decomp))
                if any(r < 0 for r in rem):
                    break
                count += 1
                extend(idx + 1, rem, chosen + [lw] * count)

        extend(0, weight, [])
        found.sort()
        self._good[weight] = found
        return found

    def dual(self, word: Word) -> tuple[dict[Word, object], int]:
        """Shuffle image of ``E_word`` as integer polynomials times ``q^-shift``."""
        with self._lock:
            cached = self._duals.get(word)
        if cached is not None:
            return cached
        B = self.rs.form_matrix
        vec: dict[Word, object] = {(): q_monomial(0)}
        shift = 0
        for idx, letter in enumerate(word):
            j = letter - 1
            # all u share the weight of word[:idx]
            top = word[:idx].count(letter) * B[j][j]
            new: dict[Word, object] = {}
            for u, coeff in vec.items():
                passed = 0
                for p in range(len(u), -1, -1):
                    if p < len(u):
                        passed += B[u[p] - 1][j]
                    w = u[:p] + (letter,) + u[p:]
                    value = coeff * q_monomial(top - passed)
                    new[w] = new[w] + value if w in new else value
            vec = {w: c for w, c in new.items() if c}
            shift += top
        with self._lock:
            self._duals[word] = (vec, shift)
        return vec, shift

    def project(self, words: dict[Word, RatFunc], weight: tuple[int, ...]) -> dict[Word, RatFunc]:
        """Good-word coordinates of the shuffle image of a weight-homogeneous word sum."""
        if not words:
            return {}
        denominator = None
        for c in words.values():
            den = c.denom
            denominator = den if denominator is None else denominator.lcm(den)
        numerators = {w: c.numer * denominator.exquo(c.denom) for w, c in words.items()}
        out: dict[Word, RatFunc] = {}
        for good in self.good_words(weight):
            vec, shift = self.dual(good)
            dot = None
            for w, num in numerators.items():
                coeff = vec.get(w)
                if coeff is None:
                    continue
                dot = num * coeff if dot is None else dot + num * coeff
            if dot:
                out[good] = rf(dot) * qpow(-shift) / rf(denominator)
        return out


class SerreIdeal:
    """The two-sided ideal generated by the quantum Serre relations, with quotient tools."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.relations: dict[tuple[int, int], NCPoly] = {}
        for i in range(1, rs.rank + 1):
            for j in range(1, rs.rank + 1):
                if i != j:
                    self.relations[(i, j)] = serre_relation(rs, i, j)
        self.embedding = ShuffleEmbedding(rs)
        self._lock = threading.Lock()
        self._bases: dict[tuple[tuple[int, ...], str], tuple[list[Word], EchelonBasis]] = {}
        self.basis_store = None

    # membership through the embedding

    def project(self, x: NCPoly) -> dict:
        """``{(kexp, weight): good-word coordinates}`` of every non-zero component."""
        out = {}
        for (k, weight), part in x.components().items():
            coords = self.embedding.project(part.word_part(), weight)
            if coords:
                out[(k, weight)] = coords
        return out

    def contains(self, x: NCPoly) -> bool:
        return not self.project(x)

    # quotient bases

    def quotient_basis_for_weight(self, weight: tuple[int, ...], order: str = 'deglex') -> list[Word]:
        return self._basis(tuple(weight), order)[0]

    def _basis(self, weight: tuple[int, ...], order: str) -> tuple[list[Word], EchelonBasis]:
        degree = sum(weight)
        if degree > settings.MAX_DEGREE:
            raise DegreeOverflowError(degree, settings.MAX_DEGREE)
        key = (weight, order)
        with self._lock:
            if key in self._bases:
                return self._bases[key]
        target = len(self.embedding.good_words(weight))
        echelon = EchelonBasis()
        chosen: list[Word] = []
        stored = self.basis_store.load(self.rs.ctype, weight, order) if self.basis_store else None
        candidates = stored if stored is not None else self._ordered_words(weight, order)
        for w in candidates:
            if len(chosen) == target:
                break
            if echelon.insert(self.embedding.project({w: ONE}, weight), w):
                chosen.append(w)
        if len(chosen) != target:
            raise UnsupportedCaseError(f'Quotient basis search at weight {weight} found {len(chosen)} of {target} words.')
        if self.basis_store and stored is None:
            self.basis_store.save(self.rs.ctype, weight, order, chosen)
        logger.debug('Quotient basis computed', weight=weight, order=order, size=len(chosen))
        with self._lock:
            self._bases[key] = (chosen, echelon)
        return chosen, echelon

    def _ordered_words(self, weight: tuple[int, ...], order: str):
        words = words_of_weight(weight)
        if order == 'deglex':
            return sorted(words)
        if order == 'revlex':
            return sorted(words, reverse=True)
        raise UnsupportedCaseError(f'Unknown word order {order!r}.')

    def quotient_basis(self, degree: int, order: str = 'deglex') -> list[Word]:
        """Words forming a basis of the degree-``degree`` part of the quotient."""
        if degree > settings.MAX_DEGREE:
            raise DegreeOverflowError(degree, settings.MAX_DEGREE)
        basis: list[Word] = []
        for weight in _compositions(degree, self.rs.rank):
            basis.extend(self.quotient_basis_for_weight(weight, order))
        return sorted(basis, key=lambda w: (len(w), w))

    def quotient_coordinates(self, word: Word, order: str = 'deglex') -> dict[Word, RatFunc]:
        """Coefficients of ``E_word`` on the quotient basis of its weight."""
        weight = word_weight(word, self.rs.rank)
        _, echelon = self._basis(weight, order)
        combo = echelon.express(self.embedding.project({word: ONE}, weight))
        return {w: rf(c) for w, c in (combo or {}).items() if c}

    # explicit certificates in word coordinates

    def templates(self, weight: tuple[int, ...], relations: dict[str, NCPoly] | None = None) -> list[tuple[str, NCPoly]]:
        """All ``E_u R E_v`` of the given weight for the given (default: Serre) relations."""
        rank = self.rs.rank
        if relations is None:
            relations = {f'R{i}{j}': r for (i, j), r in self.relations.items()}
        out = []
        for name, rel in relations.items():
            key = rel.homogeneous_key()
            if key is None:
                raise UnsupportedCaseError(f'Relation {name} is not homogeneous.')
            rest = tuple(w - r for w, r in zip(weight, key[1]))
            if any(c < 0 for c in rest):
                continue
            for left in _sub_weights(rest):
                right = tuple(r - l for r, l in zip(rest, left))
                for u in words_of_weight(left):
                    for v in words_of_weight(right):
                        element = NCPoly.word(self.rs, u) * rel * NCPoly.word(self.rs, v)
                        label = f'{_word_label(u)}|{name}|{_word_label(v)}'
                        out.append((label, element))
        return out

    def ideal_membership(self, x: NCPoly) -> Certificate | None:
        """Certificate that ``x`` lies in the ideal, or None when it does not."""
        if not self.contains(x):
            return None
        terms: list[CertificateTerm] = []
        explicit = True
        for (k, weight), part in x.components().items():
            if len(words_of_weight(weight)) > settings.IDEAL_CERTIFICATE_MAX_WORDS:
                explicit = False
                continue
            k_factor = NCPoly.k_monomial(self.rs, k)
            templates = [(label, k_factor * element) for label, element in self.templates(weight)]
            combo = _solve_in_words(part, templates)
            if combo is None:
                raise UnsupportedCaseError(f'Ideal certificate search failed at weight {weight}.')
            lookup = dict(templates)
            for label, c in combo.items():
                terms.append(CertificateTerm(label=_k_label(k) + label, coefficient=rf(c), element=lookup[label]))
        note = '' if explicit else 'ideal part witnessed by the shuffle embedding'
        return Certificate(kind='ideal', target=x, terms=terms, note=note)

    def solve_identity(self, target: NCPoly, templates: list[tuple[str, NCPoly]],
                       ideal_mode: bool = False,
                       auxiliary: dict[str, NCPoly] | None = None) -> Certificate | None:
        """Solves ``target = sum c_t template_t`` in free-algebra word coordinates.

        With ``ideal_mode`` the u*R*v Serre templates of every weight of the
        target join the system; ``auxiliary`` relations contribute their own
        u*R*v templates the same way.
        """
        extra: list[tuple[str, NCPoly]] = []
        for (k, weight) in target.components():
            if ideal_mode:
                extra.extend(self.templates(weight))
            if auxiliary:
                extra.extend((f'aux:{label}', element) for label, element in self.templates(weight, auxiliary))
        echelon = EchelonBasis()
        lookup = {}
        for label, element in list(templates) + extra:
            lookup[label] = element
            echelon.insert(_word_vector(element), label)
        combo = echelon.express(_word_vector(target))
        if combo is None:
            return None
        terms = [CertificateTerm(label=label, coefficient=rf(c), element=lookup[label])
                 for label, c in combo.items() if c]
        return Certificate(kind='identity', target=target, terms=terms, nullspace_dim=len(echelon.relations))

    # generated subalgebras

    def subspace_membership(self, x: NCPoly, gens: list[tuple[str, NCPoly]], maxdeg: int | None = None) -> Certificate | None:
        """Writes ``x`` as a combination of products of ``gens`` modulo the ideal.

        Components above ``maxdeg`` are not searched; the answer is then None.
        """
        maxdeg = settings.MAX_DEGREE if maxdeg is None else maxdeg
        products = GeneratorProducts(self.rs, gens)
        terms: list[CertificateTerm] = []
        for (k, weight), coords in self.project(x).items():
            if sum(weight) > maxdeg:
                logger.warning('Component above the degree limit', degree=sum(weight), max_degree=maxdeg)
                return None
            candidates = products.with_key(k, weight)
            echelon = EchelonBasis()
            lookup = {}
            for label, element in candidates:
                lookup[label] = element
                echelon.insert(self.embedding.project(element.components().get((k, weight), NCPoly(self.rs)).word_part(), weight), label)
            combo = echelon.express(coords)
            if combo is None:
                return None
            for label, c in combo.items():
                terms.append(CertificateTerm(label=label, coefficient=rf(c), element=lookup[label]))
        return Certificate(kind='subspace', target=x, terms=terms, note='ideal part witnessed by the shuffle embedding')


class GeneratorProducts:
    """Ordered products ``K^m g_{t1} ... g_{tr}`` of homogeneous generators."""

    def __init__(self, rs: RootSystem, gens: list[tuple[str, NCPoly]]):
        self.rs = rs
        self.e_gens: list[tuple[str, NCPoly, tuple[int, ...]]] = []
        self.k_gens: list[tuple[str, KExp]] = []
        for label, g in gens:
            key = g.homogeneous_key()
            if key is None or len(g.terms) == 0:
                raise UnsupportedCaseError(f'Generator {label} is not homogeneous.')
            k, weight = key
            if not any(weight):
                if len(g.terms) != 1:
                    raise UnsupportedCaseError(f'Generator {label} is not a K-monomial.')
                self.k_gens.append((label, k))
            elif any(k):
                raise UnsupportedCaseError(f'Generator {label} mixes group and E parts.')
            else:
                self.e_gens.append((label, g, weight))
        self._cache: dict[tuple[int, ...], list[tuple[str, NCPoly, int]]] = {}

    def e_products(self, weight: tuple[int, ...]) -> list[tuple[str, NCPoly, int]]:
        """``(label, element, factor count)`` for every ordered product of the given weight."""
        weight = tuple(weight)
        if weight in self._cache:
            return self._cache[weight]
        if not any(weight):
            return [('1', NCPoly.one(self.rs), 0)]
        out = []
        for label, g, w in self.e_gens:
            rest = tuple(a - b for a, b in zip(weight, w))
            if any(c < 0 for c in rest):
                continue
            for tail_label, tail, count in self.e_products(rest):
                name = label if tail_label == '1' else f'{label}*{tail_label}'
                out.append((name, g * tail, count + 1))
        self._cache[weight] = out
        return out

    def k_prefix(self, kexp: KExp) -> tuple[str, NCPoly] | None:
        if not any(kexp):
            return '', NCPoly.one(self.rs)
        for label, k in self.k_gens:
            ratios = {kexp[i] // k[i] for i in range(len(k)) if k[i]}
            if len(ratios) == 1:
                m = ratios.pop()
                if m > 0 and all(kexp[i] == m * k[i] for i in range(len(k))):
                    name = label if m == 1 else f'{label}^{m}'
                    return name, NCPoly.k_monomial(self.rs, kexp)
        return None

    def with_key(self, kexp: KExp, weight: tuple[int, ...]) -> list[tuple[str, NCPoly]]:
        prefix = self.k_prefix(kexp)
        if prefix is None:
            return []
        k_label, k_element = prefix
        out = []
        for label, element, _ in self.e_products(weight):
            if k_label:
                name = k_label if label == '1' else f'{k_label}*{label}'
            else:
                name = label
            out.append((name, k_element * element))
        return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _word_vector(x: NCPoly) -> dict:
    return dict(x.terms)


def _solve_in_words(target: NCPoly, templates: list[tuple[str, NCPoly]]):
    echelon = EchelonBasis()
    for label, element in templates:
        echelon.insert(_word_vector(element), label)
    return echelon.express(_word_vector(target))


def _k_label(kexp: KExp) -> str:
    if not any(kexp):
        return ''
    return 'K^(' + ','.join(map(str, kexp)) + ')*'


def _word_label(word: Word) -> str:
    return ''.join(f'E{letter}' for letter in word) or '1'
