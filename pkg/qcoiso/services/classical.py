"""
Classical side: Chevalley bases, the standard r-matrix and coisotropic subalgebras.

Every algebra is stored as a structure-constant table over an indexed basis
(positive root vectors, Cartan elements, negative root vectors). Types A-D
obtain the table from their standard matrix realisations; E6 from the
Frenkel-Kac construction; G2 by folding D4 under triality. Scalars are exact
``QQ`` elements throughout.
"""
from functools import lru_cache

import structlog
from sympy.polys.domains import QQ

from qcoiso.core.exceptions import RootSystemError, UnsupportedCaseError
from qcoiso.services.linalg import EchelonBasis, vec_axpy
from qcoiso.services.rootsys import CartanType, Root, RootSystem, root_system

logger = structlog.get_logger(__name__)


class LieElement:
    """Sparse coordinates over the basis indices of a :class:`ChevalleyBasis`."""
    __slots__ = ('coords',)

    def __init__(self, coords: dict[int, object] | None = None):
        self.coords = {i: QQ.convert(v) for i, v in (coords or {}).items() if v}

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        return isinstance(other, LieElement) and self.coords == other.coords

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def __add__(self, other: 'LieElement') -> 'LieElement':
        out = dict(self.coords)
        vec_axpy(out, QQ(1), other.coords)
        return LieElement(out)

    def __neg__(self) -> 'LieElement':
        return LieElement({i: -v for i, v in self.coords.items()})

    def __sub__(self, other: 'LieElement') -> 'LieElement':
        return self + (-other)

    def __rmul__(self, scalar) -> 'LieElement':
        s = QQ.convert(scalar)
        return LieElement({i: s * v for i, v in self.coords.items()})

    def __repr__(self):
        return f'LieElement({self.coords})'


class Bivector:
    """Antisymmetric tensor ``sum c_ij b_i ^ b_j`` stored with i < j."""
    __slots__ = ('terms',)

    def __init__(self, terms: dict[tuple[int, int], object] | None = None):
        self.terms = {}
        for (i, j), c in (terms or {}).items():
            self._add(i, j, QQ.convert(c))

    def _add(self, i: int, j: int, c):
        if i == j or not c:
            return
        if i > j:
            i, j, c = j, i, -c
        new = self.terms.get((i, j), QQ(0)) + c
        if new:
            self.terms[(i, j)] = new
        else:
            self.terms.pop((i, j), None)

    @classmethod
    def wedge(cls, x: LieElement, y: LieElement) -> 'Bivector':
        out = cls()
        for i, a in x.coords.items():
            for j, b in y.coords.items():
                out._add(i, j, a * b)
        return out

    def __add__(self, other: 'Bivector') -> 'Bivector':
        out = Bivector(self.terms)
        for (i, j), c in other.terms.items():
            out._add(i, j, c)
        return out

    def __neg__(self) -> 'Bivector':
        return Bivector({k: -c for k, c in self.terms.items()})

    def __rmul__(self, scalar) -> 'Bivector':
        s = QQ.convert(scalar)
        return Bivector({k: s * c for k, c in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Bivector) and self.terms == other.terms


Matrix = dict[tuple[int, int], object]


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows: dict[int, list] = {}
    for (k, c), v in b.items():
        rows.setdefault(k, []).append((c, v))
    out: Matrix = {}
    for (r, k), u in a.items():
        for c, v in rows.get(k, ()):
            new = out.get((r, c), QQ(0)) + u * v
            if new:
                out[(r, c)] = new
            else:
                out.pop((r, c), None)
    return out


def _mat_comm(a: Matrix, b: Matrix) -> Matrix:
    out = _mat_mul(a, b)
    vec_axpy(out, QQ(-1), _mat_mul(b, a))
    return out


def _transpose(a: Matrix) -> Matrix:
    return {(c, r): v for (r, c), v in a.items()}


def _elementary(*entries) -> Matrix:
    out: Matrix = {}
    for r, c, v in entries:
        out[(r, c)] = out.get((r, c), QQ(0)) + QQ(v)
    return {k: v for k, v in out.items() if v}


class ChevalleyBasis:
    """Structure constants plus the distinguished vectors e_alpha, f_alpha, h_i."""

    def __init__(self, rs: RootSystem, labels: list[tuple], structure: dict, names: list[str],
                 matrices: list[Matrix] | None = None, size: int | None = None):
        self.rs = rs
        self.labels = labels
        self.index = {label: i for i, label in enumerate(labels)}
        self.structure = structure
        self.names = names
        self.matrices = matrices
        self.size = size
        self.dim = len(labels)
        self.e: dict[tuple[int, ...], LieElement] = {}
        self.f: dict[tuple[int, ...], LieElement] = {}
        self.h: list[LieElement] = [self.basis(('h', i + 1)) for i in range(rs.rank)]

    def basis(self, label) -> LieElement:
        return LieElement({self.index[label]: QQ(1)})

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        out: dict[int, object] = {}
        for a, u in x.coords.items():
            for b, v in y.coords.items():
                if a == b:
                    continue
                if a < b:
                    vec_axpy(out, u * v, self.structure.get((a, b), {}))
                else:
                    vec_axpy(out, -(u * v), self.structure.get((b, a), {}))
        return LieElement(out)

    def killing_form(self, x: LieElement, y: LieElement):
        """Trace of ad(x) ad(y) over the structure-constant basis."""
        total = QQ(0)
        for c in range(self.dim):
            image = self.bracket(x, self.bracket(y, LieElement({c: QQ(1)})))
            total += image.coords.get(c, QQ(0))
        return total

    def cartan_coordinates(self, x: LieElement) -> tuple:
        return tuple(x.coords.get(self.index[('h', i + 1)], QQ(0)) for i in range(self.rs.rank))

    def coroot(self, root: Root) -> LieElement:
        coeffs = self.rs.coroot_coefficients(root)
        return LieElement({self.index[('h', i + 1)]: QQ(c) for i, c in enumerate(coeffs) if c})

    def render(self, x: LieElement) -> str:
        if not x:
            return '0'
        pieces = []
        for i in sorted(x.coords):
            c = x.coords[i]
            name = self.names[i]
            if c == 1:
                body = name
            elif c == -1:
                body = f'-{name}'
            else:
                body = f'{QQ.to_sympy(c)}*{name}'
            pieces.append(body)
        return ' + '.join(pieces).replace('+ -', '- ')

    def to_matrix(self, x: LieElement) -> list[list[str]] | None:
        if self.matrices is None:
            return None
        out: Matrix = {}
        for i, c in x.coords.items():
            vec_axpy(out, c, self.matrices[i])
        return [[str(QQ.to_sympy(out.get((r, s), QQ(0)))) for s in range(self.size)] for r in range(self.size)]


# realisations of the classical series

def _root_matrix(ctype: CartanType, root: Root) -> Matrix:
    n = ctype.rank
    coords = [int(c) for c in root.coords]
    plus = [k for k, c in enumerate(coords) if c > 0]
    minus = [k for k, c in enumerate(coords) if c < 0]
    s = ctype.series
    if s == 'A':
        return _elementary((plus[0], minus[0], 1))
    if len(plus) == 1 and len(minus) == 1:
        i, j = plus[0], minus[0]
        return _elementary((i, j, 1), (n + j, n + i, -1))
    if len(plus) == 2:
        i, j = plus
        if s == 'C':
            return _elementary((i, n + j, 1), (j, n + i, 1))
        return _elementary((i, n + j, 1), (j, n + i, -1))
    if s == 'C' and coords[plus[0]] == 2:
        i = plus[0]
        return _elementary((i, n + i, 1))
    if s == 'B' and len(plus) == 1:
        i = plus[0]
        return _elementary((i, 2 * n, 1), (2 * n, n + i, -1))
    raise RootSystemError(f'No matrix for root {root.label()} in {ctype}.')


def _matrix_size(ctype: CartanType) -> int:
    n = ctype.rank
    return {'A': n + 1, 'B': 2 * n + 1, 'C': 2 * n, 'D': 2 * n}[ctype.series]


def _matrix_basis(rs: RootSystem) -> ChevalleyBasis:
    ctype = rs.ctype
    positive = list(rs.positive_roots)
    e_mats = [_root_matrix(ctype, r) for r in positive]
    f_mats = [_transpose(m) for m in e_mats]
    h_mats = []
    for i, simple in enumerate(rs.simple_roots):
        k = positive.index(simple)
        m = _mat_comm(e_mats[k], f_mats[k])
        bracket = _mat_comm(m, e_mats[k])
        (pos, value), = list(bracket.items())[:1]
        scale = QQ(2) / (value / e_mats[k][pos])
        h_mats.append({key: scale * v for key, v in m.items()})
    labels = [('e', r.simple_decomp) for r in positive] + [('h', i + 1) for i in range(rs.rank)] + \
             [('f', r.simple_decomp) for r in positive]
    names = [f'e[{rs.ambient_label(r)}]' for r in positive] + [f'h{i + 1}' for i in range(rs.rank)] + \
            [f'f[{rs.ambient_label(r)}]' for r in positive]
    matrices = e_mats + h_mats + f_mats
    echelon = EchelonBasis()
    for idx, m in enumerate(matrices):
        echelon.insert(m, idx)
    structure = {}
    for a in range(len(matrices)):
        for b in range(a + 1, len(matrices)):
            comm = _mat_comm(matrices[a], matrices[b])
            if comm:
                combo = echelon.express(comm)
                if combo is None:
                    raise RootSystemError(f'Realisation of {ctype} is not closed under brackets.')
                structure[(a, b)] = {k: v for k, v in combo.items() if v}
    cb = ChevalleyBasis(rs, labels, structure, names, matrices, _matrix_size(ctype))
    for r in positive:
        cb.e[r.simple_decomp] = cb.basis(('e', r.simple_decomp))
        cb.f[r.simple_decomp] = cb.basis(('f', r.simple_decomp))
    return cb


# Frenkel-Kac construction for simply laced types

def _fk_sign(rs: RootSystem, odd_pairs: set, a: tuple, b: tuple) -> int:
    exponent = sum(a[i] * b[j] for (i, j) in odd_pairs)
    return -1 if exponent % 2 else 1


def _default_odd_pairs(rs: RootSystem) -> set:
    pairs = {(i, i) for i in range(rs.rank)}
    for i in range(rs.rank):
        for j in range(i + 1, rs.rank):
            if rs.form_matrix[i][j] == -1:
                pairs.add((i, j))
    return pairs


class _FrenkelKac:
    """Simply laced algebra with basis E_alpha (all roots) and H_i."""

    def __init__(self, rs: RootSystem, odd_pairs: set):
        self.rs = rs
        self.odd_pairs = odd_pairs
        self.roots = [r.simple_decomp for r in rs.roots]

    def bracket(self, x: dict, y: dict) -> dict:
        out: dict = {}
        rs = self.rs
        for a, u in x.items():
            for b, v in y.items():
                c = u * v
                if a[0] == 'H' and b[0] == 'H':
                    continue
                if a[0] == 'H':
                    vec_axpy(out, c * rs.form(rs._unit(a[1] - 1), b[1]), {b: QQ(1)})
                elif b[0] == 'H':
                    vec_axpy(out, -c * rs.form(rs._unit(b[1] - 1), a[1]), {a: QQ(1)})
                else:
                    total = tuple(p + r for p, r in zip(a[1], b[1]))
                    if not any(total):
                        vec_axpy(out, -c, {('H', i + 1): QQ(k) for i, k in enumerate(a[1]) if k})
                    elif rs.is_root(total):
                        vec_axpy(out, c * _fk_sign(rs, self.odd_pairs, a[1], b[1]), {('E', total): QQ(1)})
        return out


def _abstract_basis(rs: RootSystem, fk: _FrenkelKac, fold=None, names=None) -> ChevalleyBasis:
    """Structure table over {e_gamma, h_i, f_gamma} given ambient vectors for each label."""
    positive = list(rs.positive_roots)
    if fold is None:
        vectors = [{('E', r.simple_decomp): QQ(1)} for r in positive] + \
                  [{('H', i + 1): QQ(1)} for i in range(rs.rank)] + \
                  [{('E', tuple(-c for c in r.simple_decomp)): QQ(1)} for r in positive]
    else:
        vectors = fold(positive)
    labels = [('e', r.simple_decomp) for r in positive] + [('h', i + 1) for i in range(rs.rank)] + \
             [('f', r.simple_decomp) for r in positive]
    if names is None:
        names = [f'E[{r.label()}]' for r in positive] + [f'h{i + 1}' for i in range(rs.rank)] + \
                [f'F[{r.label()}]' for r in positive]
    echelon = EchelonBasis()
    for idx, v in enumerate(vectors):
        echelon.insert(v, idx)
    structure = {}
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            comm = fk.bracket(vectors[a], vectors[b])
            if comm:
                combo = echelon.express(comm)
                if combo is None:
                    raise RootSystemError(f'Folded basis of {rs.ctype} is not closed under brackets.')
                structure[(a, b)] = {k: v for k, v in combo.items() if v}
    cb = ChevalleyBasis(rs, labels, structure, names)
    _greedy_root_vectors(cb)
    return cb


def _greedy_root_vectors(cb: ChevalleyBasis) -> None:
    """e_alpha by bracketing with simple root vectors in index order; f_alpha normalised by [e, f] = h_alpha."""
    rs = cb.rs
    e_simple = []
    f_simple = []
    for i, simple in enumerate(rs.simple_roots):
        e = cb.basis(('e', simple.simple_decomp))
        f = cb.basis(('f', simple.simple_decomp))
        h = cb.bracket(e, f)
        ratio = _ratio(h, cb.coroot(simple))
        f = (1 / ratio) * f
        e_simple.append(e)
        f_simple.append(f)
        cb.e[simple.simple_decomp] = e
        cb.f[simple.simple_decomp] = f
    for root in sorted(rs.positive_roots, key=lambda r: (r.height, r.simple_decomp)):
        if root.height == 1:
            continue
        for i in range(rs.rank):
            prev = tuple(c - (1 if k == i else 0) for k, c in enumerate(root.simple_decomp))
            if prev not in cb.e:
                continue
            e = cb.bracket(cb.e[prev], e_simple[i])
            if not e:
                continue
            f = cb.bracket(cb.f[prev], f_simple[i])
            ratio = _ratio(cb.bracket(e, f), cb.coroot(root))
            cb.e[root.simple_decomp] = e
            cb.f[root.simple_decomp] = (1 / ratio) * f
            break
        else:
            raise RootSystemError(f'No root vector found for {root.label()}.')


def _ratio(x: LieElement, y: LieElement):
    """The scalar s with x = s*y, for proportional non-zero vectors."""
    i = next(iter(y.coords))
    s = x.coords.get(i, QQ(0)) / y.coords[i]
    if not s or x != s * y:
        raise RootSystemError('Cartan element is not proportional to the coroot.')
    return s


def _g2_fold(d4: RootSystem):
    """Orbit sums of D4 root vectors under the triality 1 -> 3 -> 4 -> 1."""
    def project(decomp):
        return (decomp[0] + decomp[2] + decomp[3], decomp[1])

    def fold(g2_positive):
        vectors = []
        for r in g2_positive:
            orbit = [x.simple_decomp for x in d4.positive_roots if project(x.simple_decomp) == r.simple_decomp]
            vectors.append({('E', d): QQ(1) for d in orbit})
        vectors.append({('H', 1): QQ(1), ('H', 3): QQ(1), ('H', 4): QQ(1)})
        vectors.append({('H', 2): QQ(1)})
        for r in g2_positive:
            orbit = [x.simple_decomp for x in d4.positive_roots if project(x.simple_decomp) == r.simple_decomp]
            vectors.append({('E', tuple(-c for c in d)): QQ(1) for d in orbit})
        return vectors

    return fold


def _g2_names(rs: RootSystem) -> list[str]:
    order = sorted(rs.positive_roots, key=lambda r: (r.height, tuple(-c for c in r.simple_decomp)))
    number = {r.simple_decomp: k + 1 for k, r in enumerate(order)}
    positive = list(rs.positive_roots)
    return [f'x{number[r.simple_decomp]}' for r in positive] + ['h1', 'h2'] + \
           [f'y{number[r.simple_decomp]}' for r in positive]


@lru_cache(maxsize=None)
def build_realization(rs: RootSystem) -> ChevalleyBasis:
    series = rs.ctype.series
    if series in ('A', 'B', 'C', 'D'):
        cb = _matrix_basis(rs)
    elif series == 'E' and rs.rank == 6:
        cb = _abstract_basis(rs, _FrenkelKac(rs, _default_odd_pairs(rs)))
    elif series == 'G':
        d4 = root_system(CartanType('D', 4))
        # triality-invariant cocycle: only the links touching node 2 are odd, oriented out of node 2
        odd = {(i, i) for i in range(4)} | {(1, 0), (1, 2), (1, 3)}
        cb = _abstract_basis(rs, _FrenkelKac(d4, odd), fold=_g2_fold(d4), names=_g2_names(rs))
    else:
        raise UnsupportedCaseError(f'No classical realisation for {rs.ctype}.')
    logger.debug('Chevalley basis built', cartan_type=str(rs.ctype), dim=cb.dim)
    return cb


def killing_lambda(cb: ChevalleyBasis, root: Root):
    if not root.is_positive:
        raise RootSystemError('killing_lambda needs a positive root.')
    value = cb.killing_form(cb.e[root.simple_decomp], cb.f[root.simple_decomp])
    if not value:
        raise RootSystemError(f'Degenerate Killing pairing for {root.label()}.')
    return 1 / value


def build_r_matrix(cb: ChevalleyBasis) -> Bivector:
    pi = Bivector()
    for root in cb.rs.positive_roots:
        d = root.simple_decomp
        pi = pi + killing_lambda(cb, root) * Bivector.wedge(cb.e[d], cb.f[d])
    return pi


def ad_bivector(cb: ChevalleyBasis, x: LieElement, b: Bivector) -> Bivector:
    out = Bivector()
    for (i, j), c in b.terms.items():
        bi = LieElement({i: QQ(1)})
        bj = LieElement({j: QQ(1)})
        out = out + c * Bivector.wedge(cb.bracket(x, bi), bj)
        out = out + c * Bivector.wedge(bi, cb.bracket(x, bj))
    return out


def coisotropic_generators(cb: ChevalleyBasis, b: Bivector) -> list[LieElement]:
    """Reduced echelon basis of the image of the contraction b^#."""
    rows: dict[int, dict] = {}
    for (i, j), c in b.terms.items():
        vec_axpy(rows.setdefault(i, {}), c, {j: QQ(1)})
        vec_axpy(rows.setdefault(j, {}), -c, {i: QQ(1)})
    echelon = EchelonBasis()
    for i in sorted(rows):
        if rows[i]:
            echelon.insert(rows[i], i)
    return [LieElement(row) for row in echelon.basis_rows()]


def check_master_equation(cb: ChevalleyBasis, x: LieElement, pi: Bivector) -> bool:
    return not ad_bivector(cb, x, ad_bivector(cb, x, pi))


def check_coisotropic(cb: ChevalleyBasis, pi: Bivector, gens: list[LieElement]) -> dict:
    """Closure under brackets and delta(h) inside h ^ g, with the first failing witness."""
    span = EchelonBasis()
    for k, g in enumerate(gens):
        span.insert(g.coords, k)
    report = {'closure': True, 'coideal': True, 'witness': None}
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if not span.contains(cb.bracket(gens[a], gens[b]).coords):
                report['closure'] = False
                report['witness'] = f'[{cb.render(gens[a])}, {cb.render(gens[b])}] not in span'
                return report
    residual_cache: dict[int, dict] = {}

    def quotient(i: int) -> dict:
        if i not in residual_cache:
            residual_cache[i], _ = span.reduce({i: QQ(1)})
        return residual_cache[i]

    for g in gens:
        delta = ad_bivector(cb, g, pi)
        image = Bivector()
        for (i, j), c in delta.terms.items():
            image = image + c * Bivector.wedge(LieElement(quotient(i)), LieElement(quotient(j)))
        if image:
            report['coideal'] = False
            report['witness'] = f'delta({cb.render(g)}) not in h ^ g'
            return report
    return report
