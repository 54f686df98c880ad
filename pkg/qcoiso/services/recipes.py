"""
Generator sets of the quantum coisotropic subalgebras, written as bracket trees.

Every built-in case is produced by a small builder that emits bracket text
(``[[E1,E2]_q,E3]``); E6 rows are read from the shipped table. Brackets left
without an exponent get one from :func:`braided_power`.
"""
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import structlog
from pydantic import ValidationError

from qcoiso.core.exceptions import AlgebraMismatchError, QcoisoError, RecipeValidationError, UnsupportedCaseError
from qcoiso.schemas.recipe_schemas import BracketExprSchema, GeneratorSpec, IdentitySchema, RecipeSchema
from qcoiso.services.classical import ChevalleyBasis, LieElement
from qcoiso.services.rootsys import CartanType, Root, RootSystem, root_system
from qcoiso.services.uqalg import NCPoly, q_bracket

logger = structlog.get_logger(__name__)

E6_TABLE = 'e6_beta_tables.json'
E6_MIRROR = {1: 6, 6: 1, 3: 5, 5: 3, 2: 2, 4: 4}

SUPPORTED_CASES = (
    'A_n: L_i-L_j',
    'B_n: L_i-L_j, L_i+L_j',
    'C_n: 2L_i',
    'D_n: L_i-L_j, L_i+L_j',
    'G_2: a2, 3a1+a2, 3a1+2a2',
    'E_6: the rows of the shipped table and their mirrors',
)


@dataclass
class RecipeEntry:
    name: str
    expr: BracketExprSchema
    element: NCPoly
    group: str | None = None
    generator: bool = True

    @property
    def degree(self) -> int:
        return self.element.degree


@dataclass
class GeneratorRecipe:
    schema: RecipeSchema
    rs: RootSystem
    beta: Root
    kexp: tuple[int, ...]
    entries: list[RecipeEntry]
    notes: list[str] = field(default_factory=list)

    @property
    def heuristic(self) -> bool:
        return self.schema.power_assignment == 'heuristic'

    @property
    def case_label(self) -> str:
        return f'{self.rs.ctype} {self.schema.beta}'

    def generators(self) -> list[tuple[str, NCPoly]]:
        """``K`` first, then the E-generators in recipe order."""
        out = []
        if any(self.kexp):
            out.append(('K', NCPoly.k_monomial(self.rs, self.kexp)))
        out.extend((e.name, e.element) for e in self.entries if e.generator)
        return out

    def entry(self, name: str) -> RecipeEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def degree(self) -> int:
        return max((e.degree for e in self.entries if e.generator), default=0)


# evaluation

def eval_bracket_expr(expr: BracketExprSchema, rs: RootSystem, env: dict[str, NCPoly] | None = None) -> NCPoly:
    if expr.gen is not None:
        return NCPoly.generator(rs, expr.gen)
    if expr.ref is not None:
        if env is None or expr.ref not in env:
            raise RecipeValidationError(f'unknown reference {expr.ref!r}')
        return env[expr.ref]
    lhs, rhs, power = expr.qbr
    a = eval_bracket_expr(lhs, rs, env)
    b = eval_bracket_expr(rhs, rs, env)
    if power is None:
        power = braided_power(rs, _weight(expr.qbr[0], rs.rank, {}, env), _weight(expr.qbr[1], rs.rank, {}, env))
    return q_bracket(a, b, power)


def classical_limit_expr(expr: BracketExprSchema, cb: ChevalleyBasis, env: dict[str, LieElement] | None = None) -> LieElement:
    """The same tree at q=1: every q-bracket becomes the Lie bracket."""
    if expr.gen is not None:
        return cb.e[cb.rs._unit(expr.gen - 1)]
    if expr.ref is not None:
        if env is None or expr.ref not in env:
            raise RecipeValidationError(f'unknown reference {expr.ref!r}')
        return env[expr.ref]
    lhs, rhs, _ = expr.qbr
    return cb.bracket(classical_limit_expr(lhs, cb, env), classical_limit_expr(rhs, cb, env))


def braided_power(rs: RootSystem, left_weight, right_weight, lhs_generator: bool = False,
                  rhs_generator: bool = False) -> int:
    """Exponent for ``[A, B]_{q^p}`` with A, B of the given weights.

    Inside the coproduct of ``[A, B]`` the term ``A (x) [K_A, B]`` dies for
    ``p = (wt A, wt B)`` and ``B (x) [A, K_B]`` dies for ``p = -(wt A, wt B)``;
    the surviving one must have a generator on the left leg.
    """
    pairing = rs.form(left_weight, right_weight)
    if rhs_generator and not lhs_generator:
        return pairing
    return -pairing


def _weight(expr: BracketExprSchema, rank: int, weights: dict, env: dict | None = None) -> tuple[int, ...]:
    if expr.gen is not None:
        if not 1 <= expr.gen <= rank:
            raise RecipeValidationError(f'E{expr.gen} does not exist in rank {rank}')
        return tuple(1 if k == expr.gen - 1 else 0 for k in range(rank))
    if expr.ref is not None:
        if expr.ref in weights:
            return weights[expr.ref]
        if env and expr.ref in env:
            key = env[expr.ref].homogeneous_key()
            if key is not None:
                return key[1]
        raise RecipeValidationError(f'unknown reference {expr.ref!r}')
    lhs, rhs, _ = expr.qbr
    a = _weight(lhs, rank, weights, env)
    b = _weight(rhs, rank, weights, env)
    return tuple(x + y for x, y in zip(a, b))


def _shape(expr: BracketExprSchema, shapes: dict):
    if expr.gen is not None:
        return expr.gen
    if expr.ref is not None:
        if expr.ref not in shapes:
            raise RecipeValidationError(f'unknown reference {expr.ref!r}')
        return shapes[expr.ref]
    lhs, rhs, _ = expr.qbr
    return (_shape(lhs, shapes), _shape(rhs, shapes))


def resolve_powers(schema: RecipeSchema, rs: RootSystem) -> tuple[RecipeSchema, bool]:
    """Fills every missing bracket exponent; the flag tells whether any was missing."""
    weights: dict[str, tuple[int, ...]] = {}
    shapes: dict[str, object] = {}
    for spec in schema.generators:
        weights[spec.name] = _weight(spec.expr, rs.rank, weights)
        shapes[spec.name] = _shape(spec.expr, shapes)
    generator_shapes = {shapes[s.name] for s in schema.generators if s.generator}
    filled = False

    def walk(expr: BracketExprSchema) -> BracketExprSchema:
        nonlocal filled
        if expr.qbr is None:
            return expr
        lhs, rhs, power = expr.qbr
        if power is None:
            filled = True
            power = braided_power(rs, _weight(lhs, rs.rank, weights), _weight(rhs, rs.rank, weights),
                                  _shape(lhs, shapes) in generator_shapes, _shape(rhs, shapes) in generator_shapes)
        return BracketExprSchema(qbr=(walk(lhs), walk(rhs), power))

    generators = [spec.model_copy(update={'expr': walk(spec.expr)}) for spec in schema.generators]
    update = {'generators': generators}
    if filled:
        update['power_assignment'] = 'heuristic'
    return schema.model_copy(update=update), filled


def build_recipe(schema: RecipeSchema) -> GeneratorRecipe:
    """Validates a schema against its root system and evaluates every entry."""
    try:
        rs = root_system(CartanType(schema.type, schema.rank))
    except QcoisoError as exc:
        raise RecipeValidationError(exc.message, path='type') from exc
    try:
        beta = rs.parse_root(schema.beta)
    except QcoisoError as exc:
        raise RecipeValidationError(exc.message, path='beta') from exc
    try:
        schema, _ = resolve_powers(schema, rs)
    except RecipeValidationError as exc:
        raise RecipeValidationError(exc.message, path='generators') from exc
    env: dict[str, NCPoly] = {}
    entries = []
    for k, spec in enumerate(schema.generators):
        try:
            element = eval_bracket_expr(spec.expr, rs, env)
        except (AlgebraMismatchError, RecipeValidationError) as exc:
            raise RecipeValidationError(exc.message, path=f'generators.{k}.expr') from exc
        if not element:
            raise RecipeValidationError(f'generator {spec.name} evaluates to zero', path=f'generators.{k}.expr')
        env[spec.name] = element
        entries.append(RecipeEntry(spec.name, spec.expr, element, spec.group, spec.generator))
    recipe = GeneratorRecipe(schema=schema, rs=rs, beta=beta, kexp=tuple(schema.k_monomial),
                             entries=entries, notes=list(schema.notes))
    logger.debug('Recipe built', case=recipe.case_label, generators=len(recipe.generators()),
                 power_assignment=schema.power_assignment)
    return recipe


# documents

def _loc_path(loc) -> str:
    return '.'.join(str(part) for part in loc)


def _validated(document, model):
    if isinstance(document, Path):
        document = document.read_text(encoding='utf-8')
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise RecipeValidationError(f'invalid JSON: {exc.msg}', path=f'line {exc.lineno}') from exc
    try:
        return model.model_validate(document)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise RecipeValidationError(first['msg'], path=_loc_path(first['loc'])) from exc


def parse_recipe(document) -> GeneratorRecipe:
    """Reads a recipe from JSON text, a mapping or a path to a JSON file."""
    return build_recipe(_validated(document, RecipeSchema))


@dataclass
class IdentityProblem:
    schema: IdentitySchema
    rs: RootSystem
    target: NCPoly
    templates: list[tuple[str, NCPoly]]
    auxiliary: dict[str, NCPoly]


def _product(factors: list[BracketExprSchema], rs: RootSystem, path: str) -> NCPoly:
    out = NCPoly.one(rs)
    for k, factor in enumerate(factors):
        try:
            out = out * eval_bracket_expr(factor, rs)
        except (AlgebraMismatchError, RecipeValidationError) as exc:
            raise RecipeValidationError(exc.message, path=f'{path}.{k}') from exc
    return out


def parse_identity(document) -> IdentityProblem:
    """Reads a coefficient problem ``target = sum c_t template_t``; every element is a product of brackets."""
    schema = _validated(document, IdentitySchema)
    try:
        rs = root_system(CartanType(schema.type, schema.rank))
    except QcoisoError as exc:
        raise RecipeValidationError(exc.message, path='type') from exc
    target = _product(schema.target, rs, 'target')
    templates = [(t.label, _product(t.factors, rs, f'templates.{k}.factors')) for k, t in enumerate(schema.templates)]
    auxiliary = {t.label: _product(t.factors, rs, f'auxiliary.{k}.factors') for k, t in enumerate(schema.auxiliary)}
    return IdentityProblem(schema, rs, target, templates, auxiliary)


def serialize_recipe(recipe: GeneratorRecipe) -> dict:
    schema = recipe.schema
    return {
        'type': schema.type,
        'rank': schema.rank,
        'beta': schema.beta,
        'k_monomial': list(schema.k_monomial),
        'power_assignment': schema.power_assignment,
        'notes': list(schema.notes),
        'generators': [
            {'name': g.name, 'expr': g.expr.to_text(), 'group': g.group, 'generator': g.generator}
            for g in schema.generators
        ],
    }


# built-in cases

def _q(power: int | None) -> str:
    if power is None:
        return ''
    if power == 0:
        return '_0'
    return '_q' if power == 1 else f'_q^{power}'


def _br(lhs: str, rhs: str, power: int | None = None) -> str:
    return f'[{lhs},{rhs}]{_q(power)}'


def _chain(indices) -> str:
    """``[[E_a,E_b],...,E_z]`` over the given node sequence."""
    indices = list(indices)
    text = f'E{indices[0]}'
    for k in indices[1:]:
        text = _br(text, f'E{k}')
    return text


def _chain_name(prefix: str, indices) -> str:
    indices = list(indices)
    return f'E{indices[0]}' if len(indices) == 1 else f'{prefix}{indices[-1]}'


def _schema(rs: RootSystem, beta: Root, entries: list[tuple], notes: list[str] | None = None,
            power_assignment: str = 'explicit') -> RecipeSchema:
    generators = [GeneratorSpec(name=name, expr=text, group=group, generator=is_gen)
                  for name, text, group, is_gen in entries]
    return RecipeSchema(type=rs.ctype.series, rank=rs.rank, beta=rs.ambient_label(beta),
                        k_monomial=list(rs.coroot_coefficients(beta)), generators=generators,
                        power_assignment=power_assignment, notes=notes or [])


def _ambient_support(beta: Root) -> list[tuple[int, int]]:
    return [(k, int(c)) for k, c in enumerate(beta.coords, start=1) if c != 0]


def _sl_entries(i: int, j: int) -> list[tuple]:
    """L_i - L_j on the node path i..j-1: the rising chains and the falling chains."""
    m = j - 1
    entries = []
    for k in range(i, m + 1):
        nodes = range(i, k + 1)
        entries.append((_chain_name('X', nodes), _chain(nodes), '(a)', True))
    for k in range(m, i, -1):
        nodes = range(m, k - 1, -1)
        entries.append((_chain_name('D', list(nodes)), _chain(nodes), '(b)', True))
    return entries


def _sp_entries(i: int, n: int) -> list[tuple]:
    """2L_i in C_n."""
    if i == n:
        return [(f'E{n}', f'E{n}', '(a)', True)]
    entries = []
    for k in range(i, n):
        nodes = range(i, k + 1)
        entries.append((_chain_name('X', nodes), _chain(nodes), '(a)', True))
    x = _br(_chain(range(i, n)), f'E{n}')
    entries.append(('X', x, '(b)', True))
    prev = x
    for k in range(n - 1, i - 1, -1):
        prev = _br(prev, f'E{k}', 1)
        entries.append((f'Y{k}', prev, '(b)', True))
    return entries


def _so_even_last_entries(i: int, n: int) -> list[tuple]:
    """L_i + L_n in D_n."""
    entries = []
    for k in range(i, n - 1):
        nodes = range(i, k + 1)
        entries.append((_chain_name('X', nodes), _chain(nodes), '(a)', True))
    prev = f'E{n}'
    entries.append((f'E{n}', prev, '(b)', True))
    for k in range(n - 2, i - 1, -1):
        prev = _br(prev, f'E{k}')
        entries.append((f'D{k}', prev, '(b)', True))
    return entries


def _so_odd_last_entries(i: int, n: int) -> list[tuple]:
    """L_i + L_n in B_n."""
    entries = []
    for k in range(i, n - 1):
        nodes = range(i, k + 1)
        entries.append((_chain_name('X', nodes), _chain(nodes), '(a)', True))
    entries.append((f'E{n}', f'E{n}', '(b)', True))
    entries.append((f'Z{n}', _br(f'E{n}', _chain(range(i, n))), '(b)', True))
    prev = _br(f'E{n}', _br(f'E{n}', f'E{n - 1}'), 0)
    entries.append((f'Y{n - 1}', prev, '(c)', True))
    for k in range(n - 2, i - 1, -1):
        prev = _br(prev, f'E{k}')
        entries.append((f'Y{k}', prev, '(c)', True))
    return entries


def _so_general_entries(series: str, i: int, j: int, n: int) -> list[tuple]:
    """L_i + L_j with j < n in B_n or D_n; T is the auxiliary chain E_i..E_{j-1}."""
    entries = [('T', _chain(range(i, j)), None, False)]
    for k in range(i, j - 1):
        nodes = range(i, k + 1)
        entries.append((_chain_name('X', nodes), _chain(nodes), '(a)', True))
    rising = []
    for k in range(j, n):
        nodes = range(j, k + 1)
        name = f'E{j}' if k == j else f'jX{k}'
        rising.append((name, _chain(nodes)))
        entries.append((name, _chain(nodes), '(b)', True))
    for name, text in rising:
        entries.append((f'{name}T', _br(text, 'T'), '(c)', True))
    falling = []
    if series == 'D':
        top = _br(_chain(range(j, n - 1)), f'E{n}') if j <= n - 2 else f'E{n}'
        top_name = f'jX{n}' if j <= n - 2 else f'E{n}'
        falling.append((top_name, top))
        prev = top
    else:
        top = _br(_chain(range(j, n)), f'E{n}')
        falling.append((f'jX{n}', top))
        prev = _br(top, f'E{n}', 0)
        falling.append((f'jY{n}', prev))
    for k in range(n - 1, j, -1):
        prev = _br(prev, f'E{k}')
        falling.append((f'jY{k}', prev))
    for name, text in falling:
        entries.append((name, text, '(d)', True))
    for name, text in falling:
        entries.append((f'{name}T', _br(text, 'T'), '(e)', True))
    last = falling[-1][1]
    prev = _br(last, _br(f'E{j}', f'E{j - 1}'))
    entries.append((f'jY{j - 1}', prev, '(f)', True))
    for k in range(j - 2, i - 1, -1):
        prev = _br(prev, f'E{k}')
        entries.append((f'jY{k}', prev, '(f)', True))
    return entries


_G2_CASES = {
    (0, 1): [('E2', 'E2', None)],
    (3, 1): [
        ('E1', 'E1', None),
        ('X', '[[E1,E2]_q^3,E1]_q^-1', None),
        ('Y', '[X,E1]_q', None),
    ],
    (3, 2): [
        ('E2', 'E2', None),
        ('X', '[E2,E1]_q^3', None),
        ('Y', '[X,E1]_q', None),
        ('Z', '[Y,E1]_q^-1', None),
        ('T', '[Z,E2]_0', None),
    ],
}


def _builtin_schema(rs: RootSystem, beta: Root) -> RecipeSchema:
    series, n = rs.ctype.series, rs.rank
    if series == 'G':
        rows = _G2_CASES.get(beta.simple_decomp)
        if rows is None:
            raise UnsupportedCaseError(_unsupported(rs, beta))
        return _schema(rs, beta, [(name, text, group, True) for name, text, group in rows])
    if series == 'E' and n == 6:
        for schema in load_e6_tables():
            if rs.parse_root(schema.beta) == beta:
                return schema
        raise UnsupportedCaseError(_unsupported(rs, beta))
    if series not in ('A', 'B', 'C', 'D'):
        raise UnsupportedCaseError(_unsupported(rs, beta))

    support = _ambient_support(beta)
    signs = [c for _, c in support]
    if series == 'A' or (series in ('B', 'D') and signs == [1, -1]):
        (i, _), (j, _) = support
        # A_n lives in n+1 coordinates; B/D use L_i - L_j on the node path i..j-1
        return _schema(rs, beta, _sl_entries(i, j))
    if series == 'C' and signs == [2]:
        return _schema(rs, beta, _sp_entries(support[0][0], n))
    if series in ('B', 'D') and signs == [1, 1]:
        (i, _), (j, _) = support
        if j == n:
            builder = _so_even_last_entries if series == 'D' else _so_odd_last_entries
            return _schema(rs, beta, builder(i, n))
        return _schema(rs, beta, _so_general_entries(series, i, j, n))
    raise UnsupportedCaseError(_unsupported(rs, beta))


def _unsupported(rs: RootSystem, beta: Root) -> str:
    return (f'No built-in recipe for {rs.ctype} with beta={rs.ambient_label(beta)}. '
            f'Supported: {"; ".join(SUPPORTED_CASES)}.')


def builtin_recipe(ctype: CartanType, beta: Root | str) -> GeneratorRecipe:
    rs = root_system(ctype)
    if isinstance(beta, str):
        beta = rs.parse_root(beta)
    if not beta.is_positive:
        raise UnsupportedCaseError(_unsupported(rs, beta))
    schema = _builtin_schema(rs, beta)
    if rs.ctype.series != 'E':
        # built-in brackets carry the powers of the construction, derived by the same rule
        schema, _ = resolve_powers(schema, rs)
        schema = schema.model_copy(update={'power_assignment': 'explicit'})
    return build_recipe(schema)


def builtin_cases(ctype: CartanType) -> list[Root]:
    """Positive roots of ``ctype`` that have a built-in recipe."""
    rs = root_system(ctype)
    out = []
    for beta in rs.positive_roots:
        try:
            _builtin_schema(rs, beta)
        except UnsupportedCaseError:
            continue
        out.append(beta)
    return out


# E6 tables

def _mirror_text(text: str) -> str:
    return re.sub(r'E(\d+)', lambda m: f'E{E6_MIRROR[int(m.group(1))]}', text)


def _mirror_decomp(decomp: list[int]) -> list[int]:
    out = [0] * 6
    for k, c in enumerate(decomp, start=1):
        out[E6_MIRROR[k] - 1] = c
    return out


def _e6_schema(rs: RootSystem, decomp: list[int], texts: list[str], printed_k: list[int], row: str) -> RecipeSchema:
    beta = rs.root(decomp)
    notes = [f'table row {row}']
    coroot = list(rs.coroot_coefficients(beta))
    if printed_k != coroot:
        notes.append(f'printed K exponents {printed_k} differ from the root decomposition {coroot}; '
                     f'the decomposition is used')
    entries = [(f'g{k}', text, None, True) for k, text in enumerate(texts, start=1)]
    return _schema(rs, beta, entries, notes=notes, power_assignment='heuristic')


@lru_cache(maxsize=1)
def _e6_rows() -> list[dict]:
    text = resources.files('qcoiso.data').joinpath(E6_TABLE).read_text(encoding='utf-8')
    return json.loads(text)['rows']


@lru_cache(maxsize=1)
def load_e6_tables() -> tuple[RecipeSchema, ...]:
    """Every E6 recipe: the simple roots, each row, and the mirror of every starred row."""
    rs = root_system(CartanType('E', 6))
    out: list[RecipeSchema] = []
    seen: set[tuple[int, ...]] = set()
    for row in _e6_rows():
        if row.get('all_simple'):
            variants = [([1 if k == i else 0 for k in range(6)], [f'E{i + 1}'],
                         [1 if k == i else 0 for k in range(6)]) for i in range(6)]
        else:
            variants = [(row['decomposition'], row['generators'], row['k_printed'])]
            if row.get('mirror'):
                variants.append((_mirror_decomp(row['decomposition']),
                                 [_mirror_text(t) for t in row['generators']],
                                 _mirror_decomp(row['k_printed'])))
        for decomp, texts, printed in variants:
            if tuple(decomp) in seen:
                continue
            seen.add(tuple(decomp))
            out.append(_e6_schema(rs, decomp, texts, printed, str(row['row'])))
    logger.debug('E6 tables loaded', recipes=len(out))
    return tuple(out)
