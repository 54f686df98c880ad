import json

import pytest

from qcoiso.core.exceptions import RecipeValidationError, UnsupportedCaseError
from qcoiso.schemas.recipe_schemas import BracketExprSchema, RecipeSchema, parse_bracket_text
from qcoiso.services.classical import build_realization
from qcoiso.services.qfield import qpow
from qcoiso.services.recipes import (
    braided_power, builtin_cases, builtin_recipe, classical_limit_expr, eval_bracket_expr, load_e6_tables,
    parse_recipe, resolve_powers, serialize_recipe,
)
from qcoiso.services.rootsys import CartanType, root_system
from qcoiso.services.uqalg import NCPoly, q_bracket


def _a2_document(**overrides):
    document = {
        'type': 'A', 'rank': 2, 'beta': 'L1-L3', 'k_monomial': [1, 1],
        'generators': [
            {'name': 'E1', 'expr': 'E1'},
            {'name': 'E2', 'expr': 'E2'},
            {'name': 'X', 'expr': '[E1,E2]_q'},
        ],
    }
    document.update(overrides)
    return document


def test_parse_bracket_text():
    """Nested brackets, exponents and references."""
    node = parse_bracket_text('[[E1,E2]_q,E3]_q^-2')
    assert node == {'qbr': [{'qbr': [{'gen': 1}, {'gen': 2}, 1]}, {'gen': 3}, -2]}
    assert parse_bracket_text('[X,E1]_0') == {'qbr': [{'ref': 'X'}, {'gen': 1}, 0]}
    assert parse_bracket_text('[E1,E2]') == {'qbr': [{'gen': 1}, {'gen': 2}, None]}
    with pytest.raises(ValueError):
        parse_bracket_text('[E1,E2')
    with pytest.raises(ValueError):
        parse_bracket_text('[E1;E2]')


def test_bracket_text_is_reproduced():
    """to_text writes back what was read."""
    for text in ('[[E1,E2]_q,E3]_q^-2', '[X,E1]_0', '[E2,E1]_q^3', '[E1,E2]'):
        assert BracketExprSchema.model_validate(text).to_text() == text


def test_braided_power_in_a2():
    """Default -(wt A, wt B); +(wt A, wt B) when only the right operand is a generator."""
    rs = root_system(CartanType('A', 2))
    assert braided_power(rs, (1, 0), (0, 1)) == 1
    assert braided_power(rs, (1, 0), (0, 1), rhs_generator=True) == -1
    assert braided_power(rs, (1, 0), (0, 1), lhs_generator=True, rhs_generator=True) == 1


def test_resolve_powers_marks_the_recipe_heuristic():
    """An unresolved bracket is filled in and flagged."""
    rs = root_system(CartanType('A', 2))
    schema = RecipeSchema.model_validate(_a2_document(generators=[{'name': 'X', 'expr': '[E1,E2]'}]))
    resolved, filled = resolve_powers(schema, rs)
    assert filled
    assert resolved.power_assignment == 'heuristic'
    assert resolved.generators[0].expr.qbr[2] == 1
    _, filled = resolve_powers(resolved, rs)
    assert not filled


def test_parse_recipe_evaluates_generators():
    """A JSON document becomes evaluated elements with K in front."""
    recipe = parse_recipe(json.dumps(_a2_document()))
    rs = recipe.rs
    e1, e2 = NCPoly.generator(rs, 1), NCPoly.generator(rs, 2)
    names = [name for name, _ in recipe.generators()]
    assert names == ['K', 'E1', 'E2', 'X']
    assert recipe.entry('X').element == q_bracket(e1, e2, 1)
    assert recipe.entry('X').element == e1 * e2 - qpow(1) * (e2 * e1)
    assert recipe.degree == 2
    assert not recipe.heuristic


def test_parse_recipe_reads_paths(tmp_path):
    """Paths are read as JSON files."""
    path = tmp_path / 'a2.json'
    path.write_text(json.dumps(_a2_document()), encoding='utf-8')
    assert parse_recipe(path).case_label == 'A2 L1-L3'


@pytest.mark.parametrize("document,path", [
    ({'type': 'A', 'rank': 2, 'beta': 'L1-L3', 'k_monomial': [1, 1]}, 'generators'),
    (_a2_document(generators=[{'name': 'X', 'expr': '[E1,E7]_q'}]), 'generators'),
    (_a2_document(k_monomial=[1]), ''),
    (_a2_document(beta='L1-L9'), 'beta'),
])
def test_parse_recipe_errors_name_the_failing_field(document, path):
    """The error path points at the offending part of the document."""
    with pytest.raises(RecipeValidationError) as exc_info:
        parse_recipe(document)
    assert exc_info.value.path == path


def test_parse_recipe_rejects_invalid_json():
    """Malformed JSON is a validation error, not a crash."""
    with pytest.raises(RecipeValidationError):
        parse_recipe('{"type": ')


def test_zero_generator_is_rejected():
    """[E1,E1]_0 vanishes."""
    with pytest.raises(RecipeValidationError) as exc_info:
        parse_recipe(_a2_document(generators=[{'name': 'Z', 'expr': '[E1,E1]_0'}]))
    assert exc_info.value.path == 'generators.0.expr'


@pytest.mark.parametrize("series,rank,beta,count", [
    ('A', 2, 'L1-L3', 4),
    ('A', 3, 'L1-L4', 6),
    ('C', 2, '2L1', 4),
    ('C', 3, '2L1', 6),
    ('D', 4, 'L1+L4', 6),
    ('D', 4, 'L1+L2', 10),
    ('B', 2, 'L1+L2', 4),
    ('B', 3, 'L1+L3', 6),
    ('B', 3, 'L1+L2', 8),
])
def test_builtin_generator_counts(series, rank, beta, count):
    """Number of generators of B_h, K included."""
    recipe = builtin_recipe(CartanType(series, rank), beta)
    assert len(recipe.generators()) == count
    assert recipe.schema.power_assignment == 'explicit'


def test_builtin_sl3_generators():
    """L1-L3 in A2: E1, E2 and [E1,E2]_q with K = K1 K2."""
    recipe = builtin_recipe(CartanType('A', 2), 'L1-L3')
    assert recipe.kexp == (1, 1)
    texts = [g['expr'] for g in serialize_recipe(recipe)['generators']]
    assert texts == ['E1', '[E1,E2]_q', 'E2']


def test_builtin_recipe_for_inadmissible_root_is_unsupported():
    """Short roots of C_n have no recipe."""
    with pytest.raises(UnsupportedCaseError):
        builtin_recipe(CartanType('C', 3), 'L1-L2')


def test_serialized_recipe_parses_back():
    """A serialized built-in validates as a user recipe."""
    recipe = builtin_recipe(CartanType('B', 3), 'L1+L3')
    again = parse_recipe(serialize_recipe(recipe))
    assert [n for n, _ in again.generators()] == [n for n, _ in recipe.generators()]
    assert all(again.entry(e.name).element == e.element for e in recipe.entries)


def test_e6_table_covers_every_positive_root():
    """Rows, mirrors and simple roots give one recipe per positive root."""
    schemas = load_e6_tables()
    assert len(schemas) == 36
    assert len(builtin_cases(CartanType('E', 6))) == 36
    assert all(s.power_assignment == 'heuristic' for s in schemas)


def test_e6_printed_k_discrepancy_is_noted():
    """Row 20 prints K2 where the root needs K2^2."""
    rows = [s for s in load_e6_tables() if 'table row 20' in s.notes]
    assert len(rows) == 1
    assert rows[0].k_monomial == [1, 2, 2, 3, 2, 1]
    assert any('printed K' in note for note in rows[0].notes)


@pytest.mark.slow
def test_every_e6_recipe_evaluates():
    """Each E6 schema resolves its powers and evaluates to non-zero elements."""
    rs = root_system(CartanType('E', 6))
    for beta in builtin_cases(CartanType('E', 6)):
        recipe = builtin_recipe(CartanType('E', 6), beta)
        assert recipe.beta == beta
        assert recipe.heuristic
        assert all(element for _, element in recipe.generators())
        assert recipe.rs is rs


def test_bracket_tree_and_its_classical_limit(a2):
    """[E1,E2]_q evaluates to E1E2 - qE2E1 and specialises to [e1, e2]."""
    expr = BracketExprSchema.model_validate('[E1,E2]_q')
    e1, e2 = NCPoly.generator(a2, 1), NCPoly.generator(a2, 2)
    assert eval_bracket_expr(expr, a2) == e1 * e2 - qpow(1) * (e2 * e1)
    cb = build_realization(a2)
    assert classical_limit_expr(expr, cb) == cb.bracket(cb.e[(1, 0)], cb.e[(0, 1)])
