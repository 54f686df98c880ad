import random
from unittest.mock import patch

import pytest

from qcoiso.core.config import settings
from qcoiso.core.exceptions import DegreeOverflowError, UnsupportedCaseError
from qcoiso.services.qfield import qpow
from qcoiso.services.recipes import builtin_recipe, parse_recipe, serialize_recipe
from qcoiso.services.rootsys import CartanType, admissible_positive_roots, root_system
from qcoiso.services.uqalg import NCPoly, q_bracket, serre_relation
from qcoiso.services.verify import (
    check_flatness, check_left_coideal, check_lemma_astuce, golden_identity, ideal_for, right_leg_decomposition,
    run_full_verification, solve_flat_pair, solve_golden, solve_identity_document, worker_count,
)


@pytest.fixture(scope="module")
def sl3_recipe():
    return builtin_recipe(CartanType('A', 2), 'L1-L3')


def test_right_leg_decomposition_of_a_generator(a2, a2_ideal, gens):
    """Delta(E1) = E1 (x) K1 + 1 (x) E1."""
    e1, _ = gens(a2)
    assert right_leg_decomposition(e1, a2_ideal) == {
        ((0, 0), (1,)): NCPoly.one(a2),
        ((1, 0), ()): e1,
    }


def test_lemma_on_commuting_generators():
    """E1 commutes with E3 and E4 in A4, hence with [E3,E4]_q."""
    rs = root_system(CartanType('A', 4))
    e1, e3, e4 = (NCPoly.generator(rs, i) for i in (1, 3, 4))
    assert check_lemma_astuce(e1, e3, e4, 0, 0, 1, ideal_for(rs)) == 'holds'


def test_lemma_reports_failed_hypothesis(a2, a2_ideal, gens):
    """E1 and E2 do not commute in A2."""
    e1, e2 = gens(a2)
    assert check_lemma_astuce(e1, e2, e2, 0, 0, 1, a2_ideal) == 'hypothesis-failed'


def test_sl3_recipe_is_a_left_coideal(sl3_recipe, a2_ideal):
    """Every left coefficient lies in the generated subalgebra."""
    report = check_left_coideal(sl3_recipe, a2_ideal)
    assert report.verdict == 'pass'
    assert [o.name for o in report.per_generator] == ['K', 'E1', 'X2', 'E2']


def test_sl3_recipe_is_flat(sl3_recipe, a2_ideal):
    """Every commutator closes up to (q-1) times products."""
    report = check_flatness(sl3_recipe, a2_ideal)
    assert report.verdict == 'pass'
    assert len(report.per_pair) == 6
    k_pairs = [p for p in report.per_pair if p.i == 'K']
    assert all(p.certificate.residual_check == 'pass' for p in k_pairs)


def test_coideal_check_refuses_degrees_above_the_limit(sl3_recipe, a2_ideal):
    """A recipe of degree 2 cannot be checked at degree 1."""
    with pytest.raises(DegreeOverflowError):
        check_left_coideal(sl3_recipe, a2_ideal, maxdeg=1)


def test_flat_pair_without_products_is_outside(a2, a2_ideal, gens):
    """[E1, E2] has no candidate terms when E1 is the only generator."""
    e1, e2 = gens(a2)
    assert solve_flat_pair(e1, e2, [('E1', e1)], a2_ideal).verdict == 'fail'


def test_flat_pair_needing_a_pole_is_inconclusive(a2, a2_ideal, gens):
    """E1E2 - E2E1 needs 1/(q-1) times (q-1)-scaled products."""
    e1, e2 = gens(a2)
    solution = solve_flat_pair(e1, e2, [('E1', e1), ('E2', e2)], a2_ideal)
    assert solution.verdict == 'inconclusive'


def test_full_verification_of_sl3():
    """Every stage passes; timings are dropped on request."""
    report = run_full_verification(CartanType('A', 2), 'L1-L3', timings=False)
    assert report.verdict == 'pass'
    assert report.timings is None
    assert report.classical.dim == 4
    assert all(check.in_span for check in report.classical_limit)


def test_full_verification_records_timings():
    """Each stage that ran has a wall-clock entry."""
    report = run_full_verification(CartanType('A', 2), 'L1-L3')
    assert {'admissibility', 'classical', 'recipe', 'limit', 'coideal', 'flatness'} <= set(report.timings)


def test_full_verification_of_a_g2_simple_root():
    """a2 in G2: E2 and K2."""
    rs = root_system(CartanType('G', 2))
    report = run_full_verification(rs.ctype, rs.root((0, 1)), timings=False)
    assert report.verdict == 'pass'


def test_inadmissible_root_fails_at_admissibility():
    """L1-L2 in C2 is short."""
    report = run_full_verification(CartanType('C', 2), 'L1-L2')
    assert report.verdict == 'fail'
    assert report.stage == 'admissibility'


def test_f4_is_skipped():
    """F4 roots that pass admissibility have no realisation."""
    rs = root_system(CartanType('F', 4))
    report = run_full_verification(rs.ctype, admissible_positive_roots(rs)[0])
    assert report.verdict == 'skipped'
    assert report.admissible


def test_low_degree_ceiling_skips_the_algebra_stages():
    """Recipes above the requested degree are reported as unverified."""
    report = run_full_verification(CartanType('A', 2), 'L1-L3', maxdeg=1)
    assert report.verdict == 'skipped'
    assert report.message == 'unverified at configured degree'
    assert report.coideal is None


@pytest.mark.slow
def test_mutated_bracket_breaks_the_coideal_property():
    """With [E1,E2] in place of [E1,E2]_q the term (q-1)E2 (x) K2 E1 is not in B."""
    document = serialize_recipe(builtin_recipe(CartanType('A', 3), 'L1-L4'))
    for generator in document['generators']:
        generator['expr'] = generator['expr'].replace('[E1,E2]_q', '[E1,E2]_0')
    recipe = parse_recipe(document)
    report = check_left_coideal(recipe, ideal_for(recipe.rs))
    assert report.verdict == 'fail'
    x2 = next(o for o in report.per_generator if o.name == 'X2')
    assert x2.verdict == 'fail'
    assert any(t.right_leg == 'K^(0,1,0) E1' and t.verdict == 'fail' for t in x2.terms)


def test_eiej_ekej_printed_coefficients_solve_the_identity():
    """The printed coefficients hold modulo E_iE_k - E_kE_i."""
    report = solve_golden('eiej-ekej')
    assert report.solvable
    assert report.published_in_solution_set is True


def test_ijkj_printed_coefficients_need_a_sign_change():
    """The printed quadruple is off by a global sign."""
    report = solve_golden('ijkj')
    assert report.solvable
    assert report.published_in_solution_set is False
    assert 'the negated printed coefficients lie in the solution set' in report.notes


def test_unknown_identity_is_unsupported():
    with pytest.raises(UnsupportedCaseError):
        golden_identity('nope')


def test_odd_orthogonal_cubic_relations(b3):
    """[A,[A,[A,B]_q^2]]_q^-2 is the Serre relation for A=E3, B=E2; with C=[E2,E1]_q^2 it lies in the ideal."""
    a, b = NCPoly.generator(b3, 3), NCPoly.generator(b3, 2)
    c = q_bracket(b, NCPoly.generator(b3, 1), 2)

    def cubic(x):
        return q_bracket(a, q_bracket(a, q_bracket(a, x, 2), 0), -2)

    assert cubic(b) == serre_relation(b3, 3, 2)
    assert ideal_for(b3).contains(cubic(c))
    assert not ideal_for(b3).contains(qpow(1) * c)


def test_lemma_on_a_nested_bracket(a3, a3_ideal, gens):
    """E1 q^-1-commutes with [E1,E2]_q and commutes with E3, hence q^-1-commutes with [[E1,E2]_q,E3]_q."""
    e1, e2, e3 = gens(a3)
    assert check_lemma_astuce(e1, q_bracket(e1, e2, 1), e3, -1, 0, 1, a3_ideal) == 'holds'
    assert check_lemma_astuce(e1, e1, e1, 0, 0, 0, a3_ideal) == 'holds'


def test_coideal_verdict_does_not_depend_on_the_word_order(sl3_recipe, a2_ideal):
    """deglex and revlex quotient bases give the same verdicts."""
    deglex = check_left_coideal(sl3_recipe, a2_ideal, order='deglex')
    revlex = check_left_coideal(sl3_recipe, a2_ideal, order='revlex')
    assert [o.verdict for o in deglex.per_generator] == [o.verdict for o in revlex.per_generator]


def test_template_documents_are_solved():
    """Ideal mode finds E1 times a Serre relation among the u*R*v products."""
    report = solve_identity_document({
        'type': 'A', 'rank': 2, 'ideal_mode': True,
        'target': ['E1', '[E2,[E2,E1]_q]_q^-1'],
    })
    assert report.solvable
    assert report.certificate.residual_check == 'pass'


def test_worker_count_respects_the_cap():
    """0 means one per core; everything is capped by WORKER_CAP."""
    with patch.object(settings, 'WORKER_CAP', 3):
        assert worker_count(10) == 3
        assert worker_count(1) == 1
        with patch('qcoiso.services.verify.os.cpu_count', return_value=2):
            assert worker_count(0) == 2


def test_threaded_checks_match_sequential_ones(sl3_recipe, a2_ideal):
    """Worker threads change timing only; reports are identical."""
    assert check_flatness(sl3_recipe, a2_ideal, workers=4) == check_flatness(sl3_recipe, a2_ideal)
    assert check_left_coideal(sl3_recipe, a2_ideal, workers=4) == check_left_coideal(sl3_recipe, a2_ideal)


def _lemma_instances(rs):
    """(A, B, C, pa, pb, pc) with A q^pa-commuting with B and q^pb-commuting with C."""
    e = {i: NCPoly.generator(rs, i) for i in range(1, rs.rank + 1)}
    out = []
    for i in e:
        far = [j for j in e if abs(j - i) >= 2]
        pool = [(e[i], 0)] + [(e[j], 0) for j in far]
        pool += [(q_bracket(e[j], e[k], 1), 0) for j in far for k in far if j != k]
        pool += [(q_bracket(e[i], e[j], 1), -1) for j in (i - 1, i + 1) if j in e]
        for b, pa in pool:
            for c, pb in pool:
                for pc in (-1, 0, 1):
                    out.append((e[i], b, c, pa, pb, pc))
    return out


def test_lemma_harness_on_commuting_families():
    """Fifty instances with satisfied hypotheses in A4 all satisfy the conclusion."""
    rs = root_system(CartanType('A', 4))
    ideal = ideal_for(rs)
    instances = _lemma_instances(rs)
    random.Random(5).shuffle(instances)
    chosen = instances[:50]
    assert len(chosen) == 50
    for a, b, c, pa, pb, pc in chosen:
        assert check_lemma_astuce(a, b, c, pa, pb, pc, ideal) == 'holds'


def test_coideal_certificates_re_expand(sl3_recipe, a2_ideal):
    """Every certificate attached to a passing left coefficient rechecks."""
    report = check_left_coideal(sl3_recipe, a2_ideal)
    certified = [t for o in report.per_generator for t in o.terms if t.certificate is not None]
    assert certified
    assert all(t.certificate.residual_check == 'pass' for t in certified)


def test_odd_orthogonal_table_is_compared_with_the_solver():
    """The sixteen-term table is checked against the solution set and reported with a B3 note."""
    report = solve_golden('so-odd-5term')
    assert report.name == 'so-odd-5term'
    assert report.published_in_solution_set is not None
    assert report.notes[0].startswith('with A=E3, B=E2, C=[E2,E1]_q^2 in U_q(B3)')
    if report.certificate is not None:
        assert report.certificate.residual_check == 'pass'


def test_g2_e2t_pair_is_flat():
    """[E2, T] in the G2 highest-root recipe closes up to (q-1) times products."""
    report = solve_golden('g2-e2t')
    assert report.solvable
    assert report.notes[0] == 'flatness verdict: pass'
    assert report.certificate.residual_check == 'pass'
