import random

import pytest

from qcoiso.core.exceptions import AlgebraMismatchError, DegreeOverflowError
from qcoiso.services.qfield import ONE, q_integer, qpow, rf
from qcoiso.services.rootsys import CartanType, root_system
from qcoiso.services.uqalg import (
    GeneratorProducts, NCPoly, SerreIdeal, ShuffleEmbedding, TensorElem, coproduct, counit, iterated_coproduct,
    q_bracket, serre_relation,
)


SMALL_TYPES = [('A', 1), ('A', 2), ('B', 2), ('G', 2), ('A', 3), ('C', 3), ('A', 4), ('D', 4)]


def _random_poly(rs, rng: random.Random, max_len: int = 3) -> NCPoly:
    out = NCPoly(rs)
    for _ in range(3):
        word = tuple(rng.randint(1, rs.rank) for _ in range(rng.randint(0, max_len)))
        kexp = tuple(rng.randint(0, 1) for _ in range(rs.rank))
        out = out + rng.randint(-2, 2) * qpow(rng.randint(-1, 1)) * NCPoly.word(rs, word, kexp)
    return out


def test_group_like_commutation(a2, gens):
    """K_1 E_1 = q^2 E_1 K_1 and K_1 E_2 = q^-1 E_2 K_1 in A2."""
    e1, e2 = gens(a2)
    k1 = NCPoly.k_monomial(a2, (1, 0))
    assert k1 * e1 == qpow(2) * (e1 * k1)
    assert k1 * e2 == qpow(-1) * (e2 * k1)


def test_multiplication_is_associative():
    """Products of random normal-ordered elements of degree at most 4 associate, in rank up to 4."""
    rng = random.Random(7)
    systems = [root_system(CartanType(s, n)) for s, n in SMALL_TYPES]
    for _ in range(200):
        rs = rng.choice(systems)
        a, b, c = (_random_poly(rs, rng, 4) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_mixing_algebras_is_rejected(a2, a3):
    """Elements of different algebras do not combine."""
    with pytest.raises(AlgebraMismatchError):
        NCPoly.generator(a2, 1) + NCPoly.generator(a3, 1)
    with pytest.raises(AlgebraMismatchError):
        NCPoly.generator(a2, 3)


def test_q_bracket(a2, gens):
    """[a, b]_{q^p} = ab - q^p ba."""
    e1, e2 = gens(a2)
    assert q_bracket(e1, e2, 1) == e1 * e2 - qpow(1) * (e2 * e1)
    assert q_bracket(e1, e2, 0) == e1 * e2 - e2 * e1


def test_serre_relation_a2(a2, gens):
    """E2^2 E1 - [2] E2 E1 E2 + E1 E2^2."""
    e1, e2 = gens(a2)
    expected = e2 * e2 * e1 - q_integer(2) * (e2 * e1 * e2) + e1 * e2 * e2
    assert serre_relation(a2, 2, 1) == expected


def test_coproduct_of_generators(a2, gens):
    """Delta(E_i) = E_i (x) K_i + 1 (x) E_i; the counit kills E_i."""
    e1, _ = gens(a2)
    k1 = NCPoly.k_monomial(a2, (1, 0))
    expected = TensorElem.pure(e1, k1) + TensorElem.pure(NCPoly.one(a2), e1)
    assert coproduct(e1) == expected
    assert counit(e1) == 0
    assert counit(k1 + 3 * e1) == ONE


def test_coproduct_is_multiplicative(a3):
    """Delta(xy) = Delta(x) Delta(y) on random elements."""
    rng = random.Random(11)
    for _ in range(100):
        x, y = _random_poly(a3, rng, 2), _random_poly(a3, rng, 2)
        assert coproduct(x * y) == coproduct(x) * coproduct(y)


def test_coproduct_is_coassociative():
    """(Delta (x) id) Delta = (id (x) Delta) Delta on random elements in rank up to 4."""
    rng = random.Random(13)
    systems = [root_system(CartanType(s, n)) for s, n in SMALL_TYPES]
    for _ in range(100):
        x = _random_poly(rng.choice(systems), rng, 3)
        assert iterated_coproduct(x, 'left') == iterated_coproduct(x, 'right')


def test_serre_relations_lie_in_the_ideal(a2_ideal, a2, gens):
    """Membership goes through the shuffle embedding."""
    e1, e2 = gens(a2)
    assert a2_ideal.contains(serre_relation(a2, 1, 2))
    assert a2_ideal.contains(e1 * serre_relation(a2, 2, 1) * e2)
    assert not a2_ideal.contains(e1 * e2)
    assert not a2_ideal.contains(e1 * e2 - e2 * e1)


def test_ideal_certificate_rechecks(a2_ideal, a2, gens):
    """The explicit u*R*v certificate re-expands to the target."""
    e1, _ = gens(a2)
    x = serre_relation(a2, 1, 2) * e1
    cert = a2_ideal.ideal_membership(x)
    assert cert is not None
    assert cert.residual() == NCPoly(a2)
    assert a2_ideal.ideal_membership(e1) is None


@pytest.mark.parametrize("series,rank,dims", [
    ('A', 1, [1, 1, 1, 1, 1]),
    ('A', 2, [2, 4, 6, 9, 12]),
    ('B', 2, [2, 4, 7, 11, 16]),
    ('A', 3, [3, 8, 17, 33, 58]),
])
def test_quotient_dimensions_match_pbw_counts(series, rank, dims):
    """Dimensions of U_q(n+) by degree agree with counts of PBW monomials."""
    ideal = SerreIdeal(root_system(CartanType(series, rank)))
    assert [len(ideal.quotient_basis(d)) for d in range(1, 6)] == dims


def test_quotient_basis_respects_max_degree(a2_ideal):
    """Degrees above the configured ceiling are refused."""
    with pytest.raises(DegreeOverflowError):
        a2_ideal.quotient_basis(99)


def test_quotient_coordinates_reduce_modulo_serre(a2_ideal, a2):
    """In deglex order E2 E1 E1 is rewritten on the smaller words."""
    assert a2_ideal.quotient_basis_for_weight((2, 1)) == [(1, 1, 2), (1, 2, 1)]
    coords = a2_ideal.quotient_coordinates((2, 1, 1))
    assert coords == {(1, 1, 2): -ONE, (1, 2, 1): q_integer(2)}


def test_good_words_of_a2():
    """Good words of weight a1+a2 are 12 and 21."""
    embedding = ShuffleEmbedding(root_system(CartanType('A', 2)))
    assert embedding.good_words((1, 1)) == [(1, 2), (2, 1)]


def test_solve_identity_reports_coefficients(a2_ideal, a2):
    """A scalar multiple of a template is solved with that scalar."""
    r = serre_relation(a2, 2, 1)
    cert = a2_ideal.solve_identity(qpow(2) * r, [('R', r)])
    assert cert is not None
    assert cert.coefficient_of('R') == qpow(2)
    assert cert.recheck()


def test_subspace_membership(a2_ideal, a2, gens):
    """E1 E1 is generated by E1; E2 is not."""
    e1, e2 = gens(a2)
    cert = a2_ideal.subspace_membership(e1 * e1, [('E1', e1)])
    assert cert is not None
    assert cert.coefficient_of('E1*E1') == ONE
    assert a2_ideal.subspace_membership(e2, [('E1', e1)]) is None


def test_generator_products(a2, gens):
    """Ordered products carry their factor count; K powers prefix them."""
    e1, e2 = gens(a2)
    products = GeneratorProducts(a2, [('K', NCPoly.k_monomial(a2, (1, 1))), ('E1', e1), ('E2', e2)])
    labels = {(label, count) for label, _, count in products.e_products((1, 1))}
    assert labels == {('E1*E2', 2), ('E2*E1', 2)}
    assert products.k_prefix((2, 2))[0] == 'K^2'
    assert products.k_prefix((1, 0)) is None


def test_ideal_templates_have_distinct_labels(a2_ideal):
    """E1 R12 and R12 E1 are different templates of weight (3, 1)."""
    labels = [label for label, _ in a2_ideal.templates((3, 1))]
    assert len(labels) == len(set(labels))
    assert {'E1|R12|1', '1|R12|E1'} <= set(labels)


def test_ideal_certificates_with_empty_sides_recheck(a2_ideal, a2, gens):
    """Certificates for u*R and R*v re-expand exactly to their targets."""
    e1, e2 = gens(a2)
    for x in (serre_relation(a2, 1, 2) * e1, e1 * serre_relation(a2, 1, 2),
              e2 * serre_relation(a2, 2, 1) + qpow(1) * (serre_relation(a2, 2, 1) * e2)):
        cert = a2_ideal.ideal_membership(x)
        assert cert is not None
        assert cert.recheck()


def test_subspace_membership_stops_at_the_degree_limit(a2_ideal, gens, a2):
    """Components above maxdeg are not searched."""
    e1, _ = gens(a2)
    assert a2_ideal.subspace_membership(e1 * e1, [('E1', e1)], maxdeg=1) is None
