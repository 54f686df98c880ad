import pytest

from qcoiso.core.exceptions import RootSystemError, UnsupportedCaseError
from qcoiso.services.rootsys import CartanType, admissible_positive_roots, is_admissible, root_string, root_system


def _admissible_labels(series: str, rank: int) -> set[str]:
    rs = root_system(CartanType(series, rank))
    return {rs.ambient_label(b) for b in admissible_positive_roots(rs)}


def test_cartan_type_parse_and_validation():
    """Type strings are case-insensitive; impossible ranks are rejected."""
    assert CartanType.parse('b3') == CartanType('B', 3)
    assert CartanType.parse('E_6') == CartanType('E', 6)
    with pytest.raises(RootSystemError):
        CartanType('E', 5)
    with pytest.raises(RootSystemError):
        CartanType.parse('Q2')


@pytest.mark.parametrize("series,rank,count", [
    ('A', 1, 1), ('A', 3, 6), ('B', 3, 9), ('C', 3, 9), ('D', 4, 12), ('G', 2, 6), ('F', 4, 24), ('E', 6, 36),
])
def test_positive_root_counts(series, rank, count):
    """Closure under simple reflections finds every positive root."""
    assert len(root_system(CartanType(series, rank)).positive_roots) == count


@pytest.mark.parametrize("series,rank", [('A', 2), ('A', 5), ('D', 4), ('D', 5)])
def test_simply_laced_roots_are_all_admissible(series, rank):
    """In A_n and D_n every positive root is admissible."""
    rs = root_system(CartanType(series, rank))
    assert len(admissible_positive_roots(rs)) == len(rs.positive_roots)


def test_symplectic_admissible_roots_are_the_long_ones():
    """C_n: exactly the roots 2L_i."""
    assert _admissible_labels('C', 3) == {'2L1', '2L2', '2L3'}
    assert _admissible_labels('C', 2) == {'2L1', '2L2'}


def test_odd_orthogonal_admissible_roots():
    """B_n: exactly the roots L_i +- L_j."""
    assert _admissible_labels('B', 3) == {'L1-L2', 'L1-L3', 'L2-L3', 'L1+L2', 'L1+L3', 'L2+L3'}


def test_g2_admissible_roots_are_the_long_ones():
    """G2: the three long positive roots."""
    rs = root_system(CartanType('G', 2))
    assert {b.label() for b in admissible_positive_roots(rs)} == {'a2', '3a1+a2', '3a1+2a2'}


def test_f4_admissibility_follows_root_strings():
    """F4 under the root-string criterion: the twelve long positive roots."""
    rs = root_system(CartanType('F', 4))
    admissible = admissible_positive_roots(rs)
    assert len(admissible) == 12
    assert all(rs.is_long(b) for b in admissible)


def test_root_string_of_a2():
    """The alpha1-string through alpha2 in A2 is {0, 1}."""
    rs = root_system(CartanType('A', 2))
    a1, a2 = rs.simple_roots
    assert root_string(rs, a2, a1) == [0, 1]
    assert is_admissible(rs, rs.root((1, 1)))


def test_parse_root_literals():
    """Ambient and simple-root literals name the same roots."""
    a3 = root_system(CartanType('A', 3))
    assert a3.parse_root('L1-L4').simple_decomp == (1, 1, 1)
    assert a3.parse_root('a1+a2+a3') == a3.parse_root('L1-L4')
    g2 = root_system(CartanType('G', 2))
    assert g2.parse_root('3a1+2a2').simple_decomp == (3, 2)
    with pytest.raises(RootSystemError):
        a3.parse_root('L1+L9')
    with pytest.raises(RootSystemError):
        a3.parse_root('hello')
    with pytest.raises(UnsupportedCaseError):
        g2.parse_root('L1-L2')


def test_coroot_coefficients():
    """K exponents of the coroot: h1+h2+h3 for 2L1 in C3, h1+2h2+h3 for L1+L2 in B3."""
    c3 = root_system(CartanType('C', 3))
    assert c3.coroot_coefficients(c3.parse_root('2L1')) == (1, 1, 1)
    b3 = root_system(CartanType('B', 3))
    assert b3.coroot_coefficients(b3.parse_root('L1+L2')) == (1, 2, 1)
    g2 = root_system(CartanType('G', 2))
    assert g2.coroot_coefficients(g2.root((3, 2))) == (1, 2)


def test_d3_has_the_roots_of_a3():
    """D3 = A3: twelve roots, all positive ones admissible; D2 is rejected."""
    d3 = root_system(CartanType('D', 3))
    assert len(d3.roots) == 12
    assert len(admissible_positive_roots(d3)) == 6
    assert sorted(d3.cartan_matrix[i][j] for i in range(3) for j in range(3) if i != j) == [-1, -1, -1, -1, 0, 0]
    with pytest.raises(RootSystemError):
        CartanType('D', 2)


def test_root_string_of_a_root_through_itself():
    """alpha - 2alpha and alpha + 0alpha are roots; alpha + alpha is not."""
    for series, rank in (('A', 2), ('C', 2), ('G', 2)):
        rs = root_system(CartanType(series, rank))
        for alpha in rs.positive_roots:
            assert sorted(root_string(rs, alpha, alpha)) == [-2, 0]
