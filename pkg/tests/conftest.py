import pytest

from qcoiso.core.config import settings
from qcoiso.services.rootsys import CartanType, root_system
from qcoiso.services.uqalg import NCPoly, SerreIdeal
from qcoiso.services.verify import ideal_for


@pytest.fixture(autouse=True, scope="session")
def no_disk_basis_cache():
    """
    Keeps quotient bases in memory for the whole session.
    The on-disk cache is exercised explicitly in test_basis_cache.py with a tmp_path.
    """
    original = settings.BASIS_CACHE_PATH
    settings.BASIS_CACHE_PATH = None
    ideal_for.cache_clear()
    yield
    settings.BASIS_CACHE_PATH = original
    ideal_for.cache_clear()


@pytest.fixture(scope="session")
def a2():
    return root_system(CartanType('A', 2))


@pytest.fixture(scope="session")
def a3():
    return root_system(CartanType('A', 3))


@pytest.fixture(scope="session")
def b3():
    return root_system(CartanType('B', 3))


@pytest.fixture(scope="session")
def a2_ideal(a2):
    return SerreIdeal(a2)


@pytest.fixture(scope="session")
def a3_ideal(a3):
    return SerreIdeal(a3)


@pytest.fixture
def gens():
    """E_1..E_n of a root system as a tuple, 1-based through index arithmetic."""
    def make(rs):
        return tuple(NCPoly.generator(rs, i) for i in range(1, rs.rank + 1))
    return make
