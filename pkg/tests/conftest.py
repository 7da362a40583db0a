"""Global fixtures for twisted_moments tests."""
# Fixtures that are defined in conftest.py are available across all tests. The
# expensive ones (modular symbol spaces, eigendata) are session scoped so every
# level is built once per run.
import pytest

from twisted_moments.eigendata import (
    NewformEigendata,
    eta_product_eigendata,
    newform_eigendata,
)
from twisted_moments.modular_symbols import ModularSymbolSpace, build_space


@pytest.fixture(name="space_11", scope="session")
def space_11_fixture() -> ModularSymbolSpace:
    """Return the plus space of level 11."""
    return build_space(11)


@pytest.fixture(name="forms_11", scope="session")
def forms_11_fixture(space_11: ModularSymbolSpace) -> list[NewformEigendata]:
    """Return the single newform of level 11 (curve 11a)."""
    return newform_eigendata(space_11, 300)


@pytest.fixture(name="forms_23", scope="session")
def forms_23_fixture() -> list[NewformEigendata]:
    """Return the two Galois conjugate newforms of level 23."""
    return newform_eigendata(build_space(23), 400)


@pytest.fixture(name="eta_3", scope="session")
def eta_3_fixture() -> NewformEigendata:
    """Return eta(z)^6 eta(3z)^6, weight 6 level 3."""
    return eta_product_eigendata(3, 400)


@pytest.fixture(name="eta_5", scope="session")
def eta_5_fixture() -> NewformEigendata:
    """Return eta(z)^4 eta(5z)^4, weight 4 level 5."""
    return eta_product_eigendata(5, 400)


@pytest.fixture(name="eta_2", scope="session")
def eta_2_fixture() -> NewformEigendata:
    """Return eta(z)^8 eta(2z)^8, weight 8 level 2."""
    return eta_product_eigendata(2, 400)
