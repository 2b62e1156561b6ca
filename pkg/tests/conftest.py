import pytest

from mmopam.family import CanonicalParams, RhoSpec, compute_geometry


@pytest.fixture(scope="session")
def fixed_rho() -> RhoSpec:
    return RhoSpec("fixed_rational")


@pytest.fixture(scope="session")
def quad_rho() -> RhoSpec:
    return RhoSpec("quadratic", p=1.0, q=1.0)


@pytest.fixture(scope="session")
def geometry(fixed_rho):
    return compute_geometry(CanonicalParams(0.0, 0.0, 0.0, 0.0, fixed_rho))
