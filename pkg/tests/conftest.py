import pytest

from conicsphere.radial import football_profile, sphere_profile


@pytest.fixture(scope="session")
def sphere():
    return sphere_profile()


@pytest.fixture(scope="session")
def football_half():
    return football_profile(-0.5)


@pytest.fixture(scope="session")
def football_mild():
    return football_profile(-0.2)
