import pytest

from netgen import bundled


@pytest.fixture(scope="session")
def two_relay():
    return bundled("two-relay")


@pytest.fixture(scope="session")
def bottleneck():
    return bundled("shared-bottleneck")


@pytest.fixture(scope="session")
def disjoint():
    return bundled("disjoint-sessions")


@pytest.fixture(scope="session")
def diamond():
    return bundled("diamond")


@pytest.fixture(scope="session")
def crossed():
    return bundled("crossed-bottlenecks")
