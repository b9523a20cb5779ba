import pytest

import divchain as dc


@pytest.fixture(scope="session")
def table_1e4():
    return dc.build_sieve(10**4)


@pytest.fixture(scope="session")
def table_1e5():
    return dc.build_sieve(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return dc.build_sieve(10**6)


@pytest.fixture(scope="session")
def prime_table_1e8():
    return dc.build_prime_table(10**8)
