"""Shared fixtures: small IC_n sets, the catalog, and well-known maps."""

import pytest

from icn.closure import brute_force_icn
from icn.core import PartialInjection, from_pairs
from icn.generators import generator_catalog


@pytest.fixture(scope="session")
def icn2() -> set[PartialInjection]:
    return brute_force_icn(2)


@pytest.fixture(scope="session")
def icn4() -> set[PartialInjection]:
    return brute_force_icn(4)


@pytest.fixture(scope="session")
def icn6() -> set[PartialInjection]:
    return brute_force_icn(6)


@pytest.fixture(scope="session")
def icn8() -> set[PartialInjection]:
    return brute_force_icn(8)


@pytest.fixture
def order_preserving_non_member() -> PartialInjection:
    """Order-preserving on the 6-crown but its inverse is not."""
    return PartialInjection(6, (1, 0, 3, 4, 0, 2))


@pytest.fixture
def two_block_map() -> PartialInjection:
    """Dom = {1} u {3, 4, 5}; the second block is reversed onto {3, 4, 5}."""
    return from_pairs({1: 1, 3: 5, 4: 4, 5: 3}, 6)


@pytest.fixture(scope="session")
def catalog8():
    return generator_catalog(8)
