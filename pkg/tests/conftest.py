"""Shared fixtures: expensive key setups built once per session."""

import random

import pytest

from ibbekit import ibbe


def identities(n, tag="user"):
    return [f"{tag}{i:05d}".encode() for i in range(n)]


@pytest.fixture(scope="session")
def env8():
    """(msk, pk) with capacity 8; enough for most unit tests."""
    return ibbe.setup(8, rng=random.Random(0x5EED08))


@pytest.fixture(scope="session")
def env64():
    """(msk, pk) with capacity 64; shared by group and complexity tests."""
    return ibbe.setup(64, rng=random.Random(0x5EED64))


@pytest.fixture()
def rng():
    """Fresh deterministic RNG per test."""
    return random.Random(0xC0FFEE)
