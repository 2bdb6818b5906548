from functools import lru_cache

import pytest

from spinbath import ChainSpec, chain_modes


@lru_cache(maxsize=8)
def _modes(n_ions: int):
    return chain_modes(ChainSpec(n_ions=n_ions))


@pytest.fixture(scope="session")
def spectrum50():
    return _modes(50)


@pytest.fixture(scope="session")
def modes_of():
    return _modes
