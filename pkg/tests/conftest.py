from __future__ import annotations

import numpy as np
import pytest

from crossprod.action import LinearMap
from crossprod.algebra import AlgebraShape
from crossprod.fixtures import load_fixture, smx_generator
from crossprod.serialize import load_system, matrix_to_json

REPRESENTABLE = ["S2", "SAut", "SMx"]
ALL_FIXTURES = ["S2", "SAut", "SNeg", "SMx"]


def _matrix(shape: AlgebraShape, fn) -> list:
    return matrix_to_json(LinearMap.from_function(shape, fn).matrix)


def chain_description() -> dict:
    """M2 + M2 + C with alpha(m1, m2, l) = (m2, l e11, 0)."""
    shape = AlgebraShape((2, 2, 1))

    def fn(a):
        m1, m2, lam = a.blocks
        return shape.from_blocks([m2, np.diag([lam[0, 0], 0]), np.zeros((1, 1))])

    return {"name": "chain", "shape": [2, 2, 1], "group_dim": 1, "generators": [_matrix(shape, fn)]}


def shift3_description() -> dict:
    """C^3 with alpha(l0, l1, l2) = (l1, l2, 0)."""
    return {"name": "shift3", "commutative_map": [1, 2, None]}


def product2_description(phi: float = 0.7) -> dict:
    """Z^2 acting on M2 + C by beta (the SMx generator) and gamma = Ad(diag(1, e^{i phi})) + id."""
    shape = AlgebraShape((2, 1))
    d = np.diag([1.0, np.exp(1j * phi)])

    def gamma(a):
        m, lam = a.blocks
        return shape.from_blocks([d @ m @ d.conj().T, lam])

    return {"name": "product2", "shape": [2, 1], "group_dim": 2,
            "generators": [matrix_to_json(smx_generator().matrix), _matrix(shape, gamma)]}


@pytest.fixture(scope="session")
def systems():
    return {name: load_fixture(name) for name in ALL_FIXTURES}


@pytest.fixture(scope="session")
def chain():
    return load_system(chain_description())


@pytest.fixture(scope="session")
def shift3():
    return load_system(shift3_description())


@pytest.fixture(scope="session")
def product2():
    return load_system(product2_description())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LOG = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one line per acceptance criterion; printed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_LOG, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LOG, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
