"""Built-in dynamical systems used by the tests, the CLI and the docs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .action import (
    DynamicalSystem,
    EndoAction,
    LinearMap,
    SampleSpec,
    fine_representability_verdict,
    validate_endomorphism,
)
from .algebra import DEFAULT_TOL, AlgebraShape


def commutative_endomorphism(point_map: Sequence[int | None], tol: float = DEFAULT_TOL):
    """*-endomorphism of C(X), X = {0..n-1}: alpha(a)(i) = a(point_map[i]), or 0 where None."""
    n = len(point_map)
    shape = AlgebraShape.commutative(n)
    m = np.zeros((n, n), dtype=complex)
    for i, j in enumerate(point_map):
        if j is not None:
            if not 0 <= j < n:
                raise ValueError(f"point {j} outside X")
            m[i, j] = 1.0
    return validate_endomorphism(m, shape, tol)


def _m2c_endomorphism(fn, tol=DEFAULT_TOL):
    shape = AlgebraShape((2, 1))
    return validate_endomorphism(LinearMap.from_function(shape, fn).matrix, shape, tol)


def s2_generator():
    return commutative_endomorphism([1, None])


def saut_generator():
    return commutative_endomorphism([1, 0])


def sneg_generator():
    # (m, l) -> (l I, l)
    return _m2c_endomorphism(
        lambda a: a.shape.from_blocks([a.blocks[1][0, 0] * np.eye(2), a.blocks[1]])
    )


def smx_generator():
    # (m, l) -> (l e11, 0)
    return _m2c_endomorphism(
        lambda a: a.shape.from_blocks([np.diag([a.blocks[1][0, 0], 0]), np.zeros((1, 1))])
    )


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    expected_representable: bool
    notes: str
    generator: Callable

    def action(self, tol: float = DEFAULT_TOL) -> EndoAction:
        return EndoAction.from_generator(self.generator(), tol=tol)

    def build(self, sample_spec: SampleSpec | None = None, tol: float = DEFAULT_TOL) -> DynamicalSystem:
        return fine_representability_verdict(self.action(tol), sample_spec, name=self.name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "expected_verdict": "FinelyRepresentable" if self.expected_representable
            else "NotFinelyRepresentable",
            "notes": self.notes,
        }


FIXTURES: dict[str, Fixture] = {
    f.name: f
    for f in [
        Fixture("S2", "A = C^2, alpha_1(l1, l2) = (l2, 0)", True,
                "alpha_1(1) = (1,0); alpha_x = 0 for x >= 2; P_1 = (0,1); L_1(a1, a2) = (0, a1)",
                s2_generator),
        Fixture("SAut", "A = C^2, alpha_1 = coordinate swap", True,
                "automorphism: L_x = alpha_x^-1, P_x = 1", saut_generator),
        Fixture("SNeg", "A = M_2 + C, alpha_1(m, l) = (l I_2, l)", False,
                "alpha_1(A) is one-dimensional but alpha_1(1) A alpha_1(1) = A: hereditary fails at x=1",
                sneg_generator),
        Fixture("SMx", "A = M_2 + C, alpha_1(m, l) = (l e11, 0)", True,
                "alpha_1(1) = (e11, 0); P_1 = (0,1); L_1(m, l) = (0, m11)", smx_generator),
    ]
}


def list_fixtures() -> list[dict]:
    return [f.to_json() for f in FIXTURES.values()]


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


_SYSTEM_CACHE: dict[tuple, DynamicalSystem] = {}


def load_fixture(name: str, sample_spec: SampleSpec | None = None, tol: float = DEFAULT_TOL) -> DynamicalSystem:
    """Build (and cache) the verdict-checked system for a named fixture."""
    key = (name, sample_spec or SampleSpec(), tol)
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = get_fixture(name).build(sample_spec, tol)
    return _SYSTEM_CACHE[key]
