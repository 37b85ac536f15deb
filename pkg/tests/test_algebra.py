from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossprod.algebra import (
    AlgebraShape,
    CentralProjection,
    NotAnIdeal,
    ShapeMismatch,
    adjoint,
    ideal_to_central_projection,
    is_positive,
    is_projection,
    lincomb,
    mul,
    op_norm,
)

SHAPES = [AlgebraShape((1,)), AlgebraShape((2,)), AlgebraShape((1, 1)), AlgebraShape((2, 1)), AlgebraShape((3, 2, 1))]
shapes = st.sampled_from(SHAPES)
seeds = st.integers(0, 2**32 - 1)


def span_closure_ideal(S, shape):
    """Oracle: dimension of the two-sided ideal generated by S, by closing span(S)
    under left and right multiplication by matrix units until the rank stabilizes."""
    basis = shape.basis()

    def orth(vs):
        if not vs:
            return []
        u, s, _ = np.linalg.svd(np.array(vs).T, full_matrices=False)
        return [u[:, i] for i in range(int(np.sum(s > 1e-10)))]

    vecs = orth([s.vec for s in S])
    while True:
        grown = list(vecs)
        for v in vecs:
            a = shape.from_vec(v)
            for e in basis:
                grown += [(e * a).vec, (a * e).vec]
        grown = orth(grown)
        if len(grown) == len(vecs):
            return len(vecs)
        vecs = grown


def test_basic_examples():
    sh = AlgebraShape((1, 1))
    a = sh.diag(1j, 0)
    assert adjoint(a).allclose(sh.diag(-1j, 0))
    assert mul(sh.unit(), a).allclose(a)
    m2 = AlgebraShape((2,))
    assert mul(m2.matrix_unit(0, 0, 0), m2.matrix_unit(0, 0, 1)).allclose(m2.matrix_unit(0, 0, 1))


def test_norm_examples():
    for sh in SHAPES:
        assert op_norm(sh.unit()) == pytest.approx(1.0)
    assert op_norm(AlgebraShape((1, 1)).diag(3, -4)) == pytest.approx(4.0)
    m2 = AlgebraShape((2,))
    e12 = 2 * m2.matrix_unit(0, 0, 1)
    assert op_norm(e12) == pytest.approx(np.linalg.svd(e12.blocks[0], compute_uv=False).max())
    assert op_norm(e12) == pytest.approx(2.0)


def test_projection_examples(rng):
    sh = AlgebraShape((1, 1))
    assert is_projection(sh.diag(1, 0))
    assert not is_projection(sh.diag(1, 0.5))
    a = AlgebraShape((2, 1)).random(rng)
    assert is_positive(adjoint(a) * a)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        mul(AlgebraShape((2,)).unit(), AlgebraShape((1, 1)).unit())


def test_ideal_examples():
    sh = AlgebraShape((1, 1))
    assert ideal_to_central_projection([sh.diag(0, 1)]).mask == (False, True)
    sh = AlgebraShape((2, 1))
    e12 = sh.matrix_unit(0, 0, 1)
    proj = ideal_to_central_projection([e12])
    assert proj.mask == (True, False)
    assert span_closure_ideal([e12], sh) == proj.rank == 4
    assert ideal_to_central_projection([], sh).mask == (False, False)


def test_ideal_strict_mode():
    sh = AlgebraShape((2, 1))
    with pytest.raises(NotAnIdeal):
        ideal_to_central_projection([sh.matrix_unit(0, 0, 1)], strict=True)
    full = [e for e in sh.basis() if np.any(e.blocks[0])]
    assert ideal_to_central_projection(full, strict=True).mask == (True, False)


@settings(max_examples=50)
@given(shapes, seeds)
def test_ideal_matches_span_closure(sh, seed):
    rng = np.random.default_rng(seed)
    S = [sh.random(rng) * sh.block_projection([bool(rng.integers(2)) for _ in range(sh.m)]).element
         for _ in range(2)]
    S = [s for s in S if op_norm(s) > 0]
    proj = ideal_to_central_projection(S, sh)
    assert proj.rank == (span_closure_ideal(S, sh) if S else 0)


@settings(max_examples=50)
@given(shapes, seeds)
def test_star_algebra_axioms(sh, seed):
    rng = np.random.default_rng(seed)
    a, b, c = sh.random(rng), sh.random(rng), sh.random(rng)
    assert (adjoint(adjoint(a))).allclose(a)
    assert adjoint(a * b).allclose(adjoint(b) * adjoint(a))
    assert ((a * b) * c).allclose(a * (b * c))
    assert lincomb([2, 1j], [a, b]).allclose(2 * a + 1j * b)
    assert op_norm(a * b) <= op_norm(a) * op_norm(b) + 1e-9
    n = op_norm(a)
    assert abs(op_norm(adjoint(a) * a) - n**2) <= 1e-9 * n**2


@settings(max_examples=50)
@given(shapes, seeds)
def test_vectorized_multiplication_matrices(sh, seed):
    rng = np.random.default_rng(seed)
    a, b = sh.random(rng), sh.random(rng)
    assert np.allclose(sh.left_mul_matrix(a) @ b.vec, (a * b).vec)
    assert np.allclose(sh.right_mul_matrix(b) @ a.vec, (a * b).vec)


@settings(max_examples=30)
@given(shapes, seeds)
def test_central_projections_commute(sh, seed):
    rng = np.random.default_rng(seed)
    mask = tuple(bool(rng.integers(2)) for _ in range(sh.m))
    p = CentralProjection(sh, mask).element
    a = sh.random(rng)
    assert np.array_equal((p * a).vec, (a * p).vec)
    assert is_projection(p)
