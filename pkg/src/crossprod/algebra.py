"""Finite-dimensional C*-algebras M_{n1} + ... + M_{nm}.

An element is stored as one flat complex vector: the row-major entries of each
block, concatenated.  Linear maps on the algebra are then plain matrices acting
on that vector, which is how endomorphisms and transfer operators are encoded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class ShapeMismatch(ValueError):
    pass


class NotAnIdeal(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraShape:
    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ValueError(f"invalid block sizes {self.block_sizes!r}")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def commutative(cls, n: int) -> "AlgebraShape":
        """C(X) with |X| = n."""
        return cls((1,) * n)

    @property
    def m(self) -> int:
        return len(self.block_sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for n in self.block_sizes:
            out.append(out[-1] + n * n)
        return tuple(out)

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    def block_slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i + 1])

    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_sizes)

    def zeros(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.dim, dtype=complex))

    def unit(self) -> "AlgebraElement":
        return self.from_blocks([np.eye(n) for n in self.block_sizes])

    def from_blocks(self, blocks: Sequence) -> "AlgebraElement":
        if len(blocks) != self.m:
            raise ShapeMismatch(f"expected {self.m} blocks, got {len(blocks)}")
        parts = []
        for n, b in zip(self.block_sizes, blocks):
            b = np.asarray(b, dtype=complex)
            if b.ndim == 0 and n == 1:
                b = b.reshape(1, 1)
            if b.shape != (n, n):
                raise ShapeMismatch(f"block of shape {b.shape}, expected {(n, n)}")
            parts.append(b.ravel())
        return AlgebraElement(self, np.concatenate(parts))

    def from_vec(self, vec) -> "AlgebraElement":
        return AlgebraElement(self, vec)

    def diag(self, *values) -> "AlgebraElement":
        """Commutative shorthand: diag(l1, ..., lm) on shape (1, ..., 1)."""
        if not self.is_commutative():
            raise ShapeMismatch("diag() needs a commutative shape")
        return AlgebraElement(self, np.asarray(values, dtype=complex))

    def matrix_unit(self, block: int, i: int, j: int) -> "AlgebraElement":
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.offsets[block] + i * self.block_sizes[block] + j] = 1.0
        return AlgebraElement(self, vec)

    def basis(self) -> list["AlgebraElement"]:
        """Matrix units, in vector order."""
        return [AlgebraElement(self, np.eye(self.dim, dtype=complex)[i]) for i in range(self.dim)]

    def random(self, rng: np.random.Generator, scale: float = 1.0) -> "AlgebraElement":
        vec = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return AlgebraElement(self, scale * vec)

    def block_projection(self, mask: Sequence[bool]) -> "CentralProjection":
        return CentralProjection(self, tuple(bool(b) for b in mask))

    def left_mul_matrix(self, a: "AlgebraElement") -> np.ndarray:
        """Matrix of v -> a v on vectorized A."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, (n, blk) in enumerate(zip(self.block_sizes, a.blocks)):
            s = self.block_slice(i)
            out[s, s] = np.kron(blk, np.eye(n))
        return out

    def right_mul_matrix(self, a: "AlgebraElement") -> np.ndarray:
        """Matrix of v -> v a on vectorized A."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, (n, blk) in enumerate(zip(self.block_sizes, a.blocks)):
            s = self.block_slice(i)
            out[s, s] = np.kron(np.eye(n), blk.T)
        return out


class AlgebraElement:
    __slots__ = ("shape", "vec")

    def __init__(self, shape: AlgebraShape, vec):
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape[0] != shape.dim:
            raise ShapeMismatch(f"vector of length {vec.shape[0]} for dim {shape.dim}")
        self.shape = shape
        self.vec = vec

    @property
    def blocks(self) -> list[np.ndarray]:
        return [
            self.vec[self.shape.block_slice(i)].reshape(n, n)
            for i, n in enumerate(self.shape.block_sizes)
        ]

    def _same(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape.block_sizes} vs {other.shape.block_sizes}")

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(self.shape, self.vec + other.vec)

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(self.shape, self.vec - other.vec)

    def __neg__(self):
        return AlgebraElement(self.shape, -self.vec)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if isinstance(other, Number):
            return AlgebraElement(self.shape, self.vec * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(self.shape, self.vec * other)
        return NotImplemented

    def adjoint(self) -> "AlgebraElement":
        return adjoint(self)

    def norm(self) -> float:
        return op_norm(self)

    def allclose(self, other: "AlgebraElement", tol: float = DEFAULT_TOL) -> bool:
        self._same(other)
        return bool(np.max(np.abs(self.vec - other.vec), initial=0.0) <= tol)

    def __repr__(self) -> str:
        if self.shape.is_commutative():
            vals = ", ".join(f"{complex(v):.4g}" for v in self.vec)
            return f"AlgebraElement(diag({vals}))"
        return f"AlgebraElement({self.shape.block_sizes}, {[b.tolist() for b in self.blocks]})"


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._same(b)
    sh = a.shape
    if sh.is_commutative():
        return AlgebraElement(sh, a.vec * b.vec)
    out = np.empty(sh.dim, dtype=complex)
    for i, (x, y) in enumerate(zip(a.blocks, b.blocks)):
        out[sh.block_slice(i)] = (x @ y).ravel()
    return AlgebraElement(sh, out)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    sh = a.shape
    if sh.is_commutative():
        return AlgebraElement(sh, np.conj(a.vec))
    return sh.from_blocks([b.conj().T for b in a.blocks])


def lincomb(coeffs: Sequence[complex], elems: Sequence[AlgebraElement]) -> AlgebraElement:
    if len(coeffs) != len(elems) or not elems:
        raise ValueError("need equally many (and at least one) coefficients and elements")
    out = elems[0].shape.zeros()
    for c, e in zip(coeffs, elems):
        out = out + c * e
    return out


def op_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    best = 0.0
    for n, blk in zip(a.shape.block_sizes, a.blocks):
        v = abs(blk[0, 0]) if n == 1 else np.linalg.svd(blk, compute_uv=False)[0]
        best = max(best, float(v))
    return best


def is_self_adjoint(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    return op_norm(a - adjoint(a)) <= tol


def is_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    if not is_self_adjoint(a, tol):
        return False
    for blk in a.blocks:
        herm = (blk + blk.conj().T) / 2
        if np.linalg.eigvalsh(herm).min() < -tol:
            return False
    return True


def is_projection(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    return op_norm(mul(a, a) - a) <= tol and is_self_adjoint(a, tol)


def block_support(a: AlgebraElement, tol: float = DEFAULT_TOL) -> tuple[bool, ...]:
    """Which blocks carry a component of norm above tol."""
    return tuple(
        bool(np.max(np.abs(a.vec[a.shape.block_slice(i)]), initial=0.0) > tol)
        for i in range(a.shape.m)
    )


@dataclass(frozen=True)
class CentralProjection:
    """Identity on the masked blocks, zero elsewhere."""

    shape: AlgebraShape
    mask: tuple[bool, ...]

    def __post_init__(self):
        if len(self.mask) != self.shape.m:
            raise ShapeMismatch(f"mask of length {len(self.mask)} for {self.shape.m} blocks")

    @property
    def element(self) -> AlgebraElement:
        return self.shape.from_blocks(
            [np.eye(n) if on else np.zeros((n, n)) for n, on in zip(self.shape.block_sizes, self.mask)]
        )

    @property
    def indices(self) -> np.ndarray:
        """Vector coordinates spanned by the corner P A."""
        sh = self.shape
        idx = [np.arange(sh.offsets[i], sh.offsets[i + 1]) for i, on in enumerate(self.mask) if on]
        return np.concatenate(idx) if idx else np.zeros(0, dtype=int)

    @property
    def rank(self) -> int:
        """Dimension of the ideal P A."""
        return sum(n * n for n, on in zip(self.shape.block_sizes, self.mask) if on)

    def complement(self) -> "CentralProjection":
        return CentralProjection(self.shape, tuple(not b for b in self.mask))

    def __le__(self, other: "CentralProjection") -> bool:
        return all(o or not s for s, o in zip(self.mask, other.mask))

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        vec = np.zeros_like(a.vec)
        idx = self.indices
        vec[idx] = a.vec[idx]
        return AlgebraElement(a.shape, vec)

    def to_json(self) -> list[bool]:
        return list(self.mask)


def ideal_to_central_projection(
    S: Iterable[AlgebraElement],
    shape: AlgebraShape | None = None,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
) -> CentralProjection:
    """Central projection of the smallest two-sided ideal containing S.

    Each block is simple, so the ideal generated by S is the sum of the blocks
    that S touches.  With ``strict`` the span of S must already be that ideal.
    """
    S = list(S)
    if shape is None:
        if not S:
            raise ValueError("shape is required when S is empty")
        shape = S[0].shape
    mask = [False] * shape.m
    for s in S:
        if s.shape != shape:
            raise ShapeMismatch("elements of S have different shapes")
        mask = [m or t for m, t in zip(mask, block_support(s, tol))]
    proj = CentralProjection(shape, tuple(mask))
    if strict and S:
        mat = np.array([s.vec for s in S])
        sv = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(sv > tol))
        if rank != proj.rank:
            raise NotAnIdeal(f"span has dimension {rank}, block closure has {proj.rank}")
    return proj
