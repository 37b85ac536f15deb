"""Semigroup actions by *-endomorphisms and their complete transfer actions.

Everything here is linear algebra on vectorized A.  The transfer operator for
an element x of the cone is obtained by inverting alpha_x on the ideal P_x A,
where P_x is the central projection complementary to ker alpha_x:

    L_x(a) = alpha_x^{-1}(alpha_x(1) a alpha_x(1)).

Whether that inverse exists for every a is exactly the question of fine
representability, so the verdict routine runs the per-element conditions
(hereditary range, isomorphism on P_x A, projection compatibility) and then
re-validates the synthesized L against its defining identities.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    CentralProjection,
    NotAnIdeal,
    adjoint,
    ideal_to_central_projection,
    op_norm,
)
from .ogroup import GroupElement, GroupLike, as_group, require_positive
from .report import CheckReport


class NotMultiplicative(ValueError):
    def __init__(self, pair, residual):
        super().__init__(f"phi(ab) != phi(a)phi(b) on basis pair {pair}: residual {residual:.3e}")
        self.pair = pair
        self.residual = residual


class NotStarPreserving(ValueError):
    def __init__(self, index, residual):
        super().__init__(f"phi(a*) != phi(a)* on basis element {index}: residual {residual:.3e}")
        self.index = index
        self.residual = residual


class OracleInconsistent(ValueError):
    def __init__(self, x, y, residual):
        super().__init__(f"alpha_y o alpha_(x-y) != alpha_x for x={x!r}, y={y!r}: residual {residual:.3e}")
        self.x = x
        self.y = y
        self.residual = residual


class KernelNotIdeal(ValueError):
    """ker alpha_x is not a block-sum ideal; only happens through numerical degradation."""


class NotInvertibleOnCorner(ValueError):
    def __init__(self, x, residual):
        super().__init__(f"alpha_x(1) A alpha_x(1) is not inside alpha_x(A) at x={x!r}: residual {residual:.3e}")
        self.x = x
        self.residual = residual


class NotFinelyRepresentable(ValueError):
    pass


# ---------------------------------------------------------------------------
# linear maps


class LinearMap:
    """A linear map A -> A as a matrix on vectorized A."""

    def __init__(self, shape: AlgebraShape, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (shape.dim, shape.dim):
            raise ValueError(f"matrix of shape {matrix.shape} for dim {shape.dim}")
        self.shape = shape
        self.matrix = matrix

    @classmethod
    def identity(cls, shape: AlgebraShape):
        return cls(shape, np.eye(shape.dim, dtype=complex))

    @classmethod
    def zero(cls, shape: AlgebraShape):
        return cls(shape, np.zeros((shape.dim, shape.dim), dtype=complex))

    @classmethod
    def from_function(cls, shape: AlgebraShape, fn: Callable[[AlgebraElement], AlgebraElement]):
        cols = [fn(e).vec for e in shape.basis()]
        return cls(shape, np.array(cols).T)

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.shape, self.matrix @ a.vec)

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self o other."""
        return LinearMap(self.shape, self.matrix @ other.matrix)

    __matmul__ = compose

    def distance(self, other: "LinearMap") -> float:
        return float(np.max(np.abs(self.matrix - other.matrix), initial=0.0))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape.block_sizes})"


class Endomorphism(LinearMap):
    """A *-endomorphism; construct through validate_endomorphism."""

    def compose(self, other):
        out = super().compose(other)
        if isinstance(other, Endomorphism):
            return Endomorphism(self.shape, out.matrix)
        return out

    __matmul__ = compose

    @cached_property
    def unit_image(self) -> AlgebraElement:
        return self(self.shape.unit())


def _unit_product(shape: AlgebraShape, i: int, j: int) -> int | None:
    """Index of e_i e_j for matrix units i, j, or None when the product is zero."""
    bi = np.searchsorted(shape.offsets, i, side="right") - 1
    bj = np.searchsorted(shape.offsets, j, side="right") - 1
    if bi != bj:
        return None
    n = shape.block_sizes[bi]
    r1, c1 = divmod(i - shape.offsets[bi], n)
    r2, c2 = divmod(j - shape.offsets[bi], n)
    if c1 != r2:
        return None
    return shape.offsets[bi] + r1 * n + c2


def validate_endomorphism(matrix, shape: AlgebraShape, tol: float = DEFAULT_TOL) -> Endomorphism:
    """Check multiplicativity and *-preservation on all matrix units."""
    phi = Endomorphism(shape, matrix)
    basis = shape.basis()
    images = [phi(e) for e in basis]
    adj_index = []
    for i in range(shape.dim):
        star = adjoint(basis[i])
        adj_index.append(int(np.argmax(np.abs(star.vec))))
    for i in range(shape.dim):
        r = op_norm(phi(basis[adj_index[i]]) - adjoint(images[i]))
        if r > tol:
            raise NotStarPreserving(i, r)
    for i in range(shape.dim):
        for j in range(shape.dim):
            k = _unit_product(shape, i, j)
            target = images[k] if k is not None else shape.zeros()
            r = op_norm(images[i] * images[j] - target)
            if r > tol:
                raise NotMultiplicative((i, j), r)
    return phi


# ---------------------------------------------------------------------------
# the action


class EndoAction:
    """alpha: cone -> End(A).

    For k = 1 the action is generated by alpha_1 and alpha_x is its x-th power.
    For k >= 2 the lexicographic cone is not finitely generated, so alpha is a
    caller-supplied oracle; every value it returns is validated and
    cross-checked for homomorphy against the values already memoized.
    """

    def __init__(self, shape: AlgebraShape, k: int = 1, *, generator: Endomorphism | None = None,
                 oracle: Callable[[GroupElement], object] | None = None, tol: float = DEFAULT_TOL):
        if (generator is None) == (oracle is None):
            raise ValueError("pass exactly one of generator / oracle")
        if generator is not None and k != 1:
            raise ValueError("a single generator only describes k = 1 actions")
        self.shape = shape
        self.k = k
        self.tol = tol
        self._oracle = oracle
        self._memo: dict[GroupElement, Endomorphism] = {GroupElement.zero(k): Endomorphism.identity(shape)}
        self._lock = threading.RLock()
        if generator is not None:
            if not isinstance(generator, Endomorphism):
                generator = validate_endomorphism(generator.matrix, shape, tol)
            self._memo[GroupElement((1,))] = generator

    @classmethod
    def from_generator(cls, generator, shape: AlgebraShape | None = None, tol: float = DEFAULT_TOL):
        if not isinstance(generator, LinearMap):
            if shape is None:
                raise ValueError("shape is required for a raw matrix")
            generator = validate_endomorphism(generator, shape, tol)
        return cls(generator.shape, 1, generator=generator, tol=tol)

    @classmethod
    def from_oracle(cls, shape: AlgebraShape, k: int, oracle, tol: float = DEFAULT_TOL):
        return cls(shape, k, oracle=oracle, tol=tol)

    @property
    def generators(self) -> list[GroupElement]:
        return [GroupElement.unit(self.k, i) for i in range(self.k)]

    def __call__(self, x: GroupLike) -> Endomorphism:
        return self.act(x)

    def act(self, x: GroupLike) -> Endomorphism:
        x = as_group(x, self.k)
        require_positive(x)
        with self._lock:
            hit = self._memo.get(x)
            if hit is not None:
                return hit
            if self._oracle is None:
                return self._power(x.coords[0])
            return self._from_oracle(x)

    def _power(self, n: int) -> Endomorphism:
        gen = self._memo[GroupElement((1,))]
        start = max(c.coords[0] for c in self._memo if c.coords[0] <= n)
        cur = self._memo[GroupElement((start,))]
        for m in range(start + 1, n + 1):
            cur = gen @ cur
            self._memo[GroupElement((m,))] = cur
        return cur

    def _from_oracle(self, x: GroupElement) -> Endomorphism:
        value = self._oracle(x)
        matrix = value.matrix if isinstance(value, LinearMap) else value
        phi = validate_endomorphism(matrix, self.shape, self.tol)
        for y, alpha_y in list(self._memo.items()):
            if y.is_zero() or not (y < x):
                continue
            alpha_z = self._memo.get(x - y)
            if alpha_z is None:
                continue
            r = (alpha_y @ alpha_z).distance(phi)
            if r > self.tol:
                raise OracleInconsistent(x, y, r)
        self._memo[x] = phi
        return phi

    def unit_projection(self, x: GroupLike) -> AlgebraElement:
        return self.act(x).unit_image


def product_action(shape: AlgebraShape, generators: Sequence, tol: float = DEFAULT_TOL) -> EndoAction:
    """Action of Z^k (lex) by alpha_g = beta_1^g1 o ... o beta_k^gk.

    The beta_j must commute and beta_2..beta_k must be automorphisms, since
    lex-positive elements may carry negative trailing coordinates.
    """
    betas = [g if isinstance(g, Endomorphism) else validate_endomorphism(
        g.matrix if isinstance(g, LinearMap) else g, shape, tol) for g in generators]
    k = len(betas)
    if k < 1:
        raise ValueError("need at least one generator")
    for i in range(k):
        for j in range(i + 1, k):
            r = (betas[i] @ betas[j]).distance(betas[j] @ betas[i])
            if r > tol:
                raise ValueError(f"generators {i} and {j} do not commute (residual {r:.3e})")
    inverses = [None]
    for j in range(1, k):
        m = betas[j].matrix
        if np.linalg.matrix_rank(m, tol=tol) < shape.dim:
            raise ValueError(f"generator {j} must be an automorphism")
        inverses.append(np.linalg.inv(m))

    powers: dict[tuple[int, int], np.ndarray] = {}

    def power(j: int, e: int) -> np.ndarray:
        key = (j, e)
        if key not in powers:
            base = betas[j].matrix if e >= 0 else inverses[j]
            powers[key] = np.linalg.matrix_power(base, abs(e))
        return powers[key]

    def oracle(g: GroupElement) -> np.ndarray:
        out = np.eye(shape.dim, dtype=complex)
        for j, e in enumerate(g.coords):
            out = out @ power(j, e)
        return out

    if k == 1:
        return EndoAction.from_generator(betas[0], tol=tol)
    return EndoAction.from_oracle(shape, k, oracle, tol)


# ---------------------------------------------------------------------------
# per-element conditions


def act(action: EndoAction, x: GroupLike) -> Endomorphism:
    return action.act(x)


def unit_projection(action: EndoAction, x: GroupLike) -> AlgebraElement:
    return action.unit_projection(x)


def _svd_rank(mat: np.ndarray, tol: float) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    u, s, vh = np.linalg.svd(mat)
    return int(np.sum(s > tol)), u, s, vh


def kernel_projection(action: EndoAction, x: GroupLike, tol: float | None = None) -> CentralProjection:
    """P_x: the central projection complementary to ker alpha_x."""
    tol = action.tol if tol is None else tol
    shape = action.shape
    m = action.act(x).matrix
    rank, _, _, vh = _svd_rank(m, tol)
    null = [AlgebraElement(shape, v.conj()) for v in vh[rank:]]
    try:
        ker = ideal_to_central_projection(null, shape, tol=tol, strict=True)
    except NotAnIdeal as exc:
        raise KernelNotIdeal(f"ker alpha_x at x={x!r}: {exc}") from exc
    return ker.complement()


def corner_matrix(p: AlgebraElement) -> np.ndarray:
    """Matrix of a -> p a p."""
    sh = p.shape
    return sh.left_mul_matrix(p) @ sh.right_mul_matrix(p)


def _range_residual(a: np.ndarray, b: np.ndarray, tol: float) -> float:
    """How far the columns of a stick out of range(b)."""
    if a.size == 0:
        return 0.0
    rank, u, _, _ = _svd_rank(b, tol)
    q = u[:, :rank]
    return float(np.max(np.abs(a - q @ (q.conj().T @ a)), initial=0.0))


@dataclass(frozen=True)
class HereditaryResult:
    x: GroupElement
    rank_image: int
    rank_corner: int
    residual: float
    passed: bool


def hereditary_details(action: EndoAction, x: GroupLike, tol: float | None = None) -> HereditaryResult:
    tol = action.tol if tol is None else tol
    x = as_group(x, action.k)
    m = action.act(x).matrix
    c = corner_matrix(action.unit_projection(x))
    ri = _svd_rank(m, tol)[0]
    rc = _svd_rank(c, tol)[0]
    res = max(_range_residual(m, c, tol), _range_residual(c, m, tol))
    return HereditaryResult(x, ri, rc, res, ri == rc and res <= tol)


def hereditary_check(action: EndoAction, x: GroupLike, tol: float | None = None) -> bool:
    """alpha_x(A) == alpha_x(1) A alpha_x(1), compared as subspaces of vectorized A."""
    return hereditary_details(action, x, tol).passed


def isomorphism_residual(action: EndoAction, x: GroupLike, P: CentralProjection,
                         rng: np.random.Generator, samples: int = 4, tol: float | None = None) -> float:
    """alpha_x on P_x A: rank defect plus the worst isometry defect on samples."""
    tol = action.tol if tol is None else tol
    alpha = action.act(x)
    idx = P.indices
    rank = _svd_rank(alpha.matrix[:, idx], tol)[0] if idx.size else 0
    if rank != P.rank:
        return float(P.rank - rank)
    worst = 0.0
    for _ in range(samples):
        a = P.apply(action.shape.random(rng))
        na = op_norm(a)
        worst = max(worst, abs(op_norm(alpha(a)) - na) / max(1.0, na))
    return worst


def projection_compatibility_check(action: EndoAction, projections, pairs: Iterable,
                                   tol: float | None = None, rng: np.random.Generator | None = None,
                                   include_isomorphism: bool = True) -> CheckReport:
    """Residuals of alpha_x(P_{x+y}) = alpha_x(1) P_y (and optionally the isomorphism check)."""
    tol = action.tol if tol is None else tol
    P = projections if callable(projections) else projections.__getitem__
    report = CheckReport("projection_compatibility", tol)
    seen = set()
    for x, y in pairs:
        x, y = as_group(x, action.k), as_group(y, action.k)
        lhs = action.act(x)(P(x + y).element)
        rhs = action.unit_projection(x) * P(y).element
        report.add(f"(x,y)=({_fmt(x)},{_fmt(y)})", op_norm(lhs - rhs))
        seen.add(x)
    if include_isomorphism:
        rng = rng if rng is not None else np.random.default_rng(0)
        iso = CheckReport("isomorphism", tol)
        for x in sorted(seen):
            iso.add(f"x={_fmt(x)}", isomorphism_residual(action, x, P(x), rng, tol=tol))
        report.residuals.extend(iso.residuals)
        report.notes.append("includes isometry of alpha_x on P_x A")
    return report


def synthesize_transfer(action: EndoAction, x: GroupLike, tol: float | None = None,
                        projection: CentralProjection | None = None) -> LinearMap:
    """L_x(a) = alpha_x^{-1}(alpha_x(1) a alpha_x(1)), solved on the ideal P_x A."""
    tol = action.tol if tol is None else tol
    x = as_group(x, action.k)
    shape = action.shape
    P = kernel_projection(action, x, tol) if projection is None else projection
    idx = P.indices
    target = corner_matrix(action.unit_projection(x))
    out = np.zeros((shape.dim, shape.dim), dtype=complex)
    if idx.size == 0:
        r = float(np.max(np.abs(target), initial=0.0))
        if r > tol:
            raise NotInvertibleOnCorner(x, r)
        return LinearMap(shape, out)
    m = action.act(x).matrix[:, idx]
    # normal equations: m has orthogonal columns up to multiplicities, so this is well conditioned
    gram = m.conj().T @ m
    sol = np.linalg.solve(gram, m.conj().T @ target)
    r = float(np.max(np.abs(m @ sol - target), initial=0.0))
    if r > tol:
        raise NotInvertibleOnCorner(x, r)
    out[idx, :] = sol
    return LinearMap(shape, out)


class TransferAction:
    """Memoized L_x and P_x for a system that passed the verdict checks."""

    def __init__(self, action: EndoAction, tol: float | None = None):
        self.action = action
        self.tol = action.tol if tol is None else tol
        self._L: dict[GroupElement, LinearMap] = {}
        self._P: dict[GroupElement, CentralProjection] = {}
        self._lock = threading.RLock()

    def projection(self, x: GroupLike) -> CentralProjection:
        x = as_group(x, self.action.k)
        with self._lock:
            if x not in self._P:
                self._P[x] = kernel_projection(self.action, x, self.tol)
            return self._P[x]

    def L(self, x: GroupLike) -> LinearMap:
        x = as_group(x, self.action.k)
        with self._lock:
            if x not in self._L:
                self._L[x] = synthesize_transfer(self.action, x, self.tol, self.projection(x))
            return self._L[x]

    __call__ = L

    def expectation(self, x: GroupLike) -> LinearMap:
        """alpha_x o L_x, the conditional expectation onto alpha_x(A)."""
        return self.action.act(x) @ self.L(x)


# ---------------------------------------------------------------------------
# verdict


@dataclass(frozen=True)
class SampleSpec:
    seed: int = 0
    count: int = 64
    max_coord: int = 8


def sample_cone(k: int, rng: np.random.Generator, count: int, max_coord: int = 8) -> list[GroupElement]:
    """Cone elements with coordinates in [-max_coord, max_coord]; [0, max_coord] when k = 1."""
    out = []
    for _ in range(count):
        if k == 1:
            out.append(GroupElement((int(rng.integers(0, max_coord + 1)),)))
            continue
        g = GroupElement(tuple(int(c) for c in rng.integers(-max_coord, max_coord + 1, size=k)))
        out.append(g if g.is_positive() else -g)
    return out


@dataclass(frozen=True)
class Witness:
    check: str
    where: str
    residual: float

    def __str__(self) -> str:
        return f"{self.check} fails at {self.where}"


@dataclass
class Verdict:
    representable: bool
    witness: Witness | None = None
    reports: list[CheckReport] = field(default_factory=list)

    def __str__(self) -> str:
        if self.representable:
            return "FinelyRepresentable"
        return f"NotFinelyRepresentable({self.witness})"


@dataclass
class DynamicalSystem:
    action: EndoAction
    transfer: TransferAction | None
    verdict: Verdict
    name: str = ""

    @property
    def shape(self) -> AlgebraShape:
        return self.action.shape

    @property
    def k(self) -> int:
        return self.action.k

    @property
    def tol(self) -> float:
        return self.action.tol

    @property
    def representable(self) -> bool:
        return self.verdict.representable

    def require_representable(self) -> TransferAction:
        if self.transfer is None:
            raise NotFinelyRepresentable(f"system {self.name or '?'}: {self.verdict}")
        return self.transfer

    def alpha(self, x: GroupLike) -> Endomorphism:
        return self.action.act(x)

    def unit(self, x: GroupLike) -> AlgebraElement:
        """alpha_x(1)."""
        return self.action.unit_projection(x)

    def L(self, x: GroupLike) -> LinearMap:
        return self.require_representable().L(x)

    def P(self, x: GroupLike) -> CentralProjection:
        return self.require_representable().projection(x)


def _fmt(g: GroupElement) -> str:
    return str(g.coords[0]) if g.k == 1 else str(g.coords)


def _first_failure(reports: Sequence[CheckReport]) -> Witness | None:
    for rep in reports:
        for r in rep.residuals:
            if not r.passed:
                return Witness(rep.name, r.where, r.value)
    return None


def validate_transfer(action: EndoAction, transfer: TransferAction, xs: Sequence[GroupElement],
                      pairs: Sequence[tuple[GroupElement, GroupElement]], rng: np.random.Generator,
                      count: int, tol: float | None = None) -> list[CheckReport]:
    """Residuals of every identity a complete, non-degenerate transfer action satisfies."""
    tol = action.tol if tol is None else tol
    shape = action.shape
    one = shape.unit()
    names = ["transfer_identity", "transfer_identity_right", "projection_reduction", "completeness",
             "nondegenerate_i", "nondegenerate_ii", "nondegenerate_iii", "unit_is_projection",
             "range_is_ideal", "positivity", "contractivity", "composition", "monotonicity"]
    reps = {n: CheckReport(n, tol) for n in names}
    range_memo: dict[GroupElement, float] = {}
    pair_memo: dict[tuple[GroupElement, GroupElement], tuple[float, float]] = {}
    for i in range(count):
        x = xs[i % len(xs)]
        y = pairs[i % len(pairs)][1]
        a, b = shape.random(rng), shape.random(rng)
        al, L, p = action.act(x), transfer.L(x), action.unit_projection(x)
        w = f"x={_fmt(x)}"
        reps["transfer_identity"].add(w, op_norm(L(al(a) * b) - a * L(b)))
        reps["transfer_identity_right"].add(w, op_norm(L(b * al(a)) - L(b) * a))
        reps["projection_reduction"].add(w, max(op_norm(L(a) - L(p * a)), op_norm(L(a) - L(a * p))))
        reps["completeness"].add(w, op_norm(al(L(a)) - p * a * p))
        E = al @ L
        ea = E(a)
        reps["nondegenerate_i"].add(w, max(op_norm(E(ea) - ea), op_norm(E(al(a)) - al(a)),
                                           op_norm(E(al(a) * b) - al(a) * E(b))))
        reps["nondegenerate_ii"].add(w, op_norm(al(L(al(a))) - al(a)))
        reps["nondegenerate_iii"].add(w, op_norm(al(L(one)) - p))
        reps["unit_is_projection"].add(w, op_norm(L(one) - transfer.projection(x).element))
        # L_x(A) = L_x(1) A; depends on x only
        if x not in range_memo:
            lm = shape.left_mul_matrix(L(one))
            range_memo[x] = _range_residual(L.matrix, lm, tol) + _range_residual(lm, L.matrix, tol)
        reps["range_is_ideal"].add(w, range_memo[x])
        img = L(adjoint(a) * a)
        neg = max(0.0, -min(np.linalg.eigvalsh((blk + blk.conj().T) / 2).min() for blk in img.blocks))
        reps["positivity"].add(w, neg + op_norm(img - adjoint(img)))
        reps["contractivity"].add(w, max(0.0, op_norm(L(a)) - op_norm(a)))
        wy = f"(x,y)=({_fmt(x)},{_fmt(y)})"
        if (x, y) not in pair_memo:
            lo, hi = (x, y) if x <= y else (y, x)
            pl, ph = action.unit_projection(lo), action.unit_projection(hi)
            mono = op_norm(pl * ph - ph)
            if not transfer.projection(hi) <= transfer.projection(lo):
                mono = max(mono, 1.0)
            pair_memo[x, y] = ((transfer.L(y) @ L).distance(transfer.L(x + y)), mono)
        comp, mono = pair_memo[x, y]
        reps["composition"].add(wy, comp)
        reps["monotonicity"].add(wy, mono)
    return [reps[n] for n in names]


def fine_representability_verdict(action: EndoAction, sample_spec: SampleSpec | None = None,
                                   name: str = "") -> DynamicalSystem:
    """Run the projection criterion and, if it holds, synthesize and re-validate L."""
    spec = sample_spec or SampleSpec()
    tol = action.tol
    rng = np.random.default_rng(spec.seed)
    k = action.k
    zero = GroupElement.zero(k)
    gens = action.generators
    xs = sorted({zero, *gens, *sample_cone(k, rng, spec.count, spec.max_coord)})
    ys = sample_cone(k, rng, spec.count, spec.max_coord)
    pairs = [(g, h) for g in gens for h in gens]
    pairs += list(zip(sample_cone(k, rng, spec.count, spec.max_coord), ys))

    def fail(reports):
        return DynamicalSystem(action, None, Verdict(False, _first_failure(reports), reports), name)

    reports: list[CheckReport] = []
    her = CheckReport("hereditary", tol)
    for x in xs:
        d = hereditary_details(action, x, tol)
        her.add(f"x={_fmt(x)}", d.residual if d.rank_image == d.rank_corner
                else float(abs(d.rank_corner - d.rank_image)))
    reports.append(her)

    kern = CheckReport("kernel_ideal", tol)
    P: dict[GroupElement, CentralProjection] = {}
    needed = sorted(set(xs) | {x + y for x, y in pairs} | {y for _, y in pairs})
    for x in needed:
        try:
            P[x] = kernel_projection(action, x, tol)
            kern.add(f"x={_fmt(x)}", 0.0)
        except KernelNotIdeal:
            kern.add(f"x={_fmt(x)}", float("inf"))
    reports.append(kern)
    if not her.passed or not kern.passed:
        return fail(reports)

    iso = CheckReport("isomorphism", tol)
    for x in xs:
        iso.add(f"x={_fmt(x)}", isomorphism_residual(action, x, P[x], rng, tol=tol))
    reports.append(iso)
    reports.append(projection_compatibility_check(action, P, pairs, tol, include_isomorphism=False))
    if not all(r.passed for r in reports):
        return fail(reports)

    transfer = TransferAction(action, tol)
    transfer._P.update(P)
    synth = CheckReport("synthesis", tol)
    for x in needed:
        try:
            transfer.L(x)
            synth.add(f"x={_fmt(x)}", 0.0)
        except NotInvertibleOnCorner as exc:
            synth.add(f"x={_fmt(x)}", exc.residual)
    reports.append(synth)
    if not synth.passed:
        return fail(reports)

    reports.extend(validate_transfer(action, transfer, xs, pairs, rng, spec.count, tol))
    if not all(r.passed for r in reports):
        return fail(reports)
    return DynamicalSystem(action, transfer, Verdict(True, None, reports), name)
