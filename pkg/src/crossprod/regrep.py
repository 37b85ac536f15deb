"""The regular representation on a truncated window of degrees.

For each degree g the space H_g is A modulo the null space of the form

    <v, u>_0 = f(u* v),   <v, u>_x = f(L_x(u* v)),   <v, u>_{-x} = f(u* alpha_x(1) v),

and operators are assembled blockwise in orthonormal coordinates of these
quotients.  Truncation to a finite window W makes U_x lose the part that
leaves W, so every identity is compared only on vectors supported at
distance >= margin from the boundary of W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .action import DynamicalSystem, SampleSpec
from .algebra import AlgebraElement, AlgebraShape, adjoint, op_norm
from .l1x import L1Element, mul, random_element, star
from .ogroup import GroupElement, GroupLike, as_group, box, require_positive
from .report import CheckReport


class GramNotPSD(ValueError):
    pass


class EmptyWindow(ValueError):
    pass


class MarginTooSmall(ValueError):
    pass


class SupportExceedsWindow(ValueError):
    pass


def _trace_vector(rho: AlgebraElement) -> np.ndarray:
    """c with f(w) = c . w_vec for f(w) = tr(rho w)."""
    return np.concatenate([blk.T.ravel() for blk in rho.blocks])


@dataclass(frozen=True)
class StateFunctional:
    """f(a) = sum over blocks of tr(rho_i a_i)."""

    density: AlgebraElement

    def __post_init__(self):
        rho = self.density
        if op_norm(rho - adjoint(rho)) > 1e-12:
            raise ValueError("density must be self-adjoint")
        for blk in rho.blocks:
            if np.linalg.eigvalsh((blk + blk.conj().T) / 2).min() < -1e-12:
                raise ValueError("density must be positive")
        tr = sum(np.trace(b).real for b in rho.blocks)
        if abs(tr - 1.0) > 1e-9:
            raise ValueError(f"density must have trace 1, got {tr}")

    @classmethod
    def trace(cls, shape: AlgebraShape) -> "StateFunctional":
        """Normalized trace: faithful, weight n_i / sum n_j on block i."""
        total = sum(shape.block_sizes)
        return cls(shape.from_blocks([np.eye(n) / total for n in shape.block_sizes]))

    @property
    def shape(self) -> AlgebraShape:
        return self.density.shape

    @property
    def faithful(self) -> bool:
        return all(np.linalg.eigvalsh(b).min() > 1e-12 for b in self.density.blocks)

    def __call__(self, a: AlgebraElement) -> complex:
        return complex(_trace_vector(self.density) @ a.vec)


def inner(system: DynamicalSystem, f: StateFunctional, g: GroupLike,
          v: AlgebraElement, w: AlgebraElement) -> complex:
    """<v, w>_g; linear in v, conjugate-linear in w."""
    g = as_group(g, system.k)
    if g.is_zero():
        return f(adjoint(w) * v)
    if g.is_positive():
        return f(system.L(g)(adjoint(w) * v))
    return f(adjoint(w) * system.unit(-g) * v)


def gram_matrix(system: DynamicalSystem, f: StateFunctional, g: GroupLike) -> np.ndarray:
    """G[i, j] = <e_j, e_i>_g over the matrix-unit basis, so <v, w>_g = w^H G v."""
    g = as_group(g, system.k)
    shape = system.shape
    if g.is_zero():
        functional, middle = _trace_vector(f.density), None
    elif g.is_positive():
        functional, middle = system.L(g).matrix.T @ _trace_vector(f.density), None
    else:
        functional, middle = _trace_vector(f.density), system.unit(-g)
    basis = shape.basis()
    n = shape.dim
    G = np.zeros((n, n), dtype=complex)
    for i, ei in enumerate(basis):
        left = adjoint(ei) if middle is None else adjoint(ei) * middle
        for j, ej in enumerate(basis):
            G[i, j] = functional @ (left * ej).vec
    return G


@dataclass(frozen=True)
class DegreeSpace:
    """Orthonormal coordinates on H_g: coords = Q v, lift = R c (so Q R = I)."""

    g: GroupElement
    Q: np.ndarray
    R: np.ndarray
    null: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.Q.shape[0]


def gns_space(system: DynamicalSystem, f: StateFunctional, g: GroupLike, rank_tol: float = 1e-10,
              scale: float | None = None) -> DegreeSpace:
    """Whitened basis of H_g.  Eigenvalues below rank_tol * scale are discarded,
    where scale defaults to the largest eigenvalue of the degree-0 Gram matrix."""
    g = as_group(g, system.k)
    G = gram_matrix(system, f, g)
    G = (G + G.conj().T) / 2
    lam, V = np.linalg.eigh(G)
    if scale is None:
        scale = float(np.linalg.eigvalsh(gram_matrix(system, f, GroupElement.zero(system.k))).max())
    cut = rank_tol * max(scale, np.finfo(float).tiny)
    if lam.min(initial=0.0) < -cut:
        raise GramNotPSD(f"Gram matrix at {g!r} has eigenvalue {lam.min():.3e}")
    keep = lam > cut
    lk, Vk = lam[keep], V[:, keep]
    Q = np.sqrt(lk)[:, None] * Vk.conj().T
    R = Vk / np.sqrt(lk)[None, :]
    return DegreeSpace(g, Q, R, V[:, ~keep], lam)


def radius_of(xs: Iterable[GroupElement]) -> int:
    return max((x.radius() for x in xs), default=0)


class TruncatedRep:
    """(pi, U) of the regular representation restricted to the box of radius N."""

    def __init__(self, system: DynamicalSystem, states: Sequence[StateFunctional], N: int,
                 generators: Sequence[GroupElement], rank_tol: float = 1e-10, margin: int | None = None):
        system.require_representable()
        if N < 0 or not states:
            raise EmptyWindow("need N >= 0 and at least one state")
        self.system = system
        self.states = list(states)
        self.N = N
        self.generators = [as_group(x, system.k) for x in generators]
        for x in self.generators:
            require_positive(x)
        self.margin = min(N, 2 * radius_of(self.generators)) if margin is None else margin
        self.degrees = box(system.k, N)
        self._degree_set = set(self.degrees)
        self.spaces: list[dict[GroupElement, DegreeSpace]] = []
        self.slices: dict[tuple[int, GroupElement], slice] = {}
        pos = 0
        for s, f in enumerate(self.states):
            scale = float(np.linalg.eigvalsh(gram_matrix(system, f, GroupElement.zero(system.k))).max())
            spaces = {}
            for g in self.degrees:
                sp = gns_space(system, f, g, rank_tol, scale)
                spaces[g] = sp
                self.slices[(s, g)] = slice(pos, pos + sp.dim)
                pos += sp.dim
            self.spaces.append(spaces)
        self.dim = pos
        self._U: dict[GroupElement, np.ndarray] = {}
        self._Us: dict[GroupElement, np.ndarray] = {}
        self.well_defined_residual = 0.0
        for x in self.generators:
            self.U(x)
            self.U_star(x)

    @property
    def shape(self) -> AlgebraShape:
        return self.system.shape

    def dims(self, state: int = 0) -> dict[GroupElement, int]:
        return {g: sp.dim for g, sp in self.spaces[state].items()}

    # assembly -------------------------------------------------------------

    def _assemble(self, shift: GroupElement | None, op_for: Callable[[GroupElement], np.ndarray]) -> np.ndarray:
        """Operator mapping degree g - shift into degree g with A-level matrix op_for(g)."""
        M = np.zeros((self.dim, self.dim), dtype=complex)
        for s, spaces in enumerate(self.spaces):
            for g in self.degrees:
                h = g if shift is None else g - shift
                if h not in self._degree_set:
                    continue
                tgt, src = spaces[g], spaces[h]
                if tgt.dim == 0 or src.dim == 0:
                    continue
                op = op_for(g)
                M[self.slices[(s, g)], self.slices[(s, h)]] = tgt.Q @ op @ src.R
                if src.null.size:
                    leak = float(np.max(np.abs(tgt.Q @ op @ src.null)))
                    self.well_defined_residual = max(self.well_defined_residual, leak)
        return M

    def pi(self, a: AlgebraElement) -> np.ndarray:
        sys = self.system
        lm = self.shape.left_mul_matrix
        return self._assemble(None, lambda g: lm(a) if g.is_positive() else lm(sys.alpha(-g)(a)))

    def U(self, x: GroupLike) -> np.ndarray:
        x = as_group(x, self.system.k)
        require_positive(x)
        if x not in self._U:
            sys = self.system
            lm = self.shape.left_mul_matrix
            zero = GroupElement.zero(sys.k)

            def op(g):
                if x <= g:
                    return sys.alpha(x).matrix
                if zero <= g:
                    return lm(sys.unit(x)) @ sys.alpha(g).matrix
                return lm(sys.unit(x - g))

            self._U[x] = self._assemble(x, op)
        return self._U[x]

    def U_star(self, x: GroupLike) -> np.ndarray:
        x = as_group(x, self.system.k)
        require_positive(x)
        if x not in self._Us:
            sys = self.system
            lm = self.shape.left_mul_matrix
            zero = GroupElement.zero(sys.k)

            def op(g):
                if zero <= g:
                    return sys.L(x).matrix
                if -x <= g:
                    return sys.L(g + x).matrix
                return lm(sys.unit(-g))

            self._Us[x] = self._assemble(-x, op)
        return self._Us[x]

    # truncation -----------------------------------------------------------

    def interior(self, margin: int) -> np.ndarray:
        """Coordinates of degrees at distance >= margin from the window boundary."""
        if margin < 0 or margin > self.N:
            raise MarginTooSmall(f"margin {margin} does not fit in window {self.N}")
        idx = [np.arange(self.slices[(s, g)].start, self.slices[(s, g)].stop)
               for s in range(len(self.states)) for g in self.degrees if g.radius() <= self.N - margin]
        return np.concatenate(idx) if idx else np.zeros(0, dtype=int)

    def interior_norm(self, M: np.ndarray, margin: int) -> float:
        cols = self.interior(margin)
        if cols.size == 0:
            return 0.0
        return float(np.linalg.norm(M[:, cols], 2))

    def interior_residual(self, M1: np.ndarray, M2: np.ndarray, margin: int) -> float:
        return self.interior_norm(M1 - M2, margin)


def build_regrep(system: DynamicalSystem, f: StateFunctional | Sequence[StateFunctional] | None = None,
                 window: int = 12, generators: Sequence[GroupLike] = (1,), rank_tol: float = 1e-10,
                 margin: int | None = None) -> TruncatedRep:
    if f is None:
        states = [StateFunctional.trace(system.shape)]
    elif isinstance(f, StateFunctional):
        states = [f]
    else:
        states = list(f)
    gens = [as_group(x, system.k) for x in generators]
    return TruncatedRep(system, states, window, gens, rank_tol, margin)


def pi_times_u(rep: TruncatedRep, a: L1Element) -> np.ndarray:
    """sum_x U_x* pi(a_{-x}) + pi(a_0) + sum_x pi(a_x) U_x."""
    if a.radius() > rep.N:
        raise SupportExceedsWindow(f"support radius {a.radius()} exceeds window {rep.N}")
    M = np.zeros((rep.dim, rep.dim), dtype=complex)
    for g, c in a.coeffs.items():
        if g.is_zero():
            M += rep.pi(c)
        elif g.is_positive():
            M += rep.pi(c) @ rep.U(g)
        else:
            M += rep.U_star(-g) @ rep.pi(c)
    return M


def _check_margin(rep: TruncatedRep, margin: int | None, needed: int) -> int:
    margin = rep.margin if margin is None else margin
    if margin < needed:
        raise MarginTooSmall(f"margin {margin} < required {needed}")
    if margin > rep.N:
        raise MarginTooSmall(f"margin {margin} exceeds window {rep.N}")
    return margin


def _samples(samples) -> SampleSpec:
    if samples is None:
        return SampleSpec(count=8)
    if isinstance(samples, SampleSpec):
        return samples
    if isinstance(samples, int):
        return SampleSpec(count=samples)
    seed, count = samples
    return SampleSpec(seed=seed, count=count)


def covariance_check(rep: TruncatedRep, samples=None, margin: int | None = None,
                     tol: float | None = None) -> list[CheckReport]:
    """Covariance relations, semigroup law, commutation and pi-homomorphism on interior vectors."""
    sys = rep.system
    tol = sys.tol if tol is None else tol
    margin = _check_margin(rep, margin, radius_of(rep.generators))
    spec = _samples(samples)
    rng = np.random.default_rng(spec.seed)
    names = ["covariance_alpha", "covariance_transfer", "commutation", "semigroup",
             "pi_homomorphism", "pi_star", "pi_unit", "well_defined"]
    reps = {n: CheckReport(n, tol) for n in names}
    shape = rep.shape
    reps["pi_unit"].add("pi(1)", float(np.max(np.abs(rep.pi(shape.unit()) - np.eye(rep.dim)), initial=0.0)))
    for _ in range(spec.count):
        a, b = shape.random(rng), shape.random(rng)
        pa = rep.pi(a)
        reps["pi_homomorphism"].add("sample", float(np.linalg.norm(rep.pi(a * b) - pa @ rep.pi(b), 2)))
        reps["pi_star"].add("sample", float(np.linalg.norm(rep.pi(adjoint(a)) - pa.conj().T, 2)))
        for x in rep.generators:
            w = f"x={x.coords}"
            Ux, Uxs = rep.U(x), rep.U_star(x)
            reps["covariance_alpha"].add(w, rep.interior_residual(Ux @ pa @ Uxs, rep.pi(sys.alpha(x)(a)), margin))
            reps["covariance_transfer"].add(w, rep.interior_residual(Uxs @ pa @ Ux, rep.pi(sys.L(x)(a)), margin))
            reps["commutation"].add(w, rep.interior_residual(Ux @ pa, rep.pi(sys.alpha(x)(a)) @ Ux, margin))
    for x in rep.generators:
        for y in rep.generators:
            if (x + y).radius() > margin:
                reps["semigroup"].notes.append(f"skipped x={x.coords}, y={y.coords}: beyond margin")
                continue
            reps["semigroup"].add(f"(x,y)=({x.coords},{y.coords})",
                                  rep.interior_residual(rep.U(y) @ rep.U(x), rep.U(x + y), margin))
    reps["well_defined"].add("quotient", rep.well_defined_residual)
    return [reps[n] for n in names]


def adjointness_check(rep: TruncatedRep, samples=None, margin: int | None = None,
                      tol: float | None = None) -> list[CheckReport]:
    """U_x* is the Hilbert adjoint of U_x, and the three Gram-level identities behind it."""
    sys = rep.system
    tol = sys.tol if tol is None else tol
    margin = _check_margin(rep, margin, radius_of(rep.generators))
    spec = _samples(samples)
    rng = np.random.default_rng(spec.seed)
    shape = rep.shape
    zero = GroupElement.zero(sys.k)
    adj = CheckReport("adjoint_matrix", tol)
    ids = {n: CheckReport(n, tol) for n in ("inner_shift_positive", "inner_shift_straddle", "inner_shift_negative")}
    idx = rep.interior(margin)
    for x in rep.generators:
        diff = rep.U(x).conj().T - rep.U_star(x)
        sub = diff[np.ix_(idx, idx)]
        adj.add(f"x={x.coords}", float(np.linalg.norm(sub, 2)) if sub.size else 0.0)
    for f in rep.states:
        for x in rep.generators:
            for g in rep.degrees:
                if (g - x) not in rep._degree_set:
                    continue
                for _ in range(spec.count):
                    v, w = shape.random(rng), shape.random(rng)
                    if x <= g:
                        lhs = inner(sys, f, g, sys.alpha(x)(v), w)
                        rhs = inner(sys, f, g - x, v, sys.L(x)(w))
                        ids["inner_shift_positive"].add(f"x={x.coords}, g={g.coords}", abs(lhs - rhs))
                    if zero <= g <= x:
                        lhs = inner(sys, f, g, sys.unit(x) * sys.alpha(g)(v), w)
                        rhs = inner(sys, f, g - x, v, sys.L(g)(w))
                        ids["inner_shift_straddle"].add(f"x={x.coords}, g={g.coords}", abs(lhs - rhs))
                    if g <= zero:
                        p = sys.unit(x - g)
                        lhs = inner(sys, f, g, p * v, w)
                        rhs = inner(sys, f, g - x, v, p * w)
                        ids["inner_shift_negative"].add(f"x={x.coords}, g={g.coords}", abs(lhs - rhs))
    return [adj, *ids.values()]


def integrated_check(rep: TruncatedRep, elements: Sequence[tuple[L1Element, L1Element]],
                     tol: float | None = None) -> list[CheckReport]:
    """pi x U is multiplicative and *-preserving on interior vectors."""
    tol = rep.system.tol if tol is None else tol
    hom = CheckReport("integrated_homomorphism", tol)
    st = CheckReport("integrated_star", tol)
    for a, b in elements:
        m = a.radius() + b.radius()
        if m > rep.N:
            raise MarginTooSmall(f"support radii {m} exceed window {rep.N}")
        pa, pb = pi_times_u(rep, a), pi_times_u(rep, b)
        scale = max(1.0, a.l1_norm() * b.l1_norm())
        hom.add("sample", rep.interior_residual(pi_times_u(rep, mul(a, b)), pa @ pb, m) / scale)
        idx = rep.interior(a.radius())
        diff = (pi_times_u(rep, star(a)) - pa.conj().T)[np.ix_(idx, idx)]
        st.add("sample", float(np.linalg.norm(diff, 2)) / max(1.0, a.l1_norm()))
    return [hom, st]


@dataclass
class PropertyStarResult:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def property_star_check(rep: TruncatedRep, elements: Sequence[L1Element] | None = None, samples=None,
                        margin: int | None = None, tol: float | None = None) -> CheckReport:
    """||E_0(a)|| <= ||(pi x U)(a)|| restricted to interior vectors."""
    sys = rep.system
    tol = sys.tol if tol is None else tol
    margin = rep.margin if margin is None else margin
    if elements is None:
        spec = _samples(samples)
        rng = np.random.default_rng(spec.seed)
        r = min(margin, rep.N)
        elements = [random_element(sys, rng, radius=r) for _ in range(spec.count)]
    report = CheckReport("property_star", tol)
    for a in elements:
        if a.radius() > margin:
            raise MarginTooSmall(f"element radius {a.radius()} exceeds margin {margin}")
        lhs = op_norm(a.coeff(GroupElement.zero(sys.k)))
        rhs = rep.interior_norm(pi_times_u(rep, a), max(a.radius(), 0))
        report.add(f"lhs={lhs:.6g}, rhs={rhs:.6g}", max(0.0, lhs - rhs))
    return report
