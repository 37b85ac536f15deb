"""Finitely supported elements of l1(Gamma, alpha, A) and their arithmetic.

An element is a map g -> a_g with a_x in A alpha_x(1) and a_{-x} in alpha_x(1) A
for x >= 0.  The product is the twisted convolution

    g >= 0:  sum a_x alpha_{x-y}(b_{-y})  [g = x-y]  + sum L_x(a_{-x} b_y)  [g = y-x]
             + sum a_x alpha_x(b_y)  [g = x+y, x,y >= 0]
    g <  0:  sum alpha_{y-x}(a_x) b_{-y}  [g = x-y]  + sum L_y(a_{-x} b_y)  [g = y-x]
             + sum alpha_y(a_{-x}) b_{-y}  [g = -x-y, x,y >= 0]

with x, y > 0 in the first two families.  Since supports are finite we loop
over pairs of support points and let the signs pick the family.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .action import DynamicalSystem
from .algebra import AlgebraElement, adjoint, op_norm
from .ogroup import GroupElement, GroupLike, as_group, box, require_positive

DROP_TOL = 1e-12


class ConstraintViolation(ValueError):
    pass


class SystemMismatch(ValueError):
    pass


class L1Element:
    """A finitely supported element; zero coefficients are pruned."""

    __slots__ = ("system", "coeffs")

    def __init__(self, system: DynamicalSystem, coeffs: Mapping[GroupElement, AlgebraElement] | None = None,
                 drop_tol: float = DROP_TOL):
        system.require_representable()
        kept = {}
        for g, a in (coeffs or {}).items():
            g = as_group(g, system.k)
            if a.shape != system.shape:
                raise SystemMismatch("coefficient shape does not match the system")
            if op_norm(a) > drop_tol:
                kept[g] = a
        self.system = system
        self.coeffs = MappingProxyType(dict(sorted(kept.items())))

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, system: DynamicalSystem) -> "L1Element":
        return cls(system, {})

    @classmethod
    def one(cls, system: DynamicalSystem) -> "L1Element":
        return cls(system, {GroupElement.zero(system.k): system.shape.unit()})

    # structure ------------------------------------------------------------

    @property
    def support(self) -> list[GroupElement]:
        return list(self.coeffs)

    def radius(self) -> int:
        return max((g.radius() for g in self.coeffs), default=0)

    def coeff(self, g: GroupLike) -> AlgebraElement:
        return self.coeffs.get(as_group(g, self.system.k), self.system.shape.zeros())

    def l1_norm(self) -> float:
        return float(sum(op_norm(a) for a in self.coeffs.values()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def constraint_residual(self) -> float:
        """Worst violation of a_x = a_x alpha_x(1), a_{-x} = alpha_x(1) a_{-x}."""
        worst = 0.0
        for g, a in self.coeffs.items():
            if g.is_positive():
                r = op_norm(a - a * self.system.unit(g))
            else:
                r = op_norm(a - self.system.unit(-g) * a)
            worst = max(worst, r)
        return worst

    def pruned(self, tol: float) -> "L1Element":
        return L1Element(self.system, self.coeffs, drop_tol=tol)

    # arithmetic -----------------------------------------------------------

    def _same(self, other: "L1Element") -> None:
        if not isinstance(other, L1Element):
            raise TypeError(f"expected L1Element, got {type(other).__name__}")
        if other.system is not self.system:
            raise SystemMismatch("elements belong to different systems")

    def __add__(self, other: "L1Element") -> "L1Element":
        return add(self, other)

    def __sub__(self, other: "L1Element") -> "L1Element":
        return add(self, scale(-1.0, other))

    def __neg__(self) -> "L1Element":
        return scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, L1Element):
            return mul(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    def star(self) -> "L1Element":
        return star(self)

    def distance(self, other: "L1Element") -> float:
        """l1 norm of the difference."""
        return (self - other).l1_norm() if self.coeffs or other.coeffs else 0.0

    def __repr__(self) -> str:
        terms = ", ".join(f"{g!r}: {a!r}" for g, a in self.coeffs.items())
        return f"L1Element({{{terms}}})"


def _check_same(a: L1Element, b: L1Element) -> None:
    a._same(b)


def delta(system: DynamicalSystem, a: AlgebraElement, g: GroupLike, strict: bool = True,
          tol: float | None = None) -> L1Element:
    """a delta_g, after projecting a onto the support constraint for degree g.

    In strict mode a ConstraintViolation is raised if that projection moves a.
    """
    tol = system.tol if tol is None else tol
    g = as_group(g, system.k)
    proj = a * system.unit(g) if g.is_positive() else system.unit(-g) * a
    moved = op_norm(proj - a)
    if strict and moved > tol:
        raise ConstraintViolation(f"coefficient violates the constraint at {g!r} by {moved:.3e}")
    return L1Element(system, {g: proj})


def u(system: DynamicalSystem, x: GroupLike) -> L1Element:
    """alpha_x(1) delta_x."""
    x = as_group(x, system.k)
    require_positive(x)
    return L1Element(system, {x: system.unit(x)})


def u_star(system: DynamicalSystem, x: GroupLike) -> L1Element:
    """alpha_x(1) delta_{-x}."""
    x = as_group(x, system.k)
    require_positive(x)
    return L1Element(system, {-x: system.unit(x)})


def add(a: L1Element, b: L1Element) -> L1Element:
    _check_same(a, b)
    out = dict(a.coeffs)
    for g, c in b.coeffs.items():
        out[g] = out[g] + c if g in out else c
    return L1Element(a.system, out)


def scale(lam: complex, a: L1Element) -> L1Element:
    return L1Element(a.system, {g: lam * c for g, c in a.coeffs.items()})


def star(a: L1Element) -> L1Element:
    return L1Element(a.system, {-g: adjoint(c) for g, c in a.coeffs.items()})


def _pair_product(system: DynamicalSystem, g1: GroupElement, a: AlgebraElement,
                  g2: GroupElement, b: AlgebraElement) -> tuple[GroupElement, AlgebraElement]:
    g = g1 + g2
    alpha, L = system.alpha, system.L
    p1, p2 = g1.is_positive(), g2.is_positive()
    z1, z2 = g1.is_zero(), g2.is_zero()
    if p1 and not z1 and not p2:
        # a_x delta_x . b_{-y} delta_{-y}, x, y > 0
        if g.is_positive():
            return g, a * alpha(g)(b)
        return g, alpha(-g)(a) * b
    if not p1 and p2 and not z2:
        # a_{-x} delta_{-x} . b_y delta_y, x, y > 0
        if g.is_positive():
            return g, L(-g1)(a * b)
        return g, L(g2)(a * b)
    if p1 and p2:
        return g, a * alpha(g1)(b)
    # both degrees <= 0
    return g, alpha(-g2)(a) * b


def mul(a: L1Element, b: L1Element) -> L1Element:
    _check_same(a, b)
    out: dict[GroupElement, AlgebraElement] = {}
    for g1, x in a.coeffs.items():
        for g2, y in b.coeffs.items():
            g, c = _pair_product(a.system, g1, x, g2, y)
            out[g] = out[g] + c if g in out else c
    return L1Element(a.system, out)


def power(a: L1Element, n: int) -> L1Element:
    """a^n by repeated squaring."""
    if n < 0:
        raise ValueError("negative power")
    result = L1Element.one(a.system)
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def coeff(a: L1Element, g: GroupLike) -> AlgebraElement:
    return a.coeff(g)


def monomial_product_oracle(a: L1Element, b: L1Element) -> tuple[L1Element, str]:
    """Product of two monomials by the case table of the integrated representation.

    Cases are split on the sign of g1 + g2 first (I: >= 0, II: < 0), then on the
    signs of the factors; the returned label names the case used.
    """
    _check_same(a, b)
    if len(a.coeffs) > 1 or len(b.coeffs) > 1:
        raise ValueError("monomial_product_oracle takes single-coefficient elements")
    sys = a.system
    if a.is_zero() or b.is_zero():
        return L1Element.zero(sys), "zero"
    (g1, x), = a.coeffs.items()
    (g2, y), = b.coeffs.items()
    g = g1 + g2
    alpha, L = sys.alpha, sys.L
    zero = GroupElement.zero(sys.k)
    if g >= zero:
        if g1 > zero and g2 < zero:
            label, c = "I.1", x * alpha(g)(y)
        elif g1 < zero and g2 > zero:
            label, c = "I.2", L(-g1)(x * y)
        else:
            # g1, g2 >= 0
            label, c = "I.3", x * alpha(g1)(y)
    else:
        if g1 >= zero and g2 < zero:
            label, c = "II.1", alpha(-g)(x) * y
        elif g1 < zero and g2 >= zero:
            label, c = "II.2", L(g2)(x * y)
        else:
            # g1, g2 < 0; U*_{-g1} a U*_{-g2} b = U*_{-g} alpha_{-g2}(a) b
            label, c = "II.3", alpha(-g2)(x) * y
    return L1Element(sys, {g: c}), label


def random_element(system: DynamicalSystem, rng: np.random.Generator, radius: int = 2,
                   density: float = 0.7, scale: float = 1.0,
                   degrees: Iterable[GroupElement] | None = None) -> L1Element:
    """Random finitely supported element with projected coefficients."""
    degrees = list(degrees) if degrees is not None else box(system.k, radius)
    out = {}
    for g in degrees:
        if rng.random() < density:
            a = system.shape.random(rng, scale)
            out[g] = a * system.unit(g) if g.is_positive() else system.unit(-g) * a
    return L1Element(system, out)


def random_monomial(system: DynamicalSystem, rng: np.random.Generator, g: GroupLike,
                    scale: float = 1.0) -> L1Element:
    return delta(system, system.shape.random(rng, scale), g, strict=False)
