"""Randomized invariant checks over a system, shared by the selftest command and the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .action import DynamicalSystem
from .algebra import op_norm
from .l1x import L1Element, monomial_product_oracle, mul, random_element, random_monomial, star
from .norms import InconsistentEquivalence, cstar_norm_bounds, e0_power_norm, gauge_twist, zero_test
from .ogroup import GroupElement, box
from .report import CheckReport

SIGNS = (-1, 0, 1)


def degree_with_sign(k: int, sign: int, rng: np.random.Generator, max_coord: int = 3) -> GroupElement:
    """A random degree that is negative, zero or positive in the lex order."""
    if sign == 0:
        return GroupElement.zero(k)
    while True:
        g = GroupElement(tuple(int(c) for c in rng.integers(-max_coord, max_coord + 1, size=k)))
        if not g.is_zero():
            return g if g.is_positive() == (sign > 0) else -g


def sign_triples(count: int):
    """Cycle through all 27 sign patterns so every one is hit when count >= 27."""
    patterns = list(itertools.product(SIGNS, repeat=3))
    for i in range(count):
        yield patterns[i % len(patterns)]


def associativity_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 1000,
                        tol: float = 1e-9) -> CheckReport:
    rep = CheckReport("associativity", tol)
    for signs in sign_triples(count):
        gs = [degree_with_sign(system.k, s, rng) for s in signs]
        a, b, c = (random_monomial(system, rng, g) for g in gs)
        r = mul(mul(a, b), c).distance(mul(a, mul(b, c)))
        rep.add(f"degrees={[g.coords for g in gs]}", r)
    return rep


def star_antihom_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 500,
                       tol: float = 1e-9) -> CheckReport:
    rep = CheckReport("star_antihomomorphism", tol)
    for _ in range(count):
        a, b = random_element(system, rng, 2), random_element(system, rng, 2)
        rep.add("sample", star(mul(a, b)).distance(mul(star(b), star(a))))
    return rep


def submultiplicativity_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 500,
                              tol: float = 1e-9) -> CheckReport:
    rep = CheckReport("submultiplicativity", tol)
    for _ in range(count):
        a, b = random_element(system, rng, 2), random_element(system, rng, 2)
        rep.add("sample", max(0.0, mul(a, b).l1_norm() - a.l1_norm() * b.l1_norm()))
    return rep


def oracle_agreement_check(system: DynamicalSystem, rng: np.random.Generator, half_width: int = 3,
                           tol: float = 1e-12) -> CheckReport:
    """mul against the monomial case table on a (2w+1)^2 grid of degree pairs (k = 1)
    or on all pairs from the box of radius w (k >= 2, capped at 49 degrees)."""
    rep = CheckReport("monomial_oracle", tol)
    degrees = box(system.k, half_width)
    if len(degrees) > 49:
        degrees = [degrees[i] for i in sorted(rng.choice(len(degrees), 49, replace=False))]
    for g1 in degrees:
        for g2 in degrees:
            a, b = random_monomial(system, rng, g1), random_monomial(system, rng, g2)
            prod, label = monomial_product_oracle(a, b)
            rep.add(f"({g1.coords},{g2.coords}) {label}", mul(a, b).distance(prod))
    return rep


def certificate_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 20, k_max: int = 3,
                      tol: float = 1e-9) -> list[CheckReport]:
    """Sandwich s_k <= min t_j and the coefficient bound max ||a_g|| <= min t_k."""
    sandwich = CheckReport("certificate_sandwich", tol)
    coeff = CheckReport("coefficient_bound", tol)
    for _ in range(count):
        a = random_element(system, rng, 1)
        cert = cstar_norm_bounds(a, k_max)
        hi = min(cert.upper, default=math.inf)
        sandwich.add("sample", max(0.0, max(cert.lower, default=0.0) - hi))
        top = max((op_norm(c) for c in a.coeffs.values()), default=0.0)
        coeff.add("sample", max(0.0, top - hi))
    return [sandwich, coeff]


def gauge_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 32, k: int = 2,
                tol: float = 1e-12) -> CheckReport:
    rep = CheckReport("gauge_invariance", tol)
    a = random_element(system, rng, 2, scale=0.5)
    a = a * (1.0 / max(a.l1_norm(), 1.0))
    base = e0_power_norm(a, k)
    for _ in range(count):
        theta = rng.uniform(0, 2 * np.pi, size=system.k)
        rep.add(f"theta={np.round(theta, 3).tolist()}", abs(e0_power_norm(gauge_twist(a, theta), k) - base))
    return rep


def forced_zero(system: DynamicalSystem, rng: np.random.Generator) -> L1Element:
    """An element that is zero for a structural reason: x - x, or a*b - a*b rebuilt."""
    a = random_element(system, rng, 2)
    if rng.random() < 0.5:
        return a - a
    b = random_element(system, rng, 1)
    return mul(a, b) - mul(star(star(a)), b)


def zero_equivalence_check(system: DynamicalSystem, rng: np.random.Generator, count: int = 500,
                           tol: float | None = None) -> CheckReport:
    """The coefficient test and the E_0(a* a) test agree on every sample (residual 1 per disagreement)."""
    rep = CheckReport("zero_equivalence", 0.0)
    zeros = 0
    for i in range(count):
        if i % 5 == 0:
            a = forced_zero(system, rng)
        elif i % 5 == 1:
            # a tiny coefficient near the threshold
            g = degree_with_sign(system.k, int(rng.integers(-1, 2)), rng)
            t = system.tol if tol is None else tol
            a = random_monomial(system, rng, g, scale=t * float(rng.uniform(0.1, 10)))
        else:
            a = random_element(system, rng, 2)
        try:
            zeros += zero_test(a, tol).zero
            rep.add("sample", 0.0)
        except InconsistentEquivalence as exc:
            rep.add(str(exc), 1.0)
    rep.notes.append(f"{zeros} of {count} samples were zero")
    return rep
