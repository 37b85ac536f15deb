from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossprod.action import NotFinelyRepresentable
from crossprod.algebra import AlgebraShape
from crossprod.fixtures import load_fixture
from crossprod.l1x import (
    ConstraintViolation,
    L1Element,
    SystemMismatch,
    add,
    coeff,
    delta,
    monomial_product_oracle,
    mul,
    power,
    random_element,
    random_monomial,
    scale,
    star,
    u,
    u_star,
)
from crossprod.invariants import degree_with_sign
from crossprod.ogroup import GroupElement, NotInCone

from conftest import REPRESENTABLE

C2 = AlgebraShape((1, 1))
SYSTEMS = REPRESENTABLE + ["chain", "product2"]
seeds = st.integers(0, 2**32 - 1)


def get(request, name):
    return load_fixture(name) if name in REPRESENTABLE else request.getfixturevalue(name)


def automorphism_product(a: L1Element, b: L1Element) -> dict:
    """Oracle for automorphic actions of Z via the group-ring convention c u_g.

    A negative-degree coefficient c at g = -x stands for u_x* c = alpha_g(c) u_g,
    so translate to c u_g form, convolve with (c u_g)(d u_h) = c alpha_g(d) u_{g+h},
    and translate back.
    """
    s = a.system
    gen = s.alpha(1).matrix
    inv = np.linalg.inv(gen)

    def alpha(n):
        return np.linalg.matrix_power(gen, n) if n >= 0 else np.linalg.matrix_power(inv, -n)

    def to_group(e):
        return {g.coords[0]: (c.vec if g.coords[0] >= 0 else alpha(g.coords[0]) @ c.vec)
                for g, c in e.coeffs.items()}

    out: dict[int, np.ndarray] = {}
    for g, x in to_group(a).items():
        for h, y in to_group(b).items():
            term = (s.shape.from_vec(x) * s.shape.from_vec(alpha(g) @ y)).vec
            out[g + h] = out.get(g + h, 0) + term
    return {GroupElement((n,)): s.shape.from_vec(v if n >= 0 else alpha(-n) @ v) for n, v in out.items()}


def assert_close(a: L1Element, b: L1Element, tol: float = 1e-12):
    assert a.distance(b) <= tol, (a, b)


def test_delta_examples(systems):
    s2 = systems["S2"]
    assert_close(delta(s2, C2.unit(), 0), L1Element.one(s2))
    with pytest.raises(ConstraintViolation):
        delta(s2, C2.diag(1, 1), 1)
    d = delta(s2, C2.diag(1, 0), -1)
    assert d.coeff(-1).allclose(C2.diag(1, 0))
    projected = delta(s2, C2.diag(1, 1), 1, strict=False)
    assert projected.coeff(1).allclose(C2.diag(1, 0))


def test_generators_s2(systems):
    s2 = systems["S2"]
    assert u(s2, 1).coeff(1).allclose(C2.diag(1, 0))
    assert mul(u(s2, 1), u(s2, 1)).is_zero()
    assert_close(star(u(s2, 1)), u_star(s2, 1))
    with pytest.raises(NotInCone):
        u(s2, -1)


def test_generators_saut_form_a_group(systems):
    s = systems["SAut"]
    for x in range(4):
        for y in range(4):
            assert_close(mul(u(s, x), u(s, y)), u(s, x + y))
        assert_close(mul(u(s, x), u_star(s, x)), L1Element.one(s))


def test_star_and_add_examples(systems):
    s2 = systems["S2"]
    assert_close(star(u(s2, 1)), delta(s2, C2.diag(1, 0), -1))
    one = L1Element.one(s2)
    assert_close(star(one), one)
    a, b = C2.diag(1, 0), C2.diag(2j, 0)
    assert_close(add(delta(s2, a, 1), delta(s2, b, 1)), delta(s2, a + b, 1))


def test_s2_products(systems):
    s2 = systems["S2"]
    uu, us = u(s2, 1), u_star(s2, 1)
    assert_close(mul(us, uu), delta(s2, C2.diag(0, 1), 0))
    assert_close(mul(uu, us), delta(s2, C2.diag(1, 0), 0))
    a = uu + us
    assert_close(mul(a, a), L1Element.one(s2))
    assert coeff(mul(us, uu), 0).allclose(C2.diag(0, 1))


@pytest.mark.parametrize("name", SYSTEMS)
def test_unit_law(request, name, rng):
    s = get(request, name)
    a = random_element(s, rng, 2)
    one = L1Element.one(s)
    assert_close(mul(one, a), a)
    assert_close(mul(a, one), a)


def test_coeff_examples(systems):
    s2 = systems["S2"]
    assert coeff(L1Element.one(s2), 0).allclose(C2.unit())
    assert coeff(u(s2, 1), -1).allclose(C2.zeros())


def test_oracle_examples(systems):
    s2 = systems["S2"]
    a = delta(s2, C2.diag(1, 0), -1)
    b = delta(s2, C2.diag(1, 0), 1)
    prod, label = monomial_product_oracle(a, b)
    assert label == "I.2"
    assert_close(prod, delta(s2, C2.diag(0, 1), 0))
    prod, label = monomial_product_oracle(delta(s2, C2.diag(1, 0), 1), delta(s2, C2.diag(0, 1), 0))
    assert label == "I.3"
    assert_close(prod, delta(s2, C2.diag(1, 0), 1))
    sa = systems["SAut"]
    x, y = delta(sa, C2.diag(2, 3j), -1), delta(sa, C2.diag(-1, 5), -1)
    prod, label = monomial_product_oracle(x, y)
    assert label == "II.3"
    assert_close(prod, mul(x, y))
    assert_close(prod, L1Element(sa, automorphism_product(x, y)))


def test_oracle_covers_all_case_labels(systems, rng):
    s = systems["SAut"]
    labels = set()
    for g1 in range(-3, 4):
        for g2 in range(-3, 4):
            labels.add(monomial_product_oracle(random_monomial(s, rng, g1), random_monomial(s, rng, g2))[1])
    assert labels == {"I.1", "I.2", "I.3", "II.1", "II.2", "II.3"}


def test_system_mismatch(systems):
    with pytest.raises(SystemMismatch):
        mul(u(systems["S2"], 1), u(systems["SAut"], 1))


def test_non_representable_system_rejected(systems):
    with pytest.raises(NotFinelyRepresentable):
        L1Element.one(systems["SNeg"])


def test_power_matches_repeated_product(systems, rng):
    s = systems["SMx"]
    a = random_element(s, rng, 1)
    acc = L1Element.one(s)
    for n in range(6):
        assert power(a, n).distance(acc) <= 1e-9 * max(1.0, acc.l1_norm())
        acc = mul(acc, a)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_saut_matches_group_convolution(seed):
    s = load_fixture("SAut")
    rng = np.random.default_rng(seed)
    a, b = random_element(s, rng, 3), random_element(s, rng, 3)
    assert_close(mul(a, b), L1Element(s, automorphism_product(a, b)), 1e-10)


@pytest.mark.parametrize("name", SYSTEMS)
@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_algebra_axioms(request, name, seed):
    s = get(request, name)
    rng = np.random.default_rng(seed)
    a, b, c = (random_element(s, rng, 2) for _ in range(3))
    ab = mul(a, b)
    assert mul(ab, c).distance(mul(a, mul(b, c))) <= 1e-9
    assert star(ab).distance(mul(star(b), star(a))) <= 1e-9
    assert star(star(a)).distance(a) == 0
    assert ab.l1_norm() <= a.l1_norm() * b.l1_norm() + 1e-9
    for e in (ab, star(a), a + b, scale(2j, a)):
        assert e.constraint_residual() <= 1e-9


@pytest.mark.parametrize("name", SYSTEMS)
@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_mul_matches_oracle_on_monomials(request, name, seed):
    s = get(request, name)
    rng = np.random.default_rng(seed)
    g1 = degree_with_sign(s.k, int(rng.integers(-1, 2)), rng)
    g2 = degree_with_sign(s.k, int(rng.integers(-1, 2)), rng)
    a, b = random_monomial(s, rng, g1), random_monomial(s, rng, g2)
    assert mul(a, b).distance(monomial_product_oracle(a, b)[0]) <= 1e-12


def test_zero_degree_constraint_is_trivial(systems, rng):
    s = systems["S2"]
    a = C2.random(rng)
    assert delta(s, a, 0).coeff(GroupElement.zero(1)).allclose(a)
