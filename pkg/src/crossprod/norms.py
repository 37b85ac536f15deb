"""Two-sided bounds on the enveloping C*-norm, the gauge action, and the zero test.

For a finitely supported a with b_k = (a a*)^k,

    s_k = ||E_0[(a a*)^{2k}]||^{1/4k}  <=  ||a||  <=  (2 |F_k| + 1)^{1/4k} s_k,

where F_k is the set of positive degrees b_k can occupy.  We take F_k to be the
positive part of the k-fold sumset of S - S (S = support of a), a superset of
the true support of b_k that cancellation or pruning cannot shrink.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import op_norm
from .l1x import L1Element, mul, power, star
from .ogroup import GroupElement


class SupportBlowup(RuntimeError):
    pass


class InconsistentEquivalence(AssertionError):
    """The coefficient test and the E_0(a*a) test disagree; only an arithmetic bug can cause this."""


def element_hash(a: L1Element) -> str:
    h = hashlib.sha256()
    for g, c in a.coeffs.items():
        h.update(repr(g.coords).encode())
        h.update(np.round(c.vec, 12).tobytes())
    return h.hexdigest()[:16]


@dataclass
class NormCertificate:
    element_hash: str
    k: list[int] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    support_sizes: list[int] = field(default_factory=list)

    @property
    def interval(self) -> tuple[float, float]:
        if not self.k:
            return (0.0, math.inf)
        return (max(self.lower), min(self.upper))

    def contains(self, value: float, slack: float = 0.0) -> bool:
        lo, hi = self.interval
        return lo - slack <= value <= hi + slack

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {
            "element_hash": self.element_hash,
            "k": list(self.k),
            "lower": list(self.lower),
            "upper": list(self.upper),
            "support_sizes": list(self.support_sizes),
            "interval": [lo, hi],
        }


def _log_e0_powers(c2: L1Element, k_max: int, on_step=None) -> list[float]:
    """log ||E_0[c2^k]|| for k = 1..k_max (-inf when it vanishes).

    Each partial product is rescaled to unit l1 norm so that no coefficient
    drifts under the arithmetic drop threshold; the scale is kept as a log.
    """
    zero = GroupElement.zero(c2.system.k)
    out: list[float] = []
    p, log_scale = None, 0.0
    for k in range(1, k_max + 1):
        p = c2 if p is None else mul(p, c2)
        if on_step is not None:
            on_step(k, p)
        n = p.l1_norm()
        if n == 0.0:
            out.extend([-math.inf] * (k_max - k + 1))
            break
        p = p * (1.0 / n)
        log_scale += math.log(n)
        e0 = op_norm(p.coeff(zero))
        out.append(log_scale + math.log(e0) if e0 > 0 else -math.inf)
    return out


def e0_power_norm(a: L1Element, k: int) -> float:
    """||E_0[(a a*)^{2k}]||, without the 4k-th root."""
    if k < 1:
        raise ValueError("k must be positive")
    r = a.l1_norm()
    if r == 0.0:
        return 0.0
    # bounds are homogeneous; normalizing keeps products clear of the drop threshold
    b = a * (1.0 / r)
    c = mul(b, star(b))
    log_e0 = _log_e0_powers(mul(c, c), k)[-1]
    return math.exp(4 * k * math.log(r) + log_e0)


def difference_set(a: L1Element) -> set[GroupElement]:
    s = a.support
    return {g - h for g in s for h in s}


def cstar_norm_bounds(a: L1Element, k_max: int = 10, support_growth_bound: int = 10_000) -> NormCertificate:
    cert = NormCertificate(element_hash(a))
    if a.is_zero():
        for k in range(1, k_max + 1):
            cert.k.append(k)
            cert.lower.append(0.0)
            cert.upper.append(0.0)
            cert.support_sizes.append(0)
        return cert
    zero = GroupElement.zero(a.system.k)
    diff = difference_set(a)
    sums = {zero}
    r = a.l1_norm()
    a = a * (1.0 / r)
    c = mul(a, star(a))
    c2 = mul(c, c)

    def guard(k, p):
        if len(p.coeffs) > support_growth_bound:
            raise SupportBlowup(f"support of (aa*)^(2k) exceeded at k={k}")

    sizes = []
    for k in range(1, k_max + 1):
        sums = {g + d for g in sums for d in diff}
        if len(sums) > support_growth_bound:
            raise SupportBlowup(f"|F_k| bound exceeded at k={k} ({len(sums)} > {support_growth_bound})")
        sizes.append(sum(1 for g in sums if g > zero))
    for k, (fk, log_e0) in enumerate(zip(sizes, _log_e0_powers(c2, k_max, guard)), start=1):
        s = r * math.exp(log_e0 / (4 * k))
        cert.k.append(k)
        cert.lower.append(s)
        cert.upper.append((2 * fk + 1) ** (1.0 / (4 * k)) * s)
        cert.support_sizes.append(fk)
    return cert


def _phase(theta: Sequence[float], g: GroupElement) -> complex:
    return complex(np.exp(1j * float(np.dot(theta, g.coords))))


def gauge_twist(a: L1Element, theta) -> L1Element:
    """Multiply the degree-g coefficient by exp(i <theta, g>)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (a.system.k,):
        raise ValueError(f"need {a.system.k} angles")
    return L1Element(a.system, {g: _phase(theta, g) * c for g, c in a.coeffs.items()})


@dataclass(frozen=True)
class ZeroTestResult:
    zero: bool
    witness: GroupElement | None
    max_coeff: float
    e0_norm: float

    def __str__(self) -> str:
        return "Zero" if self.zero else f"NonZero({self.witness!r})"


def zero_test(a: L1Element, tol: float | None = None) -> ZeroTestResult:
    """Decide a == 0 two ways: all coefficients vanish, and E_0(a* a) vanishes.

    ||E_0(a* a)|| lies between max_g ||a_g||^2 and the sum of the squares, so the
    second test compares its square root with tol, after discarding
    coefficients at or below tol.
    """
    tol = a.system.tol if tol is None else tol
    norms = {g: op_norm(c) for g, c in a.coeffs.items()}
    witness = max(norms, key=norms.get) if norms else None
    max_coeff = norms[witness] if witness is not None else 0.0
    by_coeffs = max_coeff <= tol
    kept = a.pruned(tol)
    # normalize first: products are pruned at an absolute threshold, so tiny
    # coefficients would otherwise vanish from a* a
    unit = kept * (1.0 / max_coeff) if max_coeff > 0 else kept
    e0 = max_coeff ** 2 * op_norm(mul(star(unit), unit).coeff(GroupElement.zero(a.system.k)))
    by_e0 = math.sqrt(e0) <= tol
    if by_coeffs != by_e0:
        raise InconsistentEquivalence(
            f"coefficient test says {'zero' if by_coeffs else 'nonzero'}, "
            f"E_0(a*a) test says {'zero' if by_e0 else 'nonzero'} (max coeff {max_coeff:.3e}, e0 {e0:.3e})"
        )
    return ZeroTestResult(by_coeffs, None if by_coeffs else witness, max_coeff, e0)
