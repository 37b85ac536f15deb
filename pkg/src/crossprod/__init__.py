"""Crossed products A x_alpha Gamma of finite-dimensional C*-algebras by
*-endomorphism actions of Z^k with the lexicographic order."""

from __future__ import annotations

from .action import (
    DynamicalSystem,
    EndoAction,
    Endomorphism,
    LinearMap,
    NotFinelyRepresentable,
    SampleSpec,
    TransferAction,
    Verdict,
    Witness,
    act,
    fine_representability_verdict,
    hereditary_check,
    kernel_projection,
    product_action,
    synthesize_transfer,
    unit_projection,
    validate_endomorphism,
)
from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    CentralProjection,
    adjoint,
    ideal_to_central_projection,
    op_norm,
)
from .fixtures import FIXTURES, get_fixture, list_fixtures, load_fixture
from .l1x import L1Element, coeff, delta, monomial_product_oracle, mul, power, star, u, u_star
from .norms import NormCertificate, cstar_norm_bounds, e0_power_norm, gauge_twist, zero_test
from .ogroup import GroupElement, as_group, box
from .regrep import (
    StateFunctional,
    TruncatedRep,
    adjointness_check,
    build_regrep,
    covariance_check,
    gns_space,
    pi_times_u,
    property_star_check,
)
from .report import CheckReport
from .serialize import load_system, parse_element

__version__ = "0.1.0"
