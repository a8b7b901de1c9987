"""Exact twisted differential calculus: q-difference, finite-difference and Mahler operators."""

from .coefficients import (
    INF,
    NormContext,
    NormValue,
    padic_valuation,
    q_binomial,
    q_binomial_norm_check,
    q_factorial,
    q_integer,
)
from .errors import (
    BasisNormMismatch,
    DomainError,
    IdentityTwistError,
    IndivisibleError,
    NonClassicalWarning,
    NonIntegrableError,
    NormBoundViolation,
    ParseError,
    ReconstructionError,
    RootOfUnityError,
    TwistcalcError,
    UsageError,
    ZeroDenominatorError,
)
from .poly import Poly
from .twist import (
    TwistSpec,
    VariableTwist,
    check_coordinates,
    contractivity_check,
    derivation,
    gauss_norm,
    sigma_apply,
    sigma_power_apply,
)
from .principal_parts import (
    BiJet,
    Jet,
    XiPoly,
    comultiplication,
    evaluate_pi,
    from_twisted_basis,
    jet_multiply,
    symmetric_check,
    taylor,
    to_twisted_basis,
    twisted_basis_element,
)
from .operators import (
    Coeff,
    D,
    DP,
    OperatorWord,
    TwistedOperator,
    apply,
    compose,
    normal_form,
    recover_from_action,
)
from .connections import ConnectionModule, de_rham_dims, integrability_check, module_apply
from .banach import (
    EtaRadius,
    RadiusReport,
    eta_convergence_check,
    eta_norm,
    operator_eta_norm,
    radius_estimate,
    rho_sigma,
)
from .confluence import (
    ConfluencePair,
    confluence_sweep,
    from_classical,
    isometry_witness,
    to_classical,
)
from .parsing import format_words, parse_operator, parse_poly
from .config import AlgebraConfig


__all__ = [
    "INF",
    "NormContext",
    "NormValue",
    "padic_valuation",
    "q_binomial",
    "q_binomial_norm_check",
    "q_factorial",
    "q_integer",
    "BasisNormMismatch",
    "DomainError",
    "IdentityTwistError",
    "IndivisibleError",
    "NonClassicalWarning",
    "NonIntegrableError",
    "NormBoundViolation",
    "ParseError",
    "ReconstructionError",
    "RootOfUnityError",
    "TwistcalcError",
    "UsageError",
    "ZeroDenominatorError",
    "Poly",
    "TwistSpec",
    "VariableTwist",
    "check_coordinates",
    "contractivity_check",
    "derivation",
    "gauss_norm",
    "sigma_apply",
    "sigma_power_apply",
    "BiJet",
    "Jet",
    "XiPoly",
    "comultiplication",
    "evaluate_pi",
    "from_twisted_basis",
    "jet_multiply",
    "symmetric_check",
    "taylor",
    "to_twisted_basis",
    "twisted_basis_element",
    "Coeff",
    "D",
    "DP",
    "OperatorWord",
    "TwistedOperator",
    "apply",
    "compose",
    "normal_form",
    "recover_from_action",
    "ConnectionModule",
    "de_rham_dims",
    "integrability_check",
    "module_apply",
    "EtaRadius",
    "RadiusReport",
    "eta_convergence_check",
    "eta_norm",
    "operator_eta_norm",
    "radius_estimate",
    "rho_sigma",
    "ConfluencePair",
    "confluence_sweep",
    "from_classical",
    "isometry_witness",
    "to_classical",
    "format_words",
    "parse_operator",
    "parse_poly",
    "AlgebraConfig",
]

__version__ = "0.1.0"
