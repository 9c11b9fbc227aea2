"""Simultaneous Gaussian quadrature for two measures via banded Hessenberg eigenpairs."""

from .errors import (
    DomainError,
    IncompleteInputError,
    InnerProductCollapseError,
    IntegrandError,
    MultiplicityError,
    NumericError,
    RealityError,
    ResidualError,
    SimquadError,
    SingularityError,
    UnsupportedOracleError,
)
from .hessenberg import (
    BandedHessenberg,
    EigenPair,
    build_hessenberg,
    certified_eigenpairs,
    eigen_nodes,
    eigenpairs,
    eval_typeII,
    left_eigenvector,
    right_eigenvector,
)
from .precision import PrecisionContext, cos_fn, exp_neg, gamma, parse, serialize
from .quadrature import (
    ExactnessReport,
    QuadratureRule,
    claimed_degrees,
    integrate,
    make_rule,
    named_integrand,
    verify_exactness,
    weights_oracle,
)
from .systems import (
    BesselI,
    BesselK,
    CustomStepline,
    NNCoefficients,
    NormalizationMatrix,
    SteplineCoefficients,
    WeightSystem,
    besseli_coeffs,
    besseli_normalization,
    besselk_coeffs,
    besselk_normalization,
    nn_to_stepline,
)

__version__ = "0.1.0"
