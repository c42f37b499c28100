"""Exact symbolic engine for coupling constant metamorphosis and Staeckel transforms.

Scalars are rational functions over Q of coordinates (half-integer powers
allowed) and parameters; on top sit momentum polynomials with Poisson
brackets, normal-ordered differential operators, the classical and quantum
transforms, structure-relation checks, a numeric harness and a CLI.
"""

from .errors import (DecompositionError, DegenerateInputError, GradingError, NotASymmetryError,
                     ParseError, SamplingError, SingularPointError, StackelError, UsageError)
from .scalar import FunctionField, Scalar
from .phase import (GradedSymmetry, MomentumPolynomial, SystemDefinition, determining_equations,
                    functional_independence, grade_decompose, is_constant_of_motion, poisson_bracket)
from .classical import (ccm_from_parameter, ccm_transform, gaussian_curvature, jacobi_transform,
                        stackel_round_trip, stackel_transform_2nd, stackel_transform_general)
from .operators import (AlphaOperatorFamily, DifferentialOperator, alpha_decompose, anticommutator,
                        build_separable_system, commutator, compose, formal_adjoint,
                        hamiltonian_operator, principal_symbol, quantize_2nd, quantum_stackel_2nd,
                        quantum_stackel_N, self_adjoint_2nd_form, telescoping_identity)
from .parser import parse_expression
from .algebra import RelationSpec, fit_relation, verify_relation
from .sysfile import SystemFile, load_system, loads_system

__version__ = "0.1.0"

__all__ = [
    "FunctionField", "Scalar",
    "MomentumPolynomial", "GradedSymmetry", "SystemDefinition", "poisson_bracket",
    "is_constant_of_motion", "grade_decompose", "determining_equations", "functional_independence",
    "ccm_transform", "ccm_from_parameter", "jacobi_transform", "stackel_transform_2nd",
    "stackel_transform_general", "stackel_round_trip", "gaussian_curvature",
    "DifferentialOperator", "AlphaOperatorFamily", "compose", "commutator", "anticommutator",
    "formal_adjoint", "hamiltonian_operator", "self_adjoint_2nd_form", "quantize_2nd",
    "build_separable_system", "quantum_stackel_2nd", "alpha_decompose", "quantum_stackel_N",
    "telescoping_identity", "principal_symbol",
    "parse_expression", "RelationSpec", "verify_relation", "fit_relation",
    "SystemFile", "load_system", "loads_system",
    "StackelError", "DegenerateInputError", "UsageError", "ParseError", "NotASymmetryError",
    "GradingError", "DecompositionError", "SingularPointError", "SamplingError",
]
