"""Inverse and direct scattering for the energy-dependent first-order system."""

from .akns import (
    AknsField,
    AknsScattering,
    JostEvaluation,
    akns_coefficients,
    map_jost,
    map_scattering,
    to_akns,
)
from .bound_states import (
    BoundStateSpec,
    MatrixTriplet,
    SpectralResidueData,
    assemble_triplet,
    norming_constants,
    principal_sqrt,
    triplet_to_states,
    validate_pair,
)
from .direct import (
    FieldInvariants,
    LocatedPole,
    ScatteringCoefficients,
    field_invariants,
    integrate_jost,
    locate_bound_states,
    scattering_coefficients,
    wronskian,
)
from .fields import PotentialField
from .linalg import mat_exp, mat_inverse, solve_sylvester
from .marchenko import (
    GaussianReflection,
    MarchenkoGrid,
    NumericKernelSolution,
    OmegaKernel,
    RationalReflection,
    RecoveredField,
    SampledReflection,
    ScatteringDataset,
    build_omega,
    fourier_reflection,
    reconstruct_jost,
    recover,
    solve_at,
)
from .reflectionless import (
    ReflectionlessModel,
    build_model,
    E_and_mu,
    G_of_x,
    g_functions,
    gamma_pair,
    jost,
    kernels,
    phase_factor,
    potential_derivatives,
    potentials,
    principal_mu,
    to_field,
    transmissions,
    transmissions_by_limit,
)

__version__ = "0.1.0"

__all__ = [
    "AknsField",
    "AknsScattering",
    "BoundStateSpec",
    "GaussianReflection",
    "JostEvaluation",
    "MarchenkoGrid",
    "MatrixTriplet",
    "NumericKernelSolution",
    "OmegaKernel",
    "PotentialField",
    "RationalReflection",
    "RecoveredField",
    "ReflectionlessModel",
    "SampledReflection",
    "ScatteringDataset",
    "SpectralResidueData",
    "akns_coefficients",
    "assemble_triplet",
    "build_model",
    "build_omega",
    "E_and_mu",
    "FieldInvariants",
    "fourier_reflection",
    "G_of_x",
    "LocatedPole",
    "ScatteringCoefficients",
    "field_invariants",
    "integrate_jost",
    "locate_bound_states",
    "map_jost",
    "map_scattering",
    "reconstruct_jost",
    "recover",
    "scattering_coefficients",
    "solve_at",
    "to_akns",
    "wronskian",
    "g_functions",
    "gamma_pair",
    "jost",
    "kernels",
    "mat_exp",
    "mat_inverse",
    "norming_constants",
    "phase_factor",
    "potential_derivatives",
    "potentials",
    "principal_mu",
    "principal_sqrt",
    "solve_sylvester",
    "to_field",
    "transmissions",
    "transmissions_by_limit",
    "triplet_to_states",
    "validate_pair",
    "__version__",
]
