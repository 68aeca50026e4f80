"""Certified eigenvalue enclosures for the angular Kerr-Newman Dirac operator."""
from .discretization import (
    Mesh, PencilMatrices, QuadratureSpec, assemble_pencil, assemble_pencil_oracle, build_mesh,
    mesh_for_width,
)
from .enclosure import (
    AprioriSegment, Enclosure, basic_enclosure, best_enclosure, isolating_segments,
    load_apriori, sharpened_enclosure,
)
from .operator_model import (
    OperatorParams, exact_eigenvalue_equal_coupling, exact_eigenvalue_zero, predicted_rate,
    validate_params,
)
from .quadratic_spectrum import (
    ConjugatePair, SecondOrderSpectrum, SolverConfig, extract_pairs, nearest_pair, solve_spec2,
)

__version__ = "0.1.0"

__all__ = [
    "Mesh", "PencilMatrices", "QuadratureSpec", "assemble_pencil", "assemble_pencil_oracle",
    "build_mesh", "mesh_for_width", "AprioriSegment", "Enclosure", "basic_enclosure",
    "best_enclosure", "isolating_segments", "load_apriori", "sharpened_enclosure",
    "OperatorParams", "exact_eigenvalue_equal_coupling", "exact_eigenvalue_zero",
    "predicted_rate", "validate_params", "ConjugatePair", "SecondOrderSpectrum", "SolverConfig",
    "extract_pairs", "nearest_pair", "solve_spec2",
]
