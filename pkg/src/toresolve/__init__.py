"""Exact-arithmetic toolkit for classifying and resolving low-dimensional toric singularities."""

from .lattice import (
    Covector,
    IntMatrix,
    LatticeError,
    LatticeVector,
    hermite_normal_form,
    lattice_determinant,
    primitive,
    smith_normal_form,
)
from .cones import (
    Cone,
    ConeError,
    Fan,
    dual_cone,
    faces,
    is_basic,
    is_simplicial,
    make_cone,
    make_fan,
    multiplicity,
    star_subdivision,
)
from .hilbert import HilbertBasis, embedding_dimension, hilbert_basis, toric_relations
from .divisors import (
    DiscrepancyReport,
    SupportFunction,
    canonical_support,
    discrepancies,
    is_cartier,
    is_strictly_upper_convex,
    qcartier_index,
    with_linear_representatives,
)
from .classify import (
    ClassifyError,
    LatticePolytope,
    SingularityReport,
    classify,
    gorenstein_data,
    index_one_cover,
    is_elementary,
    is_nakajima,
    lri_general_section,
)
from .resolve2d import CFExpansion, cf_expansion, minimal_resolution
from .resolve3d import (
    PolygonComplex,
    ResolutionTrace,
    blowup_curve_phase,
    blowup_fixed_point,
    canonical_modification,
    completions,
    crepant_fixed_point_phase,
    polygon_form,
    resolve,
)

__all__ = [
    "CFExpansion",
    "ClassifyError",
    "Cone",
    "ConeError",
    "Covector",
    "DiscrepancyReport",
    "Fan",
    "HilbertBasis",
    "IntMatrix",
    "LatticeError",
    "LatticePolytope",
    "LatticeVector",
    "PolygonComplex",
    "ResolutionTrace",
    "SingularityReport",
    "SupportFunction",
    "blowup_curve_phase",
    "blowup_fixed_point",
    "canonical_modification",
    "canonical_support",
    "cf_expansion",
    "classify",
    "completions",
    "crepant_fixed_point_phase",
    "discrepancies",
    "dual_cone",
    "embedding_dimension",
    "faces",
    "gorenstein_data",
    "hermite_normal_form",
    "hilbert_basis",
    "index_one_cover",
    "is_basic",
    "is_cartier",
    "is_elementary",
    "is_nakajima",
    "is_simplicial",
    "is_strictly_upper_convex",
    "lattice_determinant",
    "lri_general_section",
    "make_cone",
    "make_fan",
    "minimal_resolution",
    "multiplicity",
    "polygon_form",
    "primitive",
    "qcartier_index",
    "resolve",
    "smith_normal_form",
    "star_subdivision",
    "toric_relations",
    "with_linear_representatives",
]
