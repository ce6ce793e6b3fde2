"""Common complements for subspace families with certified transversality decay."""

from .geometry import (
    DEFAULT_TOL,
    CodimSubspace,
    ConstructionError,
    OrthonormalFrame,
    SpanSubspace,
    ValidationError,
    degree_of_transversality,
    distance_to_subspace,
    orthonormalize,
    project_onto_subspace,
    subspace_basis,
)
from .polytope import (
    Box,
    McEstimate,
    box_projection_volume,
    mc_shadow_volume,
    mc_slab_measure,
    slab_measure_bound,
)
from .separator import (
    BOX_CONSTANT,
    LINE_CONSTANT,
    NORM_CAP,
    RAW_MARGIN,
    ComplementResult,
    DecayFit,
    RejectionStats,
    SeparationCertificate,
    SubspaceFamily,
    adapt_basis,
    certify,
    common_complement,
    cube_complement,
    extend_superspace,
    fit_decay,
    hyperplane_complement,
    is_well_separating,
    line_min_norm,
    random_subspace_family,
    sample_box_separator,
    sample_cube_separator,
    truncate_l2_normals,
)
from .prevalence import (
    McConfig,
    McReport,
    ball_volume,
    det_slab_coefficient,
    inverse_bound_check,
    mc_bad_set_measure,
    mc_det_lower_bound,
    mc_inverse_bound,
    sample_ball,
    translated_span,
    translation_decay_ceiling,
    translation_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "CodimSubspace",
    "ConstructionError",
    "OrthonormalFrame",
    "SpanSubspace",
    "ValidationError",
    "degree_of_transversality",
    "distance_to_subspace",
    "orthonormalize",
    "project_onto_subspace",
    "subspace_basis",
    "Box",
    "McEstimate",
    "box_projection_volume",
    "mc_shadow_volume",
    "mc_slab_measure",
    "slab_measure_bound",
    "BOX_CONSTANT",
    "LINE_CONSTANT",
    "NORM_CAP",
    "RAW_MARGIN",
    "ComplementResult",
    "DecayFit",
    "RejectionStats",
    "SeparationCertificate",
    "SubspaceFamily",
    "adapt_basis",
    "certify",
    "common_complement",
    "cube_complement",
    "extend_superspace",
    "fit_decay",
    "hyperplane_complement",
    "is_well_separating",
    "line_min_norm",
    "random_subspace_family",
    "sample_box_separator",
    "sample_cube_separator",
    "truncate_l2_normals",
    "McConfig",
    "McReport",
    "ball_volume",
    "det_slab_coefficient",
    "inverse_bound_check",
    "mc_bad_set_measure",
    "mc_det_lower_bound",
    "mc_inverse_bound",
    "sample_ball",
    "translated_span",
    "translation_decay_ceiling",
    "translation_experiment",
    "__version__",
]
