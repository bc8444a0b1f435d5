"""Exact metric constructions on finite spaces.

Finite metric spaces with rational distances, and the constructions that
combine them: quotients by chain metrics, glued unions and adjunctions,
cones, joins and mapping cylinders over parameter grids, cover calculus
with an exact metrization, embeddings into weighted sequence space,
cubical complexes with retraction homotopies, and inverse-sequence
truncations with convergence, separation, and perturbation analysis.

All arithmetic is exact (fractions); floats appear only in the Euclidean
cone comparison, which is explicitly tolerance-based.
"""

from .combinators import (
    disjoint_union_metric,
    hausdorff_distance,
    hausdorff_hyperspace,
    kuratowski_embed,
    mcshane_extend,
    product_metric,
    weighted_sup_metric,
)
from .cones import (
    ConeSpace,
    JoinAmalgamReport,
    JoinSpace,
    cone_metric,
    cone_quotient_check,
    interval_space,
    join_amalgam_equality,
    join_metric,
)
from .conemodels import (
    ConeComparisonReport,
    NormedPointSet,
    cone_comparison_bounds,
    euclidean_cone_metric,
    rectilinear_cone,
)
from .covers import (
    AuMetrization,
    Cover,
    FundamentalSequence,
    LebesgueNumber,
    RefinementResult,
    au_metrize,
    ball_cover,
    ball_fundamental_sequence,
    lebesgue_number,
    point_finite_refinement,
    validate_fundamental_sequence,
)
from .cubohedra import (
    Cube,
    Cubohedron,
    RetractionReport,
    distance_to_complex,
    lattice_homotopy,
    minimal_enclosing_subcomplex,
    neighborhood_retract_check,
    subcomplex_membership,
)
from .cylinders import (
    CylinderSpace,
    adjusted_metric,
    cylinder_adjunction_check,
    mapping_cylinder_metric,
    uniform_modulus,
)
from .embedding import (
    AharoniEmbedding,
    EmbeddingCertificate,
    aharoni_embed,
    sufficient_depth,
)
from .errors import PreconditionError, StructuralError
from .gluing import AdjunctionResult, adjunction_space, extend_metric
from .invlim import (
    CauchyAnchorVerdict,
    InverseSequenceTruncation,
    LadderData,
    MittagLefflerReport,
    PerturbationReport,
    SeparationIndexResult,
    Telescope,
    Thread,
    ThreadSpace,
    cauchy_report,
    cauchy_row,
    convergence_report,
    convergence_row,
    inverse_sequence,
    ladder,
    level_anchor_verdict,
    level_shadow_reached,
    mittag_leffler_report,
    perturbation_limit,
    separation_index,
    telescope_metric,
    thread_space,
    threads,
)
from .moduli import ModulusTable, check_uniform_continuity, continuity_modulus
from .quotients import (
    ChainMetric,
    QuotientResult,
    Surjection,
    amalgamated_union,
    block_distance,
    chain_metric,
    glue_parts,
    quotient_by_discrete_family,
)
from .scalars import Scalar, as_scalar, format_scalar, pow2
from .sequences import SequencePoint
from .spaces import (
    AxiomReport,
    FiniteMetricSpace,
    check_metric_axioms,
    ensure_diameter_at_most,
    ensure_metric,
)

__all__ = [
    "AdjunctionResult",
    "AharoniEmbedding",
    "AuMetrization",
    "AxiomReport",
    "CauchyAnchorVerdict",
    "ChainMetric",
    "ConeComparisonReport",
    "ConeSpace",
    "Cover",
    "Cube",
    "Cubohedron",
    "CylinderSpace",
    "EmbeddingCertificate",
    "FiniteMetricSpace",
    "FundamentalSequence",
    "InverseSequenceTruncation",
    "JoinAmalgamReport",
    "JoinSpace",
    "LadderData",
    "LebesgueNumber",
    "MittagLefflerReport",
    "ModulusTable",
    "NormedPointSet",
    "PerturbationReport",
    "PreconditionError",
    "QuotientResult",
    "RefinementResult",
    "RetractionReport",
    "Scalar",
    "SeparationIndexResult",
    "SequencePoint",
    "StructuralError",
    "Surjection",
    "Telescope",
    "Thread",
    "ThreadSpace",
    "adjunction_space",
    "adjusted_metric",
    "aharoni_embed",
    "amalgamated_union",
    "as_scalar",
    "au_metrize",
    "ball_cover",
    "ball_fundamental_sequence",
    "block_distance",
    "cauchy_report",
    "cauchy_row",
    "chain_metric",
    "check_metric_axioms",
    "check_uniform_continuity",
    "cone_comparison_bounds",
    "cone_metric",
    "cone_quotient_check",
    "continuity_modulus",
    "convergence_report",
    "convergence_row",
    "cylinder_adjunction_check",
    "disjoint_union_metric",
    "distance_to_complex",
    "ensure_diameter_at_most",
    "ensure_metric",
    "euclidean_cone_metric",
    "extend_metric",
    "format_scalar",
    "glue_parts",
    "hausdorff_distance",
    "hausdorff_hyperspace",
    "interval_space",
    "inverse_sequence",
    "kuratowski_embed",
    "join_amalgam_equality",
    "join_metric",
    "ladder",
    "lattice_homotopy",
    "lebesgue_number",
    "level_anchor_verdict",
    "level_shadow_reached",
    "mapping_cylinder_metric",
    "mcshane_extend",
    "minimal_enclosing_subcomplex",
    "mittag_leffler_report",
    "neighborhood_retract_check",
    "perturbation_limit",
    "point_finite_refinement",
    "pow2",
    "product_metric",
    "quotient_by_discrete_family",
    "rectilinear_cone",
    "separation_index",
    "subcomplex_membership",
    "sufficient_depth",
    "telescope_metric",
    "thread_space",
    "threads",
    "uniform_modulus",
    "validate_fundamental_sequence",
    "weighted_sup_metric",
]
