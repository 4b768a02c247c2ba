from .metric import (
    EnclosingRadii,
    FiniteMetricSpace,
    SegmentQuery,
    ValidationReport,
    delta_segment,
    excess,
    min_enclosing_radii,
    segment,
    stabilization_gap,
    subset_line_check,
    validate,
)
from .flow import PIVOT_ENV, PIVOT_RULES, TransportPlan, solve_transport
from .free import (
    FreeElement,
    LipschitzFunction,
    MoleculeTerm,
    NormCertificate,
    as_molecule,
    combine,
    envelope,
    lipschitz_constant,
    mcshane_extend,
    molecule,
    norm,
    pairing,
    presentation_matches,
    require_unit_norm,
)
