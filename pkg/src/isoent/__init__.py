"""Iso-entangled two-qubit bases: families, local equivalence, triangle networks."""

from .config import TOL, Tolerances
from .equivalence import EquivalenceReport, NotIsoEntangled, classify, fit_to_general
from .families import (
    BSM_PARAMS,
    EJM_PARAMS,
    I5,
    Basis,
    Bell,
    BellCanonical,
    Elegant,
    General,
    GeneralOrthParams,
    PhaseInfeasible,
    SingularConstraint,
    SkewedProduct,
    closed_form_tangle,
    gen_family,
    gen_general,
    iso_residuals,
    is_iso_entangled,
)
from .linalg import tangle, tangles
from .network import TriangleConfig, opi_summary, triangle_distribution
from .oracle import (
    CanonicalizationResult,
    DegenerateSubspace,
    NonConvergence,
    canonicalize,
    product_state_in_span,
    random_basis,
    solve_iso_basis,
)

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "EquivalenceReport",
    "NotIsoEntangled",
    "classify",
    "fit_to_general",
    "BSM_PARAMS",
    "EJM_PARAMS",
    "I5",
    "Basis",
    "Bell",
    "BellCanonical",
    "Elegant",
    "General",
    "GeneralOrthParams",
    "PhaseInfeasible",
    "SingularConstraint",
    "SkewedProduct",
    "closed_form_tangle",
    "gen_family",
    "gen_general",
    "iso_residuals",
    "is_iso_entangled",
    "tangle",
    "tangles",
    "TriangleConfig",
    "opi_summary",
    "triangle_distribution",
    "CanonicalizationResult",
    "DegenerateSubspace",
    "NonConvergence",
    "canonicalize",
    "product_state_in_span",
    "random_basis",
    "solve_iso_basis",
]
