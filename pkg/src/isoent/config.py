"""Numerical tolerances shared across the package."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # physical assertions (tangles, iso-entanglement, probabilities)
    physical: float = 1e-10
    # algebraic identities (orthonormality of closed-form constructions)
    algebraic: float = 1e-12
    # Gram-cost acceptance for fits into the General family
    fit_exact: float = 1e-12
    fit_numerical: float = 1e-8
    # geometric signatures and local-unitary alignment
    geometric: float = 1e-8


TOL = Tolerances()


def with_overrides(**kwargs) -> Tolerances:
    """Return a copy of the default tolerances with some fields replaced."""
    return replace(TOL, **kwargs)
