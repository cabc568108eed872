"""Spectra of transfer operators of expanding Blaschke products on the circle."""

__version__ = "0.1.0"

from .blaschke import (
    BlaschkeProduct,
    NotExpandingError,
    closed_form_spectrum,
    expansivity_check,
    fixed_points,
)
from .hardy import Annulus, AnnulusError, LaurentVector, admissible_annulus
from .transfer import transfer_matrix
from .adjoint import adjoint_block_matrix, adjoint_identity_residual, pairing_functional
from .spectral import convergence_study, cross_validate, match_spectrum, trace_diagnostic

__all__ = [
    "Annulus",
    "AnnulusError",
    "BlaschkeProduct",
    "LaurentVector",
    "NotExpandingError",
    "adjoint_block_matrix",
    "adjoint_identity_residual",
    "admissible_annulus",
    "closed_form_spectrum",
    "convergence_study",
    "cross_validate",
    "expansivity_check",
    "fixed_points",
    "match_spectrum",
    "pairing_functional",
    "trace_diagnostic",
    "transfer_matrix",
]
