"""Checks of the extended-recurrence structure and its consequences."""
from .concircular import ConcircularFit, chen_vector, concircular_coefficients, concircular_fit
from .fluid import KAPPA, FluidState, TimelikeError, fluid_extract, normalize_timelike, quasi_einstein_fit
from .identities import (
    IDENTITIES,
    IdentityReport,
    identity_suite,
    riemann_symmetry_residuals,
    weyl_norm,
    weyl_trace_residual,
)
from .qcc import NullCovectorError, qcc_riemann, quasi_einstein_a, quasi_einstein_b, synth_qcc
from .recurrence import (
    DERIVED,
    RecurrenceFit,
    derived_identities,
    design_matrix,
    fit_recurrence,
    fit_recurrence_pack,
    fit_recurrence_tensors,
    psi_gradient_check,
    random_curvature_tensor,
    random_metric,
    recovery_error,
    recurrence_rhs,
)

__all__ = [
    "ConcircularFit", "chen_vector", "concircular_coefficients", "concircular_fit",
    "KAPPA", "FluidState", "TimelikeError", "fluid_extract", "normalize_timelike", "quasi_einstein_fit",
    "IDENTITIES", "IdentityReport", "identity_suite", "riemann_symmetry_residuals", "weyl_norm",
    "weyl_trace_residual",
    "NullCovectorError", "qcc_riemann", "quasi_einstein_a", "quasi_einstein_b", "synth_qcc",
    "DERIVED", "RecurrenceFit", "derived_identities", "design_matrix", "fit_recurrence", "fit_recurrence_pack",
    "fit_recurrence_tensors", "psi_gradient_check", "random_curvature_tensor", "random_metric",
    "recovery_error", "recurrence_rhs",
]
