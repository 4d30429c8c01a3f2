"""Certified perturbation bounds for singular subspaces."""

from ._svdpert import (
    ConvergenceError,
    DimensionError,
    Error,
    NotHermitianError,
    PreconditionError,
    SingularProblemError,
    VerificationError,
    bound,
    canonical_angles,
    coupled_bounds,
    equality_witness,
    footnote_distance,
    gen_instance,
    interlace_check,
    pair_norm,
    sin_theta,
    singular_values,
    solve_coupled,
    svd,
    ui_norm,
)

__version__ = "1.0.0"
