"""Separation-estimation toolkit: optimal measurement modes, Fisher information and Monte Carlo studies."""

from ._core import (
    Error,
    FisherCurve,
    ModeSet,
    PsfModel,
    build_adapted_modes,
    build_hermite_gauss_modes,
    build_sinc_closed_form_modes,
    cumulative_fisher,
    direct_imaging_fisher,
    fisher_curve,
    gaussian_psf,
    gram_matrix,
    plane_wave_fisher,
    quantum_fisher,
    run_study,
    sampled_psf,
    sinc_mode_closed_form,
    sinc_per_mode_fisher_closed,
    sinc_psf,
)

__all__ = [
    "Error",
    "FisherCurve",
    "ModeSet",
    "PsfModel",
    "build_adapted_modes",
    "build_hermite_gauss_modes",
    "build_sinc_closed_form_modes",
    "cumulative_fisher",
    "direct_imaging_fisher",
    "fisher_curve",
    "gaussian_psf",
    "gram_matrix",
    "plane_wave_fisher",
    "quantum_fisher",
    "run_study",
    "sampled_psf",
    "sinc_mode_closed_form",
    "sinc_per_mode_fisher_closed",
    "sinc_psf",
]
