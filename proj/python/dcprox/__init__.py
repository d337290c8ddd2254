"""Double-proximal splitting for difference-of-convex image restoration."""

from ._dcprox import (
    LinearOperator,
    cross_norm,
    degrade,
    discrete_gradient,
    fit_rate,
    gaussian_blur,
    isnr,
    prox_aniso_tv,
    prox_crossnorm_conj,
    prox_scad_conj,
    prox_scad_conj_scalar,
    prox_zhang_conj,
    prox_zhang_conj_scalar,
    scad_h_value,
    scad_value,
    solve,
    synthetic_texture,
    zhang_h_value,
    zhang_value,
)

__version__ = "0.1.0"

__all__ = [
    "LinearOperator",
    "cross_norm",
    "degrade",
    "discrete_gradient",
    "fit_rate",
    "gaussian_blur",
    "isnr",
    "prox_aniso_tv",
    "prox_crossnorm_conj",
    "prox_scad_conj",
    "prox_scad_conj_scalar",
    "prox_zhang_conj",
    "prox_zhang_conj_scalar",
    "scad_h_value",
    "scad_value",
    "solve",
    "synthetic_texture",
    "zhang_h_value",
    "zhang_value",
]
