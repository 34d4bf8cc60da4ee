"""Fundamental solutions of the bi-axially symmetric Helmholtz equation and
the confluent hypergeometric function A2 they are built from."""

from .a2 import (
    A2Params,
    A2Point,
    a2_auto,
    a2_derivative,
    a2_direct,
    a2_expanded,
    a2_integral,
    a2_regularized,
    a2_via_f2,
    omega,
    omega_partial,
)
from .errors import (
    BiaxError,
    CoincidentPoints,
    ConfigError,
    DimensionMismatch,
    DomainError,
    FitDegenerate,
    NonConvergence,
    PoleError,
    StepTooLarge,
)
from .fundsol import HelmholtzParams, KernelSpec, apply_constructive, geometry, kernel_field, q
from .hypergeom import GaussParams, appell_f2_direct, appell_f2_expanded, gauss_2f1, pochhammer
from .series import DEFAULT_OPTIONS, EvalResult, Representation, SeriesOptions

__all__ = [name for name in dir() if not name.startswith("_")]
