"""Dirichlet-Neumann operators for quasiperiodic Laplace problems by
high-order perturbation of surfaces (OE, FE, TFE) with Taylor and Pade
summation."""

__version__ = "0.1.0"

from .lattice import ConfigurationError, LatticeSpec, ModeSet, wavenumber
from .fields import SurfaceField, VolumeField
from .bvp import ModeBvp, TransparentOperator, solve_mode
from .hops import (
    DnoExpansion,
    PerturbationProblem,
    ResolutionWarning,
    UnsupportedConfiguration,
    expand,
    fe_expand,
    oe_expand,
    tfe_expand,
)
