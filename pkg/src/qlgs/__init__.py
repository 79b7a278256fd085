"""Ground states of the quasilinear Schrodinger equation

    -Delta u - u Delta(u^2) + omega u - |u|^(p-1) u = 0   in R^N

and spectral verification of their nondegeneracy: per-sector kernel
dimensions of the linearized operators, negativity and simplicity of the
lowest eigenvalue, the continuum threshold, and the integral identities the
profile must satisfy."""

__version__ = "0.1.0"

from .grid import GridFunction, RadialGrid, fd_derivative, make_grid, quad_weighted
from .ground_state import (
    GroundState,
    Params,
    SolverOptions,
    energy,
    find_ground_state,
    identity_residuals,
    pmax,
    shoot_ivp,
)
from .nls import NLSParams, aplus_spectrum_check, kwong_Q, weinstein
from .nondegeneracy import NondegeneracyReport, VerifyOptions, verify
from .shooting import BACKEND, IntegrationError, ShotOutcome, ShotTag, SolveError

__all__ = [
    "BACKEND",
    "GridFunction",
    "GroundState",
    "IntegrationError",
    "NLSParams",
    "NondegeneracyReport",
    "Params",
    "RadialGrid",
    "ShotOutcome",
    "ShotTag",
    "SolveError",
    "SolverOptions",
    "VerifyOptions",
    "aplus_spectrum_check",
    "energy",
    "fd_derivative",
    "find_ground_state",
    "identity_residuals",
    "kwong_Q",
    "make_grid",
    "pmax",
    "quad_weighted",
    "shoot_ivp",
    "verify",
    "weinstein",
]
