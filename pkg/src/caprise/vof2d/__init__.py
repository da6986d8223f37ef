"""Compact 2D geometric-VOF two-phase solver for the half-gap rise problem.

Staggered MAC grid, explicit Euler with Chorin projection, PLIC volume
advection with directional splitting, height-function curvature with a
ghost-cell contact angle, CSF surface tension, numerical- or Navier-slip
walls.
"""

from .geometry import Grid, SimState, apex_height, init_case
from .plic import PlicPlane, liquid_area, offset_for_area, plic_reconstruct, \
    youngs_normal
from .curvature import contact_angle_ghost, curvature_height_function
from .solver import CaseSetup2D, Simulator, compute_dt, run

__all__ = [
    "CaseSetup2D",
    "Grid",
    "PlicPlane",
    "SimState",
    "Simulator",
    "apex_height",
    "compute_dt",
    "contact_angle_ghost",
    "curvature_height_function",
    "init_case",
    "liquid_area",
    "offset_for_area",
    "plic_reconstruct",
    "run",
    "youngs_normal",
]
