from . import flow
from . import integrators
from . import trajectory
from . import plots

from .flow import EquationsOfMotion, equations_of_motion
from .integrators import METHODS
from .trajectory import (
    CONFINED,
    ESCAPING,
    Trajectory,
    branch_extents,
    classify_z_extent,
    conservation_report,
    integrate,
    simulate_preset,
)

__all__ = [
    "flow",
    "integrators",
    "trajectory",
    "plots",
    "EquationsOfMotion",
    "equations_of_motion",
    "METHODS",
    "CONFINED",
    "ESCAPING",
    "Trajectory",
    "branch_extents",
    "classify_z_extent",
    "conservation_report",
    "integrate",
    "simulate_preset",
]
