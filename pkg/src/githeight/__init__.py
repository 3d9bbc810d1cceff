"""GIT heights of zero-cycles and hyperplane arrangements over Q."""

__version__ = "0.1.0"

from .configuration import Configuration
from .decompose import BasisDecomposition, decompose, stable_witness_split
from .duality import dual_constant, hyperplane_height
from .heights import HeightEstimate, HeightOptions, global_height, subadditivity_check
from .stability import Status, StabilityVerdict, UnstableError, check_stability

__all__ = [
    "BasisDecomposition",
    "Configuration",
    "HeightEstimate",
    "HeightOptions",
    "StabilityVerdict",
    "Status",
    "UnstableError",
    "check_stability",
    "decompose",
    "dual_constant",
    "global_height",
    "hyperplane_height",
    "stable_witness_split",
    "subadditivity_check",
]
