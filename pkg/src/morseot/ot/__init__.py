"""Optimal-transport-type distances between attributed measure networks."""

from .lp import AugmentedProblem, OTError, augment_with_virtual_node, emd, partial_emd
from .solvers import (
    KINDS,
    Coupling,
    DistanceResult,
    SolverConfig,
    distance,
    fused_gw,
    gromov_wasserstein,
    partial_distance,
    wasserstein,
)
