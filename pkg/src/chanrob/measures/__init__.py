"""Robustness measures, negativities, hierarchy classifier, monotone harness."""
from .hierarchy import HierarchyVerdict, classify_depolarizing
from .macrorealism import lhv_membership, non_macrorealism_robustness
from .memory import quantum_memory_robustness
from .monotone import MonotoneReport, monotone_harness
from .negativity import channel_negativity, diamond_norm_hermitian, temporal_negativity
from .result import MeasureError, RobustnessResult, digest_arrays
from .steering import (
    incompatibility_robustness,
    jm_feasibility,
    jm_robustness,
    lhs_membership,
    non_sb_robustness,
    steering_robustness,
    steering_robustness_dual,
)

__all__ = [
    "HierarchyVerdict",
    "MeasureError",
    "MonotoneReport",
    "RobustnessResult",
    "channel_negativity",
    "classify_depolarizing",
    "diamond_norm_hermitian",
    "digest_arrays",
    "incompatibility_robustness",
    "jm_feasibility",
    "jm_robustness",
    "lhs_membership",
    "lhv_membership",
    "monotone_harness",
    "non_macrorealism_robustness",
    "non_sb_robustness",
    "quantum_memory_robustness",
    "steering_robustness",
    "steering_robustness_dual",
    "temporal_negativity",
]
