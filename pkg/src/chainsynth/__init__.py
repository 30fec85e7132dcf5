"""Gate synthesis for a disordered always-on Heisenberg spin chain.

Searches the (E1, E2, E3, tau) control space of a three-qubit chain
segment for evolutions that decouple the middle qubit, classifies the
resulting two-qubit gates by their canonical angles, and compiles
arbitrary two-qubit canonical classes into switching profiles.
"""

__version__ = "0.1.0"

from chainsynth.hamiltonian import (
    ControlPoint,
    CouplingPair,
    OnSiteEnergies,
    build_full_h,
    build_n,
    build_u,
    build_v,
    leakage,
    objective,
)
from chainsynth.canonical import (
    CanonicalClass,
    canonical_angles,
    is_zz_class,
    local_rotation,
    makhlin_invariants,
)

__all__ = [
    "CanonicalClass",
    "ControlPoint",
    "CouplingPair",
    "OnSiteEnergies",
    "build_full_h",
    "build_n",
    "build_u",
    "build_v",
    "canonical_angles",
    "is_zz_class",
    "leakage",
    "local_rotation",
    "makhlin_invariants",
    "objective",
]
