"""Numerical checks for the monotone Lagrangian torus in T*S^2 swept out by the geodesic flow."""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .maslov import (  # noqa: E402
    DiskKind,
    LagrangianPlaneLoop,
    build_filling,
    disk_maslov_index,
    expected_dimension,
    maslov_index,
    monotonicity_check,
    symplectic_area,
)
from .morse import (  # noqa: E402
    MorseComplex,
    MorseFunctionSpec,
    critical_points,
    homology,
    morse_differential,
)
from .sphere import CotangentPoint, TangentVector, canonical_one_form, project_to_cotangent, symplectic_form  # noqa: E402
from .torus import FrameAtNorthPole, TorusPoint, geodesic_flow, torus_embed, verify_lagrangian  # noqa: E402

__all__ = [
    "BACKEND",
    "CotangentPoint",
    "DiskKind",
    "FrameAtNorthPole",
    "LagrangianPlaneLoop",
    "MorseComplex",
    "MorseFunctionSpec",
    "TangentVector",
    "TorusPoint",
    "build_filling",
    "canonical_one_form",
    "critical_points",
    "disk_maslov_index",
    "expected_dimension",
    "geodesic_flow",
    "homology",
    "maslov_index",
    "monotonicity_check",
    "morse_differential",
    "project_to_cotangent",
    "symplectic_area",
    "symplectic_form",
    "torus_embed",
    "verify_lagrangian",
]
