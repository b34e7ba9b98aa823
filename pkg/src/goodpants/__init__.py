"""Good-pants construction pipeline for closed hyperbolic 3-manifolds.

Enumerates good curves and pants from a matrix group, computes feet and
half-lengths, glues pants into closed surfaces via Hall matching, makes
surfaces connected via covers and regluing surgery, measures barycenter
statistics against a chart-restricted Haar target, and evaluates the
closed-form normal-flow Jacobians.
"""

from .moebius import (
    Frame,
    Geodesic,
    GroupElement,
    NotLoxodromic,
    ProjPoint,
    SharedEndpoint,
    complex_distance,
    complex_translation_length,
    right_act,
    rotation,
    translation,
)

__version__ = "0.1.0"

__all__ = [
    "Frame",
    "Geodesic",
    "GroupElement",
    "NotLoxodromic",
    "ProjPoint",
    "SharedEndpoint",
    "complex_distance",
    "complex_translation_length",
    "right_act",
    "rotation",
    "translation",
    "__version__",
]
