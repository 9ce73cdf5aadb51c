"""Exact boundary-symbol calculus and Heisenberg model operators.

The package computes, at a fixed boundary point, the symbols attached to the
chiral halves of a Dirac-type complex on a strictly convex or concave
boundary: the tangential first-order symbol, the boundary-value projection
symbols obtained by exact contour integration, the classical comparison
operators with their ellipticity analysis off the contact ray, and the
truncated oscillator models of the same operators along the contact
directions, together with their explicit inverses and deformed-vacuum
corrections.
"""

from .config import SuiteConfig, parse_config
from .dirac import GeometryData
from .scalars import ScalarExt

__version__ = "0.1.0"

__all__ = ["GeometryData", "ScalarExt", "SuiteConfig", "parse_config", "__version__"]
