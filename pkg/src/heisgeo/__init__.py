"""Geometry of surfaces in the Heisenberg group H3 with its left-invariant metric."""
from .ambient import FrameVec3, Point3, CoordVec3
from .catalog import CatalogSurface
from .scalar_field import AnalyticField, Domain2, GridField, Jet2

__all__ = [
    "AnalyticField",
    "CatalogSurface",
    "CoordVec3",
    "Domain2",
    "FrameVec3",
    "GridField",
    "Jet2",
    "Point3",
]
__version__ = "0.1.0"
