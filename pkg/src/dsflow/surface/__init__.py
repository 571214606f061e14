"""Radial graphs over the sphere: grids, geometry, integrals and monitors."""
from .field import (RadialField, cosine_modes_field, harmonic_modes_field, make_grid,
                    make_surface, random_modes_field, slice_field, validate_field)
from .geometry import Geometry, GeometryFrame, compute_geometry
from .grid import AxisymmetricGrid, LatLongGrid
from .integrals import (IntegralReport, integral_report, integrate_scalar, minkowski_residual,
                        monitors, quermassintegrals, weighted_integrals)

__all__ = [
    "AxisymmetricGrid", "Geometry", "GeometryFrame", "IntegralReport", "LatLongGrid",
    "RadialField", "compute_geometry", "cosine_modes_field", "harmonic_modes_field",
    "integral_report", "integrate_scalar", "make_grid", "make_surface", "minkowski_residual",
    "monitors", "quermassintegrals", "random_modes_field", "slice_field", "validate_field",
    "weighted_integrals",
]
