"""Numerical laboratory for constant-angle convex billiards.

Submodules:
    support_geometry  -- supporting functions, constant-angle tables, roots
    billiard2d        -- planar billiard map, generating function, rigidity
    billiard_nd       -- ellipsoid billiards in R^d, gradient contract, twist
    geodesic_chords   -- geodesics, Frenet data, constant-angle chord curves
    cli               -- command-line front end
"""

from .errors import GutkinError
from .support_geometry import (GutkinTable, SupportCurve, TrigPolynomial,
                               build_gutkin_table, check_constant_width,
                               circle, solve_gutkin_angles, support_from_radius)
from .billiard2d import (OrientedLine2D, Strip, reflect_geometric,
                         reflect_variational, rigidity_integral,
                         rigidity_integral_closed, verify_constant_angle)
from .billiard_nd import (OrientedLineND, Quadric, gradient_contract_residual,
                          reflect_nd, sphere_quadric)
from .geodesic_chords import (ImplicitSurface, chord_correspondence,
                              ellipsoid_surface, frenet_apparatus,
                              integrate_geodesic, sphere_surface)

__all__ = [
    "GutkinError", "GutkinTable", "SupportCurve", "TrigPolynomial",
    "build_gutkin_table", "check_constant_width", "circle",
    "solve_gutkin_angles", "support_from_radius",
    "OrientedLine2D", "Strip", "reflect_geometric", "reflect_variational",
    "rigidity_integral", "rigidity_integral_closed", "verify_constant_angle",
    "OrientedLineND", "Quadric", "gradient_contract_residual", "reflect_nd",
    "sphere_quadric",
    "ImplicitSurface", "chord_correspondence", "ellipsoid_surface",
    "frenet_apparatus", "integrate_geodesic", "sphere_surface",
]

__version__ = "0.1.0"
