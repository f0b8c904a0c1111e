"""Surface holonomy of 2-connections with values in Lie crossed modules.

Magnetic flux of monopoles on the two-chart sphere is computed as a surface
holonomy landing in the kernel of ``tau``, either by lifting a loop of
holonomies to the cover or by integrating the transported curvature.
"""
from .connection import LocalConnection, check_connection, gauge_transform, random_gauge_pair
from .crossed import (
    CoveringCrossedModule,
    FiniteCrossedModule,
    TwoMorphism,
    alpha_conjugacy_classes,
    horizontal_compose,
    reduced_group,
    vertical_compose,
)
from .errors import *  # noqa: F401,F403
from .geometry import Bigon, Path, SphereCover, arc, concat, reverse
from .liegroups import RealToU1, SU2ToSO3, SUnToPSUn, SUnxRToUn
from .monopoles import FluxReport, MonopoleConfig, catalog, magnetic_flux, make_config
from .surface import compare_methods, glued_sphere_integral, surface_holonomy_lift
from .transport import TransportConfig, loop_holonomy, path_transport

__version__ = "0.1.0"
