"""Hyperbolic contraction bounds and landing of periodic rays of ``lam * exp(z)``."""

from .bounds import (KappaBound, PunctureLadder, density_bounds, distance_to_ladder, kappa_annulus,
                     kappa_contraction, kappa_deficit, puncture_ratio)
from .errors import (BranchMismatchError, DomainError, HypothesisError, NonContractionError,
                     NonConvergenceError, RaylanderError, RayOverflowError)
from .expfield import (ExpMap, PostsingularData, TractChart, inverse_branch, map_eval, postsingular,
                       preimage_ladder, real_fixed_points, refine_periodic_point)
from .hypgeo import ModelDomain, circle_length_punctured, density, distance, polyline_length
from .landing import LandingCertificate, classify, land_ray, pullback_segment
from .rays import (DiamStarEstimate, ExternalAddress, RaySegment, diamstar_upper,
                   fundamental_segment, ray_model, trace_ray)

__version__ = "0.1.0"
