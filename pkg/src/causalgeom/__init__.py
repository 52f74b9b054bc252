"""Causal geometry of Minkowski space: regions, causal complements, localization and JLD checks."""
from .minkowski import CausalClass, DimensionError, classify
from .window import GridWindow
from .regions import (CausalComplement, ConeComplement, DoubleCone, Empty, Full, HalfSpace,
                      Intersection, LightlikeHalfPlane, PointSet, Sampled, Shell, TimeSlice,
                      Translate, Union, Wedge)
from .causal_ops import (PreconditionError, PredicateReport, asgeirsson_hull,
                         causal_complement, causal_completion, is_asgeirsson_complete,
                         is_causally_complete, is_jld_region, is_timelike_convex)
from .dsl import parse_region, print_region

__version__ = "0.1.0"
