"""Successive centralized circumcentered-reflection method for convex feasibility."""
from ._kernels import BACKEND
from .circum import (ccrm_operator_T, central_op_Zbar, circumcenter, is_centralized,
                     seq_op_Z, simul_op_Ztilde, supporting_halfspaces)
from .controls import make_policy, select_pair, verify_window_coverage
from .diagnostics import estimate_rates, fejer_certify, limit_surrogate
from .exceptions import (CCRMError, ConfigurationError, DegenerateCircumcenterError,
                         DimensionError, GenerationError, InvalidSetError, ProjectionError,
                         SolverError)
from .generate import EllipsoidGenConfig, GeneratedInstance, generate_instance
from .sets import (AffineSubspace, Ball, Box, ConvexSet, Ellipsoid, FeasibilityProblem,
                   Halfspace, Sublevel, membership, project, reflect)
from .solvers import IterationTrace, SolverConfig, residual, solve

__version__ = "0.1.0"
