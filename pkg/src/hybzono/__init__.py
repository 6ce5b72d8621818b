"""Set-valued state estimation with hybrid zonotopes."""

from .errors import (DimensionError, EmptySetError, HybZonoError,
                     InconsistencyError, InvalidInputError, LeafCapError,
                     SolverError, TrainingError, UncertifiedError)
from .sets import (HybridZonotope, VPolyUnion, cartesian_product,
                   generalized_intersection, halfspace_intersection,
                   interval_box, interval_hull, linear_map, minkowski_sum,
                   point_set, sos_to_hybzono, zonotope)
from .simplex import LpProblem, LpResult, lp_solve, NUMBA_ENABLED
from .solver import (LeafSet, bounds, contains_point, containment_witness,
                     count_regions, enumerate_leaves, find_point, is_empty,
                     leaf_polygon_2d, support)
from .functions import (FunctionHandle, builtin_handle, inverse_handle,
                        sources_handle, square_handle)
from .approx import (IOSet, ReluNetwork, SOSApprox, affine_graph_ioset,
                     build_m1, build_m3, load_ioset, load_relu, load_sos,
                     max_error_bound, optimize_breakpoints, relu_to_ioset,
                     save_ioset, save_relu, save_sos, sos_eval, sos_to_ioset,
                     train_relu)
from .estimation import (EstimatorState, MeasurementModel, PlantModel,
                         StepRecord, dynamic_update, input_set, load_scenario,
                         measurement_consistent_set, measurement_update,
                         output_set, run_estimator)

__version__ = "0.1.0"
