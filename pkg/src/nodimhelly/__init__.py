"""No-dimensional Helly and Caratheodory computations in l_p spaces."""
from .caratheodory import CaratheodoryRun, caratheodory_error_curve, greedy_caratheodory
from .errors import (ContractError, DomainError, InputError, NodimError, PreconditionError,
                     SolverError)
from .geometry import (BallTest, NearestPointResult, Tolerances, contains, distance,
                       intersects_ball, nearest_point, nearest_point_intersection)
from .helly import (Certificate, CenterpointResult, FractionalReport, Witness, centerpoint,
                    colorful_search, fractional_verify, helly_search, verify_outcome)
from .kernels import BACKEND
from .moduli import (Budget, ModulusTable, check_convexity_equivalence,
                     check_smoothness_equivalence, delta, modulus_table, rho, zeta_minus,
                     zeta_plus)
from .sequences import (EuclideanZeta, PiecewiseLinearZeta, PowerTypeBoundParams,
                        RadiusSequence, Rk_sequence, caratheodory_radii, helly_radii,
                        rk_power_bound, rk_sequence)
from .sets import Ball, Halfspace, Hull, Polytope, set_from_dict
from .space import SpaceSpec, dual_norm, is_quasi_orthogonal, norm, norming_functional
from .verifier import (CheckReport, check_max_deviation, check_min_deviation_lemma,
                       check_sequence_corollary, check_supporting_deviation, run_selfcheck)

__version__ = "0.1.0"
