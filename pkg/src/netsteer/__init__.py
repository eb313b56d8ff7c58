"""Steering criteria for star networks of bipartite sources."""

__version__ = "0.1.0"

from .assemblages import Assemblage, CorrelationTable, born_correlations, conditional_states
from .classical import FiniteLhsModel, FiniteLhvModel, lhv_bell_bound
from .criteria import (
    CriterionReport,
    LsiSpec,
    NonlinearSettings,
    eval_bell,
    eval_lsi,
    eval_nonlinear,
    eval_nonlinear_simplified,
    lsi_beta,
    sbm_decomposition_check,
)
from .errors import NetsteerError
from .measurements import QubitBinaryPOVM, jm_decompose, jm_pair_check
from .presets import preset
from .sampling import ShotPlan, estimate_criterion, sample
from .scenario import Scenario
from .states import DensityMatrix, StarNetworkState, star_state
