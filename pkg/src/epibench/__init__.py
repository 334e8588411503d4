"""SI/SIR epidemic models solved with Euler, RK4 and predictor-corrector.

Accuracy is scored with R^2 against the closed-form SI solution or an
adaptive Dormand-Prince reference; run-times are measured on compiled
(Cython) or pure-Python stepping kernels.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    EpibenchError,
    GridError,
    GridMismatchError,
    MaxStepsExceededError,
    NonFiniteStateError,
    NumericalFailure,
    StepSizeUnderflowError,
)
from .integrators import (
    METHODS,
    Grid,
    RkStageBuffer,
    Trajectory,
    euler_solve,
    make_grid,
    pc_solve,
    rk4_solve,
    rk4_stages,
)
from .kernels import DEFAULT_BACKEND, available_backends, simulate
from .metrics import R2Report, compare_trajectories, r_squared
from .models import (
    SiParams,
    SiState,
    SirParams,
    SirState,
    default_initial_state,
    default_params,
    si_exact,
    si_exact_values,
    si_rhs,
    sir_rhs,
)
from .refsolver import AdaptiveConfig, DenseSolution, reference_solve, sample
