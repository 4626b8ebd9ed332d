"""Echo State Network readouts trained by Tikhonov least squares on ergodic systems."""

from .dynsys import (
    LorenzParams,
    LorenzState,
    ScalarSeries,
    birkhoff_average,
    logistic_orbit,
    lorenz_rhs,
    lorenz_trajectory,
    observe,
    rk4_step,
    rotation_orbit,
)
from .experiment import (
    ExperimentRow,
    StudyConfig,
    clt_scaling,
    convergence_study,
    multi_seed_study,
    pca_project,
    train_readout,
)
from .forecast import AutonomousRun, DivergenceError, autonomous_run, handoff_state
from .reservoir import Esn, EsnParams, StateTrajectory, drive, esp_gap, make_esn, spectral_norm, step
from .ridge import (
    NormalEqAccumulator,
    ReadoutWeights,
    SingularMatrixError,
    accumulate,
    merge,
    readout_error,
    ridge_svd,
    rmse,
    solve_normal,
)

__version__ = "0.1.0"
