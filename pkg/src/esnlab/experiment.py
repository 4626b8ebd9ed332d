"""Lorenz xi -> zeta regression experiments and ergodic-average probes."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import dynsys
from .dynsys import DEFAULT_INITIAL_STATE, LorenzParams, LorenzState
from .forecast import AutonomousRun, autonomous_run, next_step_pairs
from .reservoir import DEFAULT_WASHOUT, Esn, EsnParams, drive, make_esn
from .ridge import ReadoutWeights, readout_error, ridge_svd, rmse, scale_lambda
from .rng import Xoshiro256pp

CLT_BURN_IN = 1000

OBSERVABLES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda x: x,
    "square": np.square,
    "sin2pi": lambda x: np.sin(2.0 * np.pi * x),
    "constant": np.ones_like,
}


def guide_we(ell) -> float:
    return 45.0 / math.sqrt(ell)


def guide_rmse(ell) -> float:
    return 150.0 / math.sqrt(ell)


@dataclass(frozen=True)
class StudyConfig:
    lorenz: LorenzParams = LorenzParams()
    initial_state: LorenzState = DEFAULT_INITIAL_STATE
    tau: float = 0.01
    esn: EsnParams = EsnParams()
    lam: float = 1e-9
    lambda_convention: str = "raw"
    washout: int = DEFAULT_WASHOUT
    ell_grid: tuple[int, ...] = tuple(range(300, 4001, 100))
    eval_length: int = 20_000
    ref_length: int = 20_000
    seeds: tuple[int, ...] = tuple(range(10))

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.washout < 0:
            raise ValueError("washout must be >= 0")
        if not self.ell_grid or min(self.ell_grid) < 1:
            raise ValueError("ell_grid must contain positive lengths")
        if max(self.ell_grid) > self.ref_length:
            raise ValueError("ell_grid may not exceed ref_length")
        if not 1 <= self.eval_length <= self.ref_length:
            raise ValueError("eval_length must lie in [1, ref_length]")
        if not self.seeds:
            raise ValueError("need at least one seed")

    def raw_lambda(self, ell: int) -> float:
        return scale_lambda(self.lam, ell, self.lambda_convention)


class ExperimentRow(NamedTuple):
    ell: int
    seed: int
    we: float
    rmse: float


class PcaResult(NamedTuple):
    scores: np.ndarray
    singular_values: np.ndarray
    components: np.ndarray


def lorenz_data(cfg: StudyConfig, n_samples: int) -> np.ndarray:
    """Trajectory with ``washout + n_samples`` states starting at the initial condition."""
    return dynsys.lorenz_trajectory(cfg.initial_state, cfg.lorenz, cfg.washout + n_samples - 1, cfg.tau)


def build_esn(cfg: StudyConfig, seed: int) -> Esn:
    return make_esn(replace(cfg.esn, master_seed=seed))


def driven_pairs(cfg: StudyConfig, esn: Esn, traj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Post-washout reservoir states driven by xi, paired with zeta at the same index."""
    xi = dynsys.observe(traj, "xi", cfg.tau)
    zeta = dynsys.observe(traj, "zeta", cfg.tau).values
    states = drive(esn, xi, None, cfg.washout).states
    return states, zeta[cfg.washout:]


def _fit(cfg: StudyConfig, X: np.ndarray, u: np.ndarray, ell: int) -> ReadoutWeights:
    return ridge_svd(X[:ell], u[:ell], cfg.raw_lambda(ell))


def train_readout(cfg: StudyConfig, ell: int, seed: int, traj: np.ndarray | None = None) -> ReadoutWeights:
    """Fit the xi -> zeta readout on the first ``ell`` post-washout pairs."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if traj is None:
        traj = lorenz_data(cfg, ell)
    X, u = driven_pairs(cfg, build_esn(cfg, seed), traj)
    if X.shape[0] < ell:
        raise ValueError(f"trajectory supplies {X.shape[0]} pairs, need {ell}")
    return _fit(cfg, X, u, ell)


def train_and_predict(cfg: StudyConfig, ell: int, seed: int, eval_length: int | None = None):
    """Fit on ``ell`` pairs and predict the first ``eval_length`` pairs.

    Returns ``(readout, predictions, targets)``.
    """
    eval_length = cfg.eval_length if eval_length is None else eval_length
    traj = lorenz_data(cfg, max(ell, eval_length))
    X, u = driven_pairs(cfg, build_esn(cfg, seed), traj)
    W = _fit(cfg, X, u, ell)
    return W, W.predict(X[:eval_length]), u[:eval_length]


def convergence_study(cfg: StudyConfig, seed: int | None = None, traj: np.ndarray | None = None) -> list[ExperimentRow]:
    """WE and RMSE of readouts fitted on each ``ell`` in the grid, for one seed.

    The reference readout is fitted on ``ref_length`` pairs; RMSE is measured
    over the first ``eval_length`` pairs of that same trajectory.
    """
    seed = cfg.seeds[0] if seed is None else seed
    if traj is None:
        traj = lorenz_data(cfg, cfg.ref_length)
    X, u = driven_pairs(cfg, build_esn(cfg, seed), traj)
    X, u = X[: cfg.ref_length], u[: cfg.ref_length]
    W_inf = _fit(cfg, X, u, cfg.ref_length)
    X_eval, u_eval = X[: cfg.eval_length], u[: cfg.eval_length]
    rows = []
    for ell in sorted(set(cfg.ell_grid)):
        W = W_inf if ell == cfg.ref_length else _fit(cfg, X, u, ell)
        rows.append(ExperimentRow(ell, seed, readout_error(W, W_inf), rmse(W, X_eval, u_eval)))
    return rows


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ESNLAB_THREADS, where 0 means one per CPU."""
    if threads is None:
        threads = int(os.environ.get("ESNLAB_THREADS", "0") or 0)
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def multi_seed_study(cfg: StudyConfig, threads: int | None = None) -> list[ExperimentRow]:
    """Convergence study for every seed over one shared Lorenz trajectory.

    Rows are sorted by (ell, seed). Seeds run as independent tasks, so the
    result does not depend on the worker count.
    """
    traj = lorenz_data(cfg, cfg.ref_length)
    traj.setflags(write=False)
    seeds = sorted(set(cfg.seeds))
    workers = min(resolve_threads(threads), len(seeds))
    if workers == 1:
        per_seed = [convergence_study(cfg, s, traj) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(lambda s: convergence_study(cfg, s, traj), seeds))
    return sorted((row for rows in per_seed for row in rows), key=lambda r: (r.ell, r.seed))


def pca_project(states, k: int = 3) -> PcaResult:
    """Project column-centred states onto their top ``k`` principal directions."""
    X = np.asarray(states, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("states must be a 2-D array")
    if not 1 <= k <= min(X.shape):
        raise ValueError(f"k={k} must lie in [1, {min(X.shape)}]")
    Xc = X - X.mean(axis=0)
    _, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    components = Vt[:k]
    return PcaResult(Xc @ components.T, s[:k], components)


def clt_scaling(
    observable: Callable[[np.ndarray], np.ndarray] | str = "identity",
    ell_grid: Sequence[int] = (100, 1000, 10_000),
    trials: int = 200,
    seed: int = 0,
    map: str = "logistic",
    burn_in: int = CLT_BURN_IN,
) -> list[tuple[int, float]]:
    """Spread of Birkhoff averages across random starting points.

    Each trial starts from a uniform draw pushed ``burn_in`` steps along the
    orbit, which approximates a draw from the invariant measure. For each
    ``ell`` the sample standard deviation (ddof=1) of the length-``ell``
    time averages over all trials is returned.
    """
    if map != "logistic":
        raise ValueError(f"unsupported map {map!r}")
    if trials < 30:
        raise ValueError("clt_scaling needs at least 30 trials")
    if isinstance(observable, str):
        observable = OBSERVABLES[observable]
    rng = Xoshiro256pp(seed)
    starts = np.empty(trials)
    for i in range(trials):
        x = rng.random()
        while x == 0.0 or x == 0.5:
            x = rng.random()
        starts[i] = x
    burned = dynsys.logistic_orbit(starts, burn_in + 1)[-1]
    orbit = dynsys.logistic_orbit(burned, max(ell_grid))
    out = []
    for ell in ell_grid:
        averages = dynsys.birkhoff_average(orbit[:ell], observable)
        out.append((int(ell), float(np.std(averages, ddof=1))))
    return out


def loglog_slope(pairs: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class ForecastResult:
    run: AutonomousRun
    truth: np.ndarray
    readout: ReadoutWeights
    esn: Esn = field(repr=False)


def lorenz_forecast(cfg: StudyConfig, ell: int, seed: int, n: int, truth_steps: int | None = None) -> ForecastResult:
    """Train a next-step xi readout on ``ell`` pairs, then run closed loop for ``n`` steps.

    ``truth`` holds the continuation xi values for the first ``truth_steps``
    predictions (default ``n``).
    """
    truth_steps = n if truth_steps is None else truth_steps
    traj = lorenz_data(cfg, ell + 1 + truth_steps)
    xi = traj[:, 0]
    observed = xi[: cfg.washout + ell + 1]
    esn = build_esn(cfg, seed)
    # Row j is the state after xi[washout + j]; the last row is the handoff state.
    states = drive(esn, observed, None, cfg.washout).states
    _, targets = next_step_pairs(observed)
    W = ridge_svd(states[:-1], targets[cfg.washout:], cfg.raw_lambda(ell))
    run = autonomous_run(esn, W, states[-1], n)
    return ForecastResult(run, xi[cfg.washout + ell + 1:][:truth_steps], W, esn)
