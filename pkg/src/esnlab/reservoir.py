"""Random Echo State Networks: construction, driving and contraction checks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynsys import ScalarSeries
from .rng import streams

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
DEFAULT_WASHOUT = 100


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class EsnParams:
    reservoir_size: int = 300
    input_dim: int = 1
    spectral_radius_target: float = 1.0
    input_scale: float = 0.05
    master_seed: int = 0

    def __post_init__(self):
        if self.reservoir_size < 1:
            raise ValueError("reservoir_size must be >= 1")
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.spectral_radius_target > 0:
            raise ValueError("spectral_radius_target must be > 0")
        if not self.input_scale > 0:
            raise ValueError("input_scale must be > 0")


@dataclass(frozen=True, eq=False)
class Esn:
    """State-space system x -> tanh(A x + C z + b)."""

    A: np.ndarray
    C: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A, C, b = (np.array(m, dtype=np.float64) for m in (self.A, self.C, self.b))
        T = b.shape[0]
        if A.shape != (T, T) or C.ndim != 2 or C.shape[0] != T or b.ndim != 1:
            raise ValueError(f"inconsistent ESN shapes A{A.shape} C{C.shape} b{b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(C)) and np.all(np.isfinite(b))):
            raise ValueError("ESN weights must be finite")
        for name, m in (("A", A), ("C", C), ("b", b)):
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def size(self) -> int:
        return self.b.shape[0]

    @property
    def input_dim(self) -> int:
        return self.C.shape[1]


@dataclass(frozen=True)
class StateTrajectory:
    """Driven reservoir states; row ``j`` is the state after input ``washout_used + j``."""

    states: np.ndarray
    washout_used: int

    def __len__(self) -> int:
        return self.states.shape[0]


def spectral_norm(M, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER, full_output: bool = False):
    """Largest singular value of ``M`` by power iteration on M^T M.

    Iteration starts from the normalised all-ones vector and stops once the
    estimate changes by less than ``tol`` relative, or after ``max_iter``
    iterations, in which case a ``ConvergenceWarning`` is issued.

    With ``full_output=True`` returns ``(value, converged, iterations)``.
    """
    M = np.asarray(M, dtype=np.float64)
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix must be finite")
    n = M.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    estimate = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = M.T @ (M @ v)
        # Rayleigh quotient of M^T M at the unit vector v.
        new = float(np.sqrt(max(v @ w, 0.0)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            estimate, converged = 0.0, True
            break
        v = w / norm_w
        if abs(new - estimate) <= tol * new:
            estimate, converged = new, True
            break
        estimate = new
    if not converged:
        warnings.warn(f"power iteration did not converge in {max_iter} iterations", ConvergenceWarning)
    if full_output:
        return estimate, converged, it
    return estimate


def make_esn(p: EsnParams) -> Esn:
    """Draw a random ESN deterministically from ``p.master_seed``.

    A, C and b come from three separate streams. A has i.i.d. U[-1, 1]
    entries (row-major) rescaled to the target 2-norm; C and b have i.i.d.
    U[-input_scale, input_scale] entries.
    """
    T, d = p.reservoir_size, p.input_dim
    a_stream, c_stream, b_stream = streams(p.master_seed, 3)
    A = a_stream.uniform_array(1.0, T * T).reshape(T, T)
    A *= p.spectral_radius_target / spectral_norm(A)
    C = c_stream.uniform_array(p.input_scale, T * d).reshape(T, d)
    b = b_stream.uniform_array(p.input_scale, T)
    return Esn(A, C, b)


def _as_inputs(e: Esn, inputs) -> np.ndarray:
    if isinstance(inputs, ScalarSeries):
        inputs = inputs.values
    z = np.asarray(inputs, dtype=np.float64)
    if z.ndim == 1:
        z = z[:, None]
    if z.ndim != 2 or z.shape[1] != e.input_dim:
        raise ValueError(f"inputs must have {e.input_dim} component(s), got shape {np.shape(inputs)}")
    return z


def _check_state(e: Esn, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (e.size,):
        raise ValueError(f"state must have shape ({e.size},), got {x.shape}")
    return x


def _update(e: Esn, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Single definition of the recursion shared by step, drive and the
    # autonomous phase so that all three agree bitwise.
    return np.tanh(e.A @ x + (e.C @ z + e.b))


def step(e: Esn, x, z) -> np.ndarray:
    """One reservoir update tanh(A x + C z + b)."""
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if z.shape != (e.input_dim,):
        raise ValueError(f"input must have shape ({e.input_dim},), got {z.shape}")
    return _update(e, _check_state(e, x), z)


def drive(e: Esn, inputs, x0=None, washout: int = DEFAULT_WASHOUT) -> StateTrajectory:
    """Drive the reservoir with ``inputs`` from ``x0`` (zero by default).

    The first ``washout`` states are discarded.
    """
    z = _as_inputs(e, inputs)
    if not 0 <= washout < z.shape[0]:
        raise ValueError(f"washout {washout} leaves no states from {z.shape[0]} inputs")
    x = np.zeros(e.size) if x0 is None else _check_state(e, x0)
    states = np.empty((z.shape[0] - washout, e.size))
    for k in range(z.shape[0]):
        x = _update(e, x, z[k])
        if k >= washout:
            states[k - washout] = x
    return StateTrajectory(states, washout)


def esp_gap(e: Esn, inputs, x0, y0, n: int | None = None) -> np.ndarray:
    """Distances ||x_k - y_k|| for two runs driven by the same inputs.

    Entry 0 is the initial gap; entry k is the gap after k inputs.
    """
    z = _as_inputs(e, inputs)
    n = z.shape[0] if n is None else n
    if n > z.shape[0]:
        raise ValueError(f"n={n} exceeds the {z.shape[0]} available inputs")
    x, y = _check_state(e, x0), _check_state(e, y0)
    gaps = np.empty(n + 1)
    gaps[0] = np.linalg.norm(x - y)
    for k in range(n):
        x = _update(e, x, z[k])
        y = _update(e, y, z[k])
        gaps[k + 1] = np.linalg.norm(x - y)
    return gaps
