"""Closed-loop (autonomous) operation of a trained ESN."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reservoir import DEFAULT_WASHOUT, Esn, _check_state, _update, drive
from .ridge import ReadoutWeights

DIVERGENCE_CUTOFF = 1e6


class DivergenceError(RuntimeError):
    """A fed-back prediction left the finite range; ``step`` is its 1-based index."""

    def __init__(self, step: int, value: float, predictions: np.ndarray):
        super().__init__(f"autonomous run diverged at step {step} (v = {value!r})")
        self.step = step
        self.value = value
        self.predictions = predictions


@dataclass(frozen=True)
class AutonomousRun:
    predictions: np.ndarray
    states: np.ndarray | None = None


def next_step_pairs(observations) -> tuple[np.ndarray, np.ndarray]:
    """Inputs z_0..z_{n-2} paired with targets z_1..z_{n-1}."""
    z = np.asarray(observations, dtype=np.float64)
    return z[:-1], z[1:]


def handoff_state(e: Esn, inputs, washout: int = DEFAULT_WASHOUT) -> np.ndarray:
    """Last teacher-forced state, used to start the autonomous phase."""
    return drive(e, inputs, None, washout).states[-1].copy()


def autonomous_run(e: Esn, W: ReadoutWeights, s0, n: int, keep_states: bool = False) -> AutonomousRun:
    """Iterate v_{k+1} = W . s_k, s_{k+1} = tanh(A s_k + C v_{k+1} + b).

    Returns v_1..v_n and, when ``keep_states`` is set, s_1..s_n.
    """
    if e.input_dim != 1:
        raise ValueError("autonomous feedback needs a scalar-input ESN")
    if W.W.shape != (e.size,):
        raise ValueError(f"readout has length {W.W.shape[0]}, reservoir has {e.size}")
    s = _check_state(e, s0)
    v = np.empty(n)
    states = np.empty((n, e.size)) if keep_states else None
    w = W.W
    feed = np.empty(1)
    for k in range(n):
        value = float(w @ s)
        if not np.isfinite(value) or abs(value) > DIVERGENCE_CUTOFF:
            raise DivergenceError(k + 1, value, v[:k].copy())
        v[k] = value
        feed[0] = value
        s = _update(e, s, feed)
        if keep_states:
            states[k] = s
    return AutonomousRun(v, states)
