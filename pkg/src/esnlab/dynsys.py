"""Lorenz trajectories, simple ergodic maps and Birkhoff time averages."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

COMPONENTS = ("xi", "upsilon", "zeta")


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0

    def __post_init__(self):
        for name in ("sigma", "rho", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"LorenzParams.{name} must be finite and > 0, got {value!r}")


class LorenzState(NamedTuple):
    xi: float
    upsilon: float
    zeta: float


DEFAULT_INITIAL_STATE = LorenzState(0.0, 1.0, 1.05)


@dataclass(frozen=True)
class ScalarSeries:
    """An observed scalar time series sampled every ``dt`` time units."""

    values: np.ndarray
    dt: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("ScalarSeries values must be one-dimensional")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not np.all(np.isfinite(values)):
            raise ValueError("ScalarSeries values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def _rhs(xi: float, upsilon: float, zeta: float, p: LorenzParams) -> tuple[float, float, float]:
    return (
        p.sigma * (upsilon - xi),
        xi * (p.rho - zeta) - upsilon,
        xi * upsilon - p.beta * zeta,
    )


def _finite_state(s: Sequence[float]) -> tuple[float, float, float]:
    xi, upsilon, zeta = (float(v) for v in s)
    if not (math.isfinite(xi) and math.isfinite(upsilon) and math.isfinite(zeta)):
        raise ValueError(f"non-finite Lorenz state {tuple(s)!r}")
    return xi, upsilon, zeta


def lorenz_rhs(s: Sequence[float], p: LorenzParams) -> LorenzState:
    """Vector field of the Lorenz system at ``s``."""
    return LorenzState(*_rhs(*_finite_state(s), p))


def rk4_step(s: Sequence[float], p: LorenzParams, tau: float) -> LorenzState:
    """One classical Runge-Kutta step of size ``tau``."""
    if not tau >= 0:
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    x, y, z = _finite_state(s)
    k1 = _rhs(x, y, z, p)
    h = 0.5 * tau
    k2 = _rhs(x + h * k1[0], y + h * k1[1], z + h * k1[2], p)
    k3 = _rhs(x + h * k2[0], y + h * k2[1], z + h * k2[2], p)
    k4 = _rhs(x + tau * k3[0], y + tau * k3[1], z + tau * k3[2], p)
    w = tau / 6.0
    out = LorenzState(
        x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
    if not all(math.isfinite(v) for v in out):
        raise OverflowError(f"RK4 step from {tuple(s)!r} produced non-finite state")
    return out


def lorenz_trajectory(
    s0: Sequence[float] = DEFAULT_INITIAL_STATE,
    p: LorenzParams = LorenzParams(),
    n: int = 4000,
    tau: float = 0.01,
) -> np.ndarray:
    """Integrate ``n`` RK4 steps from ``s0``.

    Returns an ``(n + 1, 3)`` array whose row ``k`` is the state at time
    ``k * tau``; row 0 is ``s0``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    out = np.empty((n + 1, 3))
    s = LorenzState(*(float(v) for v in s0))
    out[0] = s
    for k in range(1, n + 1):
        s = rk4_step(s, p, tau)
        out[k] = s
    return out


def observe(traj: np.ndarray, component: str, dt: float) -> ScalarSeries:
    """Extract one Lorenz coordinate from a trajectory as a scalar series."""
    traj = np.asarray(traj)
    if traj.ndim != 2 or traj.shape[0] == 0 or traj.shape[1] != 3:
        raise ValueError("trajectory must be a nonempty (n, 3) array")
    return ScalarSeries(traj[:, COMPONENTS.index(component)].copy(), dt)


def rotation_orbit(x0: float, alpha: float, n: int) -> np.ndarray:
    """Orbit of the circle rotation x -> frac(x + alpha), ``n`` points from x0."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = np.empty(n)
    x = float(x0)
    for k in range(n):
        out[k] = x
        x = (x + alpha) % 1.0
    return out


def logistic_orbit(x0, n: int) -> np.ndarray:
    """Orbit of the full logistic map x -> 4x(1 - x), ``n`` points from x0.

    ``x0`` may be an array, in which case one orbit per entry is computed
    and the result has shape ``(n,) + x0.shape``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = np.array(x0, dtype=np.float64)
    if np.any((x <= 0) | (x >= 1) | (x == 0.5)):
        raise ValueError("logistic initial points must lie in (0, 1) and differ from 0.5")
    out = np.empty((n,) + x.shape)
    for k in range(n):
        out[k] = x
        x = 4.0 * x * (1.0 - x)
    return out


def birkhoff_average(orbit, observable: Callable = lambda x: x) -> float:
    """Time average (1/l) sum_k observable(orbit[k]).

    ``observable`` is applied to the whole orbit array at once, so it should
    be a numpy ufunc or otherwise vectorised.
    """
    orbit = np.asarray(orbit, dtype=np.float64)
    if orbit.size == 0:
        raise ValueError("orbit must be nonempty")
    values = np.broadcast_to(np.asarray(observable(orbit), dtype=np.float64), orbit.shape)
    return float(np.mean(values, axis=0)) if values.ndim == 1 else np.mean(values, axis=0)
