"""Tikhonov least-squares readouts and error metrics.

The objective is the raw-sum form

    sum_k (W . x_k - u_k)^2 + lam * ||W||^2,

whose normal equations are (sum x x^T + lam I) W = sum u x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

RANK_RTOL = 1e-14


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ReadoutWeights:
    W: np.ndarray
    lam: float

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim != 1 or not np.all(np.isfinite(W)):
            raise ValueError("readout weights must be a finite vector")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        object.__setattr__(self, "W", W)

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.W


def scale_lambda(lam: float, n_samples: int, convention: str = "raw") -> float:
    """Convert a regularisation parameter to the raw-sum convention.

    ``averaged`` means lam multiplies ||W||^2 inside a 1/l normalised
    objective, which is the raw-sum problem with l * lam.
    """
    if convention == "raw":
        return lam
    if convention == "averaged":
        return lam * n_samples
    raise ValueError(f"unknown lambda convention {convention!r}")


def _check_data(X, u) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if X.ndim != 2 or u.ndim != 1 or X.shape[0] != u.shape[0]:
        raise ValueError(f"need X of shape (l, T) and u of shape (l,), got {X.shape} and {u.shape}")
    if X.shape[0] < 1:
        raise ValueError("need at least one sample")
    return X, u


def objective(W, X, u, lam: float) -> float:
    r = X @ W - u
    return float(r @ r + lam * (W @ W))


def ridge_svd(X, u, lam: float) -> ReadoutWeights:
    """Batch ridge solution W = V diag(s / (s^2 + lam)) U^T u via the thin SVD."""
    X, u = _check_data(X, u)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam!r}")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    Utu = U.T @ u
    if lam == 0:
        if s.shape[0] < X.shape[1] or s[-1] <= RANK_RTOL * s[0]:
            raise SingularMatrixError("lambda = 0 requires X with full column rank")
        coef = Utu / s
    else:
        coef = s / (s * s + lam) * Utu
    return ReadoutWeights(Vt.T @ coef, lam)


@dataclass(frozen=True)
class NormalEqAccumulator:
    """Raw sums S = sum x x^T, t = sum u x and the sample count n."""

    S: np.ndarray
    t: np.ndarray
    n: int = 0

    @classmethod
    def empty(cls, size: int) -> "NormalEqAccumulator":
        return cls(np.zeros((size, size)), np.zeros(size), 0)

    @property
    def size(self) -> int:
        return self.t.shape[0]


def accumulate(acc: NormalEqAccumulator, x, u: float) -> NormalEqAccumulator:
    """Add one (state, target) sample. The regulariser is not folded in."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (acc.size,):
        raise ValueError(f"sample must have shape ({acc.size},), got {x.shape}")
    return NormalEqAccumulator(acc.S + np.outer(x, x), acc.t + u * x, acc.n + 1)


def accumulate_rows(acc: NormalEqAccumulator, X, u) -> NormalEqAccumulator:
    """Add every row of ``X`` with its target, in order."""
    X, u = _check_data(X, u)
    for x, target in zip(X, u):
        acc = accumulate(acc, x, target)
    return acc


def merge(a: NormalEqAccumulator, b: NormalEqAccumulator) -> NormalEqAccumulator:
    if a.size != b.size:
        raise ValueError(f"cannot merge accumulators of size {a.size} and {b.size}")
    if b.n == 0:
        return a
    if a.n == 0:
        return b
    return NormalEqAccumulator(a.S + b.S, a.t + b.t, a.n + b.n)


def solve_normal(acc: NormalEqAccumulator, lam: float) -> ReadoutWeights:
    """Solve (S + lam I) W = t by Cholesky factorisation."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam!r}")
    M = acc.S + lam * np.eye(acc.size)
    try:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"S + lambda I is not positive definite: {exc}") from exc
    return ReadoutWeights(scipy.linalg.cho_solve(factor, acc.t), lam)


def rmse(W: ReadoutWeights, X, u) -> float:
    X, u = _check_data(X, u)
    r = W.predict(X) - u
    return float(np.sqrt(np.mean(r * r)))


def readout_error(W: ReadoutWeights, W_ref: ReadoutWeights) -> float:
    """Relative readout error ||W - W_ref|| / ||W_ref||."""
    if W.W.shape != W_ref.W.shape:
        raise ValueError("readouts must have the same length")
    ref_norm = np.linalg.norm(W_ref.W)
    if ref_norm == 0:
        raise ValueError("reference readout has zero norm")
    return float(np.linalg.norm(W.W - W_ref.W) / ref_norm)
