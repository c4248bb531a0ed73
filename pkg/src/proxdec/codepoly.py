"""Code-constraint polynomial and the code-proximal operator.

For a parity-check matrix with row supports A(i) the penalty is

    h(x) = sum_j (x_j^2 - 1)^2 + sum_i (Q_i - 1)^2,    Q_i = prod_{j in A(i)} x_j

which is zero exactly on bipolar codewords. Its gradient is evaluated with
leave-one-out row products, so no division by x_k is needed and the
gradient is defined everywhere.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ldpc import ParityCheckMatrix
from .numerics import leave_one_out_products

STEP_TOL = 1e-9


class CodePolyContext:
    """Row index tables for evaluating h and its gradient on one code."""

    def __init__(self, H: ParityCheckMatrix):
        self.H = H
        self.n = H.n
        self._idx = H.row_index
        self._flat = self._idx.ravel()

    def _rows(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got shape {x.shape}")
        # padding slots read a 1.0 and so drop out of every product
        return np.append(x, 1.0)[self._idx]

    def parity_products(self, x) -> np.ndarray:
        """Q_i for every check i."""
        return np.prod(self._rows(x), axis=1)

    def eval_h(self, x) -> float:
        x = np.asarray(x, dtype=float)
        Q = self.parity_products(x)
        return float(np.sum((x * x - 1.0) ** 2) + np.sum((Q - 1.0) ** 2))

    def grad_h(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = self._rows(x)
        Q = np.prod(vals, axis=1)
        others = leave_one_out_products(vals)
        contrib = (2.0 * (Q - 1.0))[:, None] * others
        parity = np.bincount(self._flat, weights=contrib.ravel(), minlength=self.n + 1)[: self.n]
        return 4.0 * (x * x - 1.0) * x + parity

    def prox_code(self, x, gamma: float) -> np.ndarray:
        """Code-proximal step ``x - gamma * grad h(x)``."""
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        x = np.asarray(x, dtype=float)
        return x - gamma * self.grad_h(x)


def eval_h(ctx: CodePolyContext, x) -> float:
    return ctx.eval_h(x)


def grad_h(ctx: CodePolyContext, x) -> np.ndarray:
    return ctx.grad_h(x)


def prox_code(ctx: CodePolyContext, x, gamma: float) -> np.ndarray:
    return ctx.prox_code(x, gamma)


def box_project(x, eta: float) -> np.ndarray:
    """Clamp every component to [-eta, eta]; ``eta = inf`` is the identity."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    return np.clip(np.asarray(x, dtype=float), -eta, eta)


@dataclass
class Trajectory:
    points: np.ndarray
    converged: bool = False
    diverged: bool = False
    message: str = ""

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    @property
    def iterations(self) -> int:
        return len(self.points) - 1


def proximal_iteration(ctx: CodePolyContext, x0, gamma: float, max_iters: int,
                       step_tol: float = STEP_TOL) -> Trajectory:
    """Iterate the code-proximal operator from ``x0``.

    Stops when the step norm drops below ``step_tol`` or after ``max_iters``
    steps. A non-finite iterate ends the run; the partial trajectory up to the
    last finite point is returned with ``diverged`` set.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    x = np.asarray(x0, dtype=float).copy()
    points = [x.copy()]
    for k in range(max_iters):
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = ctx.prox_code(x, gamma)
        if not np.all(np.isfinite(nxt)):
            return Trajectory(np.array(points), diverged=True,
                              message=f"non-finite iterate at step {k + 1}")
        with np.errstate(over="ignore"):
            step = np.linalg.norm(nxt - x)
        x = nxt
        points.append(x.copy())
        if step < step_tol:
            return Trajectory(np.array(points), converged=True)
    return Trajectory(np.array(points))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV with columns ``iteration, x_1 .. x_n``."""
    pts = traj.points
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration"] + [f"x_{j + 1}" for j in range(pts.shape[1])])
        for k, row in enumerate(pts):
            w.writerow([k] + [repr(float(v)) for v in row])
