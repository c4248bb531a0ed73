"""Detectors and decoders for the real-valued MIMO model ``y = A x + w``.

proximal_decode
    gradient step on ``||y - A s||^2`` followed by the code-proximal step and
    a box clamp.
tanh_detect
    the same gradient step followed by a ``tanh(alpha * r)`` soft projection.
mmse_detect
    linear MMSE estimate ``A^T (A A^T + sigma_w^2/2 I)^{-1} y``.
bp_decode / mmse_bp
    flooding sum-product decoding, optionally fed with the scaled MMSE output.

Bipolar and LLR conventions: +1 <-> bit 0 <-> positive LLR, and ties go to +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import step_size
from .codepoly import CodePolyContext, box_project
from .ldpc import ParityCheckMatrix, hard_sign, syndrome
from .numerics import cholesky_solve, leave_one_out_products

__all__ = [
    "DecoderConfig",
    "DetectResult",
    "step_size",
    "proximal_decode",
    "tanh_detect",
    "mmse_detect",
    "bp_decode",
    "mmse_bp",
    "check_node_update",
]

TANH_CLAMP = 1.0 - 1e-12
MSG_CLIP = 30.0


@dataclass(frozen=True)
class DecoderConfig:
    gamma: float = 0.05
    eta: float = 1.5
    omega: float | None = None  # None: 2 / (lambda_min + lambda_max) of A^T A
    max_iters: int = 50
    alpha: float = 2.0
    xi: float = 5.0
    bp_iters: int = 20
    early_stop: bool = True
    warm_start: str = "zero"  # or "mmse"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.eta >= 1:
            raise ValueError("eta must be at least 1")
        if self.omega is not None and not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError("omega must be positive and finite")
        if not self.alpha > 0 or not self.xi > 0:
            raise ValueError("alpha and xi must be positive")
        if self.max_iters < 1 or self.bp_iters < 1:
            raise ValueError("iteration counts must be at least 1")
        if self.warm_start not in ("zero", "mmse"):
            raise ValueError(f"unknown warm start {self.warm_start!r}")


@dataclass
class DetectResult:
    soft: np.ndarray
    hard: np.ndarray
    iterations_run: int
    codeword_found: bool | None
    trajectory: list[float] | None = None
    diverged: bool = False
    message: str = field(default="", repr=False)


def _error_value(reference, s) -> float:
    return float(np.linalg.norm(reference - hard_sign(s)))


def _check_dims(A, y):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise ValueError(f"dimension mismatch: A is {A.shape}, y is {y.shape}")
    return A, y


def _resolve_omega(A, cfg, omega):
    if omega is not None:
        return float(omega)
    if cfg.omega is not None:
        return cfg.omega
    return step_size(A)


def proximal_decode(A, y, H: ParityCheckMatrix, cfg: DecoderConfig = DecoderConfig(), *,
                    omega: float | None = None, sigma_w: float | None = None,
                    reference=None, ctx: CodePolyContext | None = None) -> DetectResult:
    """Proximal decoding with box projection.

    ``reference`` (the transmitted word) turns on recording of
    ``||reference - sign(s_k)||`` for k = 0, 1, ...; ``sigma_w`` is only needed
    for the MMSE warm start.
    """
    A, y = _check_dims(A, y)
    if A.shape[1] != H.n:
        raise ValueError(f"A has {A.shape[1]} columns but the code has length {H.n}")
    ctx = ctx or CodePolyContext(H)
    w = _resolve_omega(A, cfg, omega)

    if cfg.warm_start == "mmse":
        if sigma_w is None:
            raise ValueError("MMSE warm start needs sigma_w")
        s = box_project(mmse_detect(A, y, sigma_w), cfg.eta)
    else:
        s = np.zeros(A.shape[1])
    traj = None if reference is None else [_error_value(reference, s)]

    k = 0
    for k in range(1, cfg.max_iters + 1):
        r = s - w * (A.T @ (A @ s - y))
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = box_project(ctx.prox_code(r, cfg.gamma), cfg.eta)
        if not np.all(np.isfinite(nxt)):
            hard = hard_sign(s)
            return DetectResult(s, hard, k, False, traj, diverged=True,
                                message=f"non-finite state at iteration {k}")
        s = nxt
        if traj is not None:
            traj.append(_error_value(reference, s))
        if cfg.early_stop and not syndrome(H, s < 0).any():
            break

    hard = hard_sign(s)
    return DetectResult(s, hard, k, not syndrome(H, hard < 0).any(), traj)


def tanh_detect(A, y, cfg: DecoderConfig = DecoderConfig(), *, omega: float | None = None,
                reference=None) -> DetectResult:
    """Gradient step plus ``tanh(alpha * r)``; always runs ``cfg.max_iters`` steps."""
    A, y = _check_dims(A, y)
    w = _resolve_omega(A, cfg, omega)
    s = np.zeros(A.shape[1])
    traj = None if reference is None else [_error_value(reference, s)]
    for _ in range(cfg.max_iters):
        r = s - w * (A.T @ (A @ s - y))
        s = np.tanh(cfg.alpha * r)
        if traj is not None:
            traj.append(_error_value(reference, s))
    return DetectResult(s, hard_sign(s), cfg.max_iters, None, traj)


def mmse_detect(A, y, sigma_w: float) -> np.ndarray:
    """Unquantised MMSE estimate, solved in the m x m Gram form."""
    A, y = _check_dims(A, y)
    if sigma_w < 0:
        raise ValueError("sigma_w must be non-negative")
    gram = A @ A.T
    gram[np.diag_indices_from(gram)] += 0.5 * sigma_w * sigma_w
    return A.T @ cholesky_solve(gram, y)


def check_node_update(H: ParityCheckMatrix, v2c: np.ndarray) -> np.ndarray:
    """Tanh-rule check messages for the (m, max degree) message layout of ``H.row_index``."""
    mask = H.row_mask
    t = np.where(mask, np.tanh(0.5 * v2c), 1.0)
    t = np.clip(t, -TANH_CLAMP, TANH_CLAMP)
    prod = np.clip(leave_one_out_products(t), -TANH_CLAMP, TANH_CLAMP)
    c2v = np.clip(2.0 * np.arctanh(prod), -MSG_CLIP, MSG_CLIP)
    return np.where(mask, c2v, 0.0)


def bp_decode(H: ParityCheckMatrix, llr, iters: int, early_stop: bool = True) -> DetectResult:
    """Flooding sum-product decoding; ``soft`` holds the posterior LLRs."""
    if iters < 1:
        raise ValueError("iters must be at least 1")
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {llr.shape}")
    idx = H.row_index
    flat = idx.ravel()
    mask = H.row_mask
    padded = np.append(llr, 0.0)
    v2c = np.where(mask, np.clip(padded[idx], -MSG_CLIP, MSG_CLIP), 0.0)

    post = llr
    it = 0
    for it in range(1, iters + 1):
        c2v = check_node_update(H, v2c)
        post = llr + np.bincount(flat, weights=c2v.ravel(), minlength=H.n + 1)[: H.n]
        if early_stop and not syndrome(H, post < 0).any():
            break
        v2c = np.where(mask, np.clip(np.append(post, 0.0)[idx] - c2v, -MSG_CLIP, MSG_CLIP), 0.0)

    hard = hard_sign(post)
    return DetectResult(post, hard, it, not syndrome(H, hard < 0).any())


def mmse_bp(A, y, sigma_w: float, H: ParityCheckMatrix,
            cfg: DecoderConfig = DecoderConfig()) -> DetectResult:
    """BP decoding of ``xi * x_mmse``."""
    return bp_decode(H, cfg.xi * mmse_detect(A, y, sigma_w), cfg.bp_iters, cfg.early_stop)
