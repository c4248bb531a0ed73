"""Dense linear algebra helpers: SPD solves, symmetric eigenproblems, square roots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

SYMMETRY_TOL = 1e-10

# fixed seed for power-iteration start vectors; keeps every call deterministic
_START_SEED = 0x5EED


class NotSPDError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumEstimate:
    lambda_min: float
    lambda_max: float
    iterations_used: int
    converged: bool


def _check_symmetric(S: np.ndarray, what: str = "matrix") -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{what} must be square, got shape {S.shape}")
    scale = max(1.0, float(np.max(np.abs(S), initial=0.0)))
    if np.max(np.abs(S - S.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise ValueError(f"{what} is not symmetric")
    return S


def cholesky_solve(M, b) -> np.ndarray:
    """Solve ``M x = b`` for symmetric positive definite ``M``."""
    M = _check_symmetric(M, "M")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != M.shape[0]:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {M.shape[0]}")
    try:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError(f"matrix is not SPD: {exc}") from None
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def _power_iteration(S, rng, tol, max_iters):
    """Dominant eigenvalue of a PSD matrix; returns (value, iterations, converged)."""
    n = S.shape[0]
    scale = float(np.max(np.abs(S), initial=0.0))
    if scale == 0.0:
        return 0.0, 0, True
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    restarts = 0
    for it in range(1, max_iters + 1):
        w = S @ v
        norm = np.linalg.norm(w)
        if norm <= 1e-14 * scale:
            # start vector fell into the null space
            if restarts < 3:
                restarts += 1
                v = rng.standard_normal(n)
                v /= np.linalg.norm(v)
                continue
            return 0.0, it, True
        new = float(v @ w)
        v = w / norm
        if it > 1 and abs(new - lam) <= tol * abs(new):
            return new, it, True
        lam = new
    val, squarings, ok = _squared_power(S, v, scale)
    return val, max_iters + squarings, ok


def _squared_power(S, v, scale, max_squarings=64):
    """Power method on S^(2^p) for spectra whose top gap is too small for the plain loop.

    Each squaring doubles the exponent, so a gap ratio of 1 - 1e-4 is resolved
    after about 20 squarings. Returns (value, squarings, converged).
    """
    P = S / scale
    for p in range(1, max_squarings + 1):
        P = P @ P
        P /= np.linalg.norm(P)
        w = P @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            w = P[:, np.argmax(np.linalg.norm(P, axis=0))]
            norm = np.linalg.norm(w)
        w /= norm
        if abs(w @ v) >= 1.0 - 1e-15:
            return float(w @ S @ w), p, True
        v = w
    return float(v @ S @ v), max_squarings, False


def extreme_eigs(S, tol: float = 1e-12, max_iters: int = 5000) -> SpectrumEstimate:
    """Smallest and largest eigenvalue of a symmetric PSD matrix by power iteration.

    The smallest eigenvalue comes from the dominant eigenvalue of the shifted
    matrix ``lambda_max * I - S``.
    """
    S = _check_symmetric(S, "S")
    rng = np.random.default_rng(_START_SEED)
    lam_max, it_max, ok_max = _power_iteration(S, rng, tol, max_iters)
    shifted = lam_max * np.eye(S.shape[0]) - S
    mu, it_min, ok_min = _power_iteration(shifted, rng, tol, max_iters)
    lam_min = min(max(lam_max - mu, 0.0), lam_max)
    return SpectrumEstimate(lam_min, lam_max, it_max + it_min, ok_max and ok_min)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings covering every index pair once, each round a set of disjoint pairs."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a >= 0 and b >= 0]
        rounds.append((np.array([a for a, _ in pairs], dtype=np.intp),
                       np.array([b for _, b in pairs], dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(S, tol: float = 1e-14, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Rotations are applied in round-robin order so that each round touches
    disjoint index pairs and can be done in one vectorised update.
    Returns eigenvalues in ascending order and the matching eigenvectors as
    columns.
    """
    A = _check_symmetric(S, "S").copy()
    n = A.shape[0]
    V = np.eye(n)
    if n < 2:
        return np.diag(A).copy(), V
    rounds = _round_robin(n)
    total = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * total:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore"):
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = Vp * c - Vq * s
            V[:, q] = Vp * s + Vq * c
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def sym_sqrt(R) -> np.ndarray:
    """Principal square root of a symmetric PSD matrix via Jacobi eigenvectors."""
    w, V = jacobi_eigh(R)
    if w.size and w[0] < -1e-10:
        raise NotPSDError(f"matrix has negative eigenvalue {w[0]:.3e}")
    w = np.where(w < 0, 0.0, w)
    S = (V * np.sqrt(w)) @ V.T
    return 0.5 * (S + S.T)


def finite_diff_grad(f, x, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        g[k] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def leave_one_out_products(V: np.ndarray) -> np.ndarray:
    """``out[..., t] = prod(V[..., s] for s != t)`` along the last axis, without division."""
    V = np.asarray(V, dtype=float)
    ones = np.ones(V.shape[:-1] + (1,))
    prefix = np.cumprod(np.concatenate([ones, V[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, V[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return prefix * suffix
