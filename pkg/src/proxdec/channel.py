"""Kronecker-correlated MIMO channel in its real-valued BPSK form.

A complex M x N channel ``A' = R_r^{1/2} G (R_t^{1/2})^T`` with exponential
correlation ``rho^|i-j|`` on both sides is embedded as the 2M x 2N real
matrix ``[[Re, -Im], [Im, Re]]``. Noise components are Gaussian with
variance ``sigma_w^2 / 2`` where ``sigma_w^2 = 2N / SNR``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import extreme_eigs, sym_sqrt


@dataclass(frozen=True)
class ComplexMatrix:
    real: np.ndarray
    imag: np.ndarray

    def __post_init__(self):
        if self.real.shape != self.imag.shape:
            raise ValueError("real and imaginary parts differ in shape")

    @property
    def shape(self):
        return self.real.shape

    def to_numpy(self) -> np.ndarray:
        return self.real + 1j * self.imag


@dataclass(frozen=True)
class ChannelRealization:
    A: np.ndarray
    sigma_w: float
    omega: float
    rho: float

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"step size must be positive and finite, got {self.omega}")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")


def exp_corr_matrix(size: int, rho: float) -> np.ndarray:
    _check_rho(rho)
    idx = np.arange(size)
    return np.power(float(rho), np.abs(idx[:, None] - idx[None, :]))


@lru_cache(maxsize=32)
def _corr_sqrt(size: int, rho: float) -> np.ndarray:
    if rho == 0.0:
        return np.eye(size)
    S = sym_sqrt(exp_corr_matrix(size, rho))
    S.flags.writeable = False
    return S


def sample_kronecker(M: int, N: int, rho: float, rng: np.random.Generator) -> ComplexMatrix:
    """Draw ``A'``; entries of G are circular complex Gaussian with unit variance."""
    if M < 1 or N < 1:
        raise ValueError("antenna counts must be positive")
    _check_rho(rho)
    scale = np.sqrt(0.5)
    Gr = rng.standard_normal((M, N)) * scale
    Gi = rng.standard_normal((M, N)) * scale
    Rr = _corr_sqrt(M, float(rho))
    RtT = _corr_sqrt(N, float(rho)).T
    return ComplexMatrix(Rr @ Gr @ RtT, Rr @ Gi @ RtT)


def realify(Ac: ComplexMatrix) -> np.ndarray:
    return np.block([[Ac.real, -Ac.imag], [Ac.imag, Ac.real]])


def noise_sigma(N: int, snr_db: float) -> float:
    """sigma_w with sigma_w^2 = 2N / SNR (SNR given in dB)."""
    if N < 1:
        raise ValueError("N must be positive")
    return float(np.sqrt(2.0 * N / 10.0 ** (snr_db / 10.0)))


def step_size(A) -> float:
    """``2 / (lambda_min + lambda_max)`` of ``A^T A``."""
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        raise ValueError("channel matrix is zero")
    spec = extreme_eigs(A.T @ A)
    return 2.0 / (spec.lambda_min + spec.lambda_max)


def make_realization(M: int, N: int, rho: float, snr_db: float,
                     rng: np.random.Generator) -> ChannelRealization:
    A = realify(sample_kronecker(M, N, rho, rng))
    return ChannelRealization(A=A, sigma_w=noise_sigma(N, snr_db), omega=step_size(A), rho=rho)


def transmit(ch: ChannelRealization, x, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (ch.n,):
        raise ValueError(f"expected word of length {ch.n}, got shape {x.shape}")
    w = rng.standard_normal(ch.m) * (ch.sigma_w / np.sqrt(2.0))
    return ch.A @ x + w
