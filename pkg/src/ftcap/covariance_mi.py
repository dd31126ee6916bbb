"""Sampled mutual information from covariance log-determinants.

On a uniform grid ``t_i = (i-1) T / n`` the received samples are
``Y = X + N`` with independent Gaussian ``X`` and ``N``, so

    I = 0.5 * (logdet(K_X + K_N) - logdet(K_N))   [nats]

White noise enters through a rectangular pre-sampling filter of width
``T/n`` and gain ``n/T``, which gives i.i.d. samples of variance
``n * n0 / (2 T)``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack

from ftcap.errors import NotPositiveDefiniteError
from ftcap.kernels import AWGN


@dataclass(frozen=True)
class SampleGrid:
    T: float
    n: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def instants(self):
        return np.arange(self.n, dtype=np.float64) * self.T / self.n

    @property
    def spacing(self):
        return self.T / self.n


@dataclass(frozen=True)
class CovariancePair:
    K_X: np.ndarray
    K_N: np.ndarray

    def __post_init__(self):
        for name in ("K_X", "K_N"):
            M = np.asarray(getattr(self, name), dtype=np.float64)
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise ValueError(f"{name} must be square, got shape {M.shape}")
            object.__setattr__(self, name, M)
        if self.K_X.shape != self.K_N.shape:
            raise ValueError(
                f"dimension mismatch: K_X {self.K_X.shape} vs K_N {self.K_N.shape}"
            )

    @property
    def K_Y(self):
        return self.K_X + self.K_N


def uniform_grid(T, n):
    return SampleGrid(T, n)


def covariance_matrix(kernel, grid):
    """Matrix of ``R(t_i - t_j)`` over the grid instants."""
    t = grid.instants
    return kernel.autocorrelation(t[:, None] - t[None, :])


def awgn_sample_covariance(n0, grid):
    if not n0 > 0:
        raise ValueError(f"n0 must be positive, got {n0}")
    return np.diag(np.full(grid.n, n0 * grid.n / (2.0 * grid.T)))


def logdet_spd(M):
    """log det of a symmetric positive-definite matrix via Cholesky.

    Diagonal input skips the factorization and sums ``log(M_ii)`` directly.
    Raises :class:`NotPositiveDefiniteError` carrying the 1-based pivot.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        return 0.0
    d = np.diagonal(M)
    if np.count_nonzero(M) == np.count_nonzero(d):
        bad = np.flatnonzero(~(d > 0))
        if bad.size:
            raise NotPositiveDefiniteError(int(bad[0]) + 1)
        return math.fsum(np.log(d))
    if np.max(np.abs(M - M.T)) > 1e-12 * np.max(np.abs(d)):
        raise ValueError("matrix is not symmetric")
    c, info = lapack.dpotrf(M, lower=1, clean=0, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefiniteError(int(info))
    if info < 0:
        raise ValueError(f"dpotrf rejected argument {-info}")
    return 2.0 * math.fsum(np.log(np.diagonal(c)))


def discrete_mutual_information(pair):
    """0.5 * log(det(K_X + K_N) / det(K_N)) in nats."""
    value = 0.5 * (logdet_spd(pair.K_Y) - logdet_spd(pair.K_N))
    return max(value, 0.0)


class MIPoint(NamedTuple):
    n: int
    mi: float
    rate: float


def mi_vs_n(signal, noise, T, n_list):
    """Sampled mutual information and rate ``I/T`` for each grid size in ``n_list``.

    ``noise`` is either a stationary kernel (sampled directly) or
    :class:`~ftcap.kernels.AWGN`.
    """
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list is empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    out = []
    for n in n_list:
        grid = SampleGrid(T, n)
        K_X = covariance_matrix(signal, grid)
        if isinstance(noise, AWGN):
            K_N = awgn_sample_covariance(noise.n0, grid)
        else:
            K_N = covariance_matrix(noise, grid)
        try:
            mi = discrete_mutual_information(CovariancePair(K_X, K_N))
        except NotPositiveDefiniteError as exc:
            raise NotPositiveDefiniteError(exc.pivot, n=n) from exc
        out.append(MIPoint(n, mi, mi / T))
    return out
