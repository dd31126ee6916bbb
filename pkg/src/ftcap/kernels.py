"""Stationary autocorrelation models and their power spectral densities.

Two families are supported:

* :class:`SincKernel` -- ideal low-pass process, flat PSD ``psd_level`` on
  ``|f| <= bandwidth`` and ``R(tau) = 2*W*psd_level*sinc(2*W*tau)``.
* :class:`ExponentialKernel` -- Ornstein-Uhlenbeck process,
  ``R(tau) = P*exp(-alpha*|tau|)`` with Lorentzian PSD
  ``2*P*alpha / (alpha**2 + (2*pi*f)**2)``.

:class:`AWGN` is white noise with two-sided PSD ``n0/2``. It has no finite
autocorrelation and only enters through its PSD or the filtered-sampling
covariance in :mod:`ftcap.covariance_mi`.
"""
from dataclasses import dataclass, field
from typing import Union

import numpy as np

# below this |x| the normalized sinc uses 1 - (pi x)^2 / 6
SINC_SERIES_CUTOFF = 1e-8


def sinc(x):
    """Normalized sinc ``sin(pi x)/(pi x)`` with a smooth branch near zero."""
    x = np.asarray(x, dtype=np.float64)
    px = np.pi * x
    near = np.abs(x) < SINC_SERIES_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(near, 1.0 - px * px / 6.0, np.sin(px) / np.where(near, 1.0, px))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SincKernel:
    bandwidth: float
    psd_level: float
    kind: str = field(default="sinc", init=False)

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if not self.psd_level >= 0:
            raise ValueError(f"psd_level must be nonnegative, got {self.psd_level}")

    @property
    def power(self):
        return 2.0 * self.bandwidth * self.psd_level

    @property
    def band_limited(self):
        return True

    def autocorrelation(self, tau):
        return self.power * sinc(2.0 * self.bandwidth * np.asarray(tau, dtype=np.float64))

    def psd(self, f):
        f = np.asarray(f, dtype=np.float64)
        out = np.where(np.abs(f) <= self.bandwidth, self.psd_level, 0.0)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ExponentialKernel:
    power: float
    alpha: float
    kind: str = field(default="exponential", init=False)

    def __post_init__(self):
        if not self.power >= 0:
            raise ValueError(f"power must be nonnegative, got {self.power}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def band_limited(self):
        return False

    def autocorrelation(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        out = self.power * np.exp(-self.alpha * np.abs(tau))
        return out[()] if out.ndim == 0 else out

    def psd(self, f):
        w = 2.0 * np.pi * np.asarray(f, dtype=np.float64)
        out = 2.0 * self.power * self.alpha / (self.alpha**2 + w * w)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class AWGN:
    """White Gaussian noise; ``n0`` is twice the two-sided PSD level."""

    n0: float
    kind: str = field(default="awgn", init=False)

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError(f"n0 must be positive, got {self.n0}")

    @property
    def band_limited(self):
        return False

    def psd(self, f):
        out = np.full(np.shape(f), 0.5 * self.n0)
        return out[()] if out.ndim == 0 else out


StationaryKernel = Union[SincKernel, ExponentialKernel]


def eval_autocorrelation(kernel, tau):
    """R(tau) of ``kernel``; accepts scalars or arrays."""
    return kernel.autocorrelation(tau)


def eval_psd(kernel, f):
    """Two-sided PSD S(f) of ``kernel`` (power per Hz)."""
    return kernel.psd(f)


@dataclass
class ValidationReport:
    symmetric: bool
    bounded: bool
    psd_nonnegative: bool
    band_limited: bool
    violations: list

    @property
    def ok(self):
        return not self.violations


def _time_scale(kernel):
    if isinstance(kernel, SincKernel):
        return 1.0 / (2.0 * kernel.bandwidth)
    return 1.0 / kernel.alpha


def validate_kernel(kernel, probe_count=257):
    """Probe symmetry, ``|R(tau)| <= R(0)`` and ``S(f) >= 0``.

    Violations are collected in the report; nothing is raised.
    """
    if probe_count < 2:
        raise ValueError("probe_count must be at least 2")
    span = 20.0 * _time_scale(kernel)
    tau = np.linspace(0.0, span, probe_count)
    r_pos = kernel.autocorrelation(tau)
    r_neg = kernel.autocorrelation(-tau)
    r0 = kernel.autocorrelation(0.0)
    fspan = 20.0 / _time_scale(kernel)
    f = np.linspace(-fspan, fspan, 2 * probe_count - 1)
    s = kernel.psd(f)

    violations = []
    symmetric = bool(np.array_equal(r_pos, r_neg))
    if not symmetric:
        violations.append("autocorrelation is not even")
    bounded = bool(np.all(np.abs(r_pos) <= r0 * (1.0 + 1e-15)))
    if not bounded:
        violations.append("|R(tau)| exceeds R(0)")
    psd_ok = bool(np.all(s >= 0.0))
    if not psd_ok:
        violations.append("PSD is negative somewhere")
    return ValidationReport(symmetric, bounded, psd_ok, kernel.band_limited, violations)
