"""Finite-time capacity over AWGN versus the classical Shannon rate.

All rates are in nats per second; conversion to bits happens in the CLI.

The Mercer series ``I(T) = 0.5 * sum_k log(1 + 2 lambda_k / n0)`` is summed
over the available eigenpairs and its tail is bracketed exactly: with
``x - x^2/2 <= log(1+x) <= x`` the missing terms lie in

    [D/n0 - S/n0^2, D/n0]

where ``D = P*T - sum(lambda_k)`` and ``S = tr(M^2) - sum(lambda_k^2)`` are
both known in closed form. The reported value is the lower end, so the
true series lies in ``[I_T, I_T + tail_bound]``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from ftcap.errors import DivergenceError, InsufficientDepthError, TheoremViolation
from ftcap.kernels import SincKernel
from ftcap.mercer import MAX_PAIRS, exponential_spectrum

DEFAULT_TAIL_TOL = 1e-9
SHANNON_EPSABS = 1e-10


class SeriesMI(NamedTuple):
    value: float
    K_used: int
    tail_bound: float


def finite_time_mi(spectrum, n0, tail_tol=DEFAULT_TAIL_TOL):
    """Mercer-series mutual information of a spectrum observed in AWGN of level ``n0/2``.

    Raises :class:`InsufficientDepthError` when the tail bracket is wider
    than ``tail_tol``.
    """
    if not n0 > 0:
        raise ValueError(f"n0 must be positive, got {n0}")
    lam = spectrum.lam
    partial = 0.5 * math.fsum(np.log1p(2.0 * lam / n0)) if len(lam) else 0.0
    upper = spectrum.trace_deficit / n0
    lower = max(upper - spectrum.square_deficit / (n0 * n0), 0.0)
    bound = upper - lower
    if bound > tail_tol:
        raise InsufficientDepthError(
            f"tail bound {bound:.3g} nats exceeds {tail_tol:g} with K={spectrum.K}; "
            "request more eigenpairs",
            K_used=spectrum.K,
            tail_bound=bound,
        )
    return SeriesMI(partial + lower, spectrum.K, bound)


def mercer_mi(P, alpha, T, n0, tail_tol=DEFAULT_TAIL_TOL, max_K=MAX_PAIRS):
    """Series MI for the exponential kernel, growing the spectrum until the tail fits."""
    K = 64
    while True:
        spectrum = exponential_spectrum(P, alpha, T, K=K)
        try:
            return finite_time_mi(spectrum, n0, tail_tol)
        except InsufficientDepthError:
            if K >= max_K:
                raise
        K = min(2 * K, max_K)


def _psd_callable(obj):
    if hasattr(obj, "psd"):
        return obj.psd
    if callable(obj):
        return obj
    raise TypeError(f"expected a PSD callable or kernel, got {type(obj).__name__}")


def shannon_capacity_quadrature(signal, noise, band=None):
    """``0.5 * int log(1 + S_X/S_N) df`` by adaptive quadrature.

    ``signal`` and ``noise`` are kernels (anything with ``.psd``) or plain
    callables of frequency. A band-limited signal (or explicit ``band``)
    restricts integration to ``[-band, band]``; otherwise the real line is
    mapped onto (-1, 1) by ``f = u / (1 - u^2)``.
    """
    S_X = _psd_callable(signal)
    S_N = _psd_callable(noise)
    if band is None and isinstance(signal, SincKernel):
        band = signal.bandwidth

    def h(f):
        sx = float(S_X(f))
        if sx == 0.0:
            return 0.0
        sn = float(S_N(f))
        if not sn > 0.0:
            raise DivergenceError(f"noise PSD vanishes at f={f} where the signal PSD is {sx}")
        return 0.5 * math.log1p(sx / sn)

    if band is not None:
        for f in np.linspace(-band, band, 65):
            h(f)
        value, err = integrate.quad(h, -band, band, epsabs=SHANNON_EPSABS / 10, epsrel=1e-12, limit=400)
    else:
        # log(1 + S_X/S_N) must decay faster than 1/f
        probes = [(f, f * h(f)) for f in (1e3, 1e5, 1e7)]
        for f in np.concatenate([-np.logspace(-3, 7, 41), [0.0], np.logspace(-3, 7, 41)]):
            h(f)
        if probes[-1][1] > 0 and probes[-1][1] >= probes[0][1]:
            raise DivergenceError("integrand of the Shannon integral does not decay; capacity diverges")

        def mapped(u):
            d = 1.0 - u * u
            return h(u / d) * (1.0 + u * u) / (d * d)

        value, err = integrate.quad(
            mapped, -1.0, 1.0, points=[0.0], epsabs=SHANNON_EPSABS / 10, epsrel=1e-12, limit=400
        )
    if not (math.isfinite(value) and math.isfinite(err)) or err > SHANNON_EPSABS * max(1.0, abs(value)):
        raise DivergenceError(f"Shannon integral did not converge (value {value}, error {err})")
    return value


def shannon_capacity_exponential(P, alpha, n0):
    """``0.5 * (sqrt(alpha^2 + 4 P alpha / n0) - alpha)``, rationalized for small P."""
    if not P >= 0:
        raise ValueError(f"P must be nonnegative, got {P}")
    if not (alpha > 0 and n0 > 0):
        raise ValueError("alpha and n0 must be positive")
    snr = 4.0 * P * alpha / n0
    return 0.5 * snr / (math.sqrt(alpha * alpha + snr) + alpha)


def instant_rate(P, n0):
    """Slope of I(T) at T = 0+, equal to P / n0."""
    if not n0 > 0:
        raise ValueError(f"n0 must be positive, got {n0}")
    return P / n0


def psi(x):
    """``(1 - e^{-x}) / x``."""
    if x < 1e-4:
        return 1.0 - x / 2.0 + x * x / 6.0
    return -math.expm1(-x) / x


def _one_minus_psi(x):
    if x < 1e-4:
        return x / 2.0 - x * x / 6.0
    return 1.0 - psi(x)


def exceed_delta(n0, alpha, T):
    """Power threshold below which the finite-time rate provably beats Shannon."""
    for name, v in (("n0", n0), ("alpha", alpha), ("T", T)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    x = 2.0 * alpha * T
    return n0 * alpha * psi(x) / _one_minus_psi(x) ** 2


@dataclass(frozen=True)
class CapacityReport:
    P: float
    alpha: float
    n0: float
    T: float
    I_T: float
    C_T: float
    C_sh: float
    margin: float
    K_used: int
    tail_bound: float
    delta: float
    below_delta: bool


def exceed_shannon_report(P, alpha, n0, T, tail_tol=DEFAULT_TAIL_TOL, max_K=MAX_PAIRS):
    est = mercer_mi(P, alpha, T, n0, tail_tol, max_K)
    C_T = est.value / T
    C_sh = shannon_capacity_exponential(P, alpha, n0)
    margin = C_T - C_sh
    delta = exceed_delta(n0, alpha, T)
    below = 0 < P < delta
    if below and not margin > 0:
        raise TheoremViolation(
            f"P={P} < delta={delta} but C(T) - C_sh = {margin} (T={T}, alpha={alpha}, n0={n0})"
        )
    return CapacityReport(P, alpha, n0, T, est.value, C_T, C_sh, margin, est.K_used, est.tail_bound, delta, below)


class DeltaIPoint(NamedTuple):
    T: float
    delta_I: float


def delta_I_asymptote(P, alpha, n0, T_list, tail_tol=DEFAULT_TAIL_TOL):
    """``I(T) - T * C_sh`` for each T."""
    T_list = list(T_list)
    if any(b <= a for a, b in zip(T_list, T_list[1:])):
        raise ValueError("T_list must be strictly ascending")
    C_sh = shannon_capacity_exponential(P, alpha, n0)
    return [DeltaIPoint(T, mercer_mi(P, alpha, T, n0, tail_tol).value - T * C_sh) for T in T_list]
