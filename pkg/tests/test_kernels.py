import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ftcap.kernels import (
    AWGN,
    ExponentialKernel,
    SincKernel,
    eval_autocorrelation,
    eval_psd,
    sinc,
    validate_kernel,
)


def test_exponential_at_zero_is_power():
    assert eval_autocorrelation(ExponentialKernel(1.0, 1.0), 0.0) == 1.0


def test_sinc_setting_matches_numpy_sinc():
    k = SincKernel(5.0, 0.1)
    t1 = np.linspace(0.0, 1.0, 37)
    t2 = np.linspace(0.3, 0.9, 37)
    np.testing.assert_allclose(eval_autocorrelation(k, t1 - t2), np.sinc(10 * (t1 - t2)), rtol=1e-14, atol=1e-15)


def test_exponential_direct_value():
    assert eval_autocorrelation(ExponentialKernel(2.0, 3.0), -0.5) == pytest.approx(2 * math.exp(-1.5), rel=1e-15)
    assert 2 * math.exp(-1.5) == pytest.approx(0.44626, abs=1e-5)


def test_psd_examples():
    assert eval_psd(ExponentialKernel(1.0, 1.0), 0.0) == 2.0
    assert eval_psd(SincKernel(5.0, 0.1), 6.0) == 0.0
    assert eval_psd(SincKernel(5.0, 0.1), 5.0) == 0.1
    f = np.linspace(0, 1e3, 2001)
    s = eval_psd(ExponentialKernel(1.0, 1.0), f)
    assert np.all(np.diff(s) < 0)
    assert s[-1] < 1e-6


def test_awgn_psd_is_flat():
    np.testing.assert_array_equal(AWGN(3.0).psd(np.array([-1e6, 0.0, 7.0])), 1.5)


def test_validate_kernels():
    rep = validate_kernel(ExponentialKernel(1.0, 1.0), 101)
    assert rep.ok and not rep.band_limited
    rep = validate_kernel(SincKernel(5.0, 0.1), 101)
    assert rep.ok and rep.band_limited
    with pytest.raises(ValueError):
        validate_kernel(SincKernel(5.0, 0.1), 1)


def test_validate_reports_instead_of_raising():
    class Broken(ExponentialKernel):
        def psd(self, f):
            return -np.ones_like(np.asarray(f, dtype=float))

    rep = validate_kernel(Broken(1.0, 1.0), 11)
    assert not rep.ok
    assert not rep.psd_nonnegative
    assert rep.violations == ["PSD is negative somewhere"]


@pytest.mark.parametrize("P,alpha", [(1.0, 1.0), (2.5, 0.3), (0.7, 4.0)])
def test_parseval_exponential(P, alpha):
    k = ExponentialKernel(P, alpha)
    total, _ = integrate.quad(lambda f: float(k.psd(f)), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
    assert total == pytest.approx(P, rel=1e-8)


def test_parseval_sinc():
    k = SincKernel(5.0, 0.1)
    assert k.power == 2 * 5.0 * 0.1
    assert eval_autocorrelation(k, 0.0) == k.power


def test_sinc_branch_is_continuous():
    xs = np.array([0.0, 5e-9, 9.999e-9, 1.0001e-8, 2e-8])
    np.testing.assert_allclose(sinc(xs), np.sin(np.pi * xs) / np.where(xs == 0, 1, np.pi * xs) + (xs == 0), rtol=1e-15)
    assert sinc(0.0) == 1.0


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ExponentialKernel(1.0, 0.0)
    with pytest.raises(ValueError):
        SincKernel(-1.0, 0.1)
    with pytest.raises(ValueError):
        AWGN(0.0)


@given(
    P=st.floats(0.01, 100),
    alpha=st.floats(0.01, 100),
    tau=st.floats(-50, 50),
)
def test_exponential_even_and_bounded(P, alpha, tau):
    k = ExponentialKernel(P, alpha)
    assert k.autocorrelation(tau) == k.autocorrelation(-tau)
    assert abs(k.autocorrelation(tau)) <= k.autocorrelation(0.0)


@given(
    W=st.floats(0.1, 50),
    level=st.floats(0.001, 10),
    tau=st.floats(-20, 20),
    f=st.floats(-500, 500),
)
def test_sinc_even_bounded_nonnegative_psd(W, level, tau, f):
    k = SincKernel(W, level)
    assert k.autocorrelation(tau) == k.autocorrelation(-tau)
    assert abs(k.autocorrelation(tau)) <= k.power * (1 + 1e-15)
    assert k.psd(f) >= 0
