"""Mercer eigensystem of the exponential kernel ``P*exp(-alpha|s-t|)`` on [0, T].

The eigenfunctions are ``phi_k(t) = (w_k cos(w_k t) + alpha sin(w_k t)) / Z_k``
with eigenvalues ``lambda_k = 2 alpha P / (alpha^2 + w_k^2)``, where ``w_k``
is the unique root of

    2 * arctan(w / alpha) = k*pi - w*T,     w in ((k-1) pi/T, k pi/T).

Besides the analytic spectrum this module carries two independent checks:
a Nystrom eigendecomposition of the sampled kernel and direct quadrature
of the integral equation.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg, special

from ftcap.covariance_mi import covariance_matrix, uniform_grid
from ftcap.errors import InsufficientDepthError, NumericalError

# relative bracket width for the eigenfrequency bisection, in units of pi/T
ROOT_REL_TOL = 1e-12
MAX_PAIRS = 100_000
# pairs whose closed-form Z is re-verified by quadrature at build time
Z_SELF_CHECK = 3
Z_CHECK_RTOL = 1e-10

_QUAD = dict(epsabs=1e-14, epsrel=1e-13, limit=400)


def _bisection_steps(T, tol):
    if tol is None:
        return math.ceil(math.log2(1.0 / ROOT_REL_TOL))
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return min(max(math.ceil(math.log2(math.pi / (T * tol))), 1), 64)


def _omega_roots(k_first, count, alpha, T, steps):
    # bisect on u = w*T - (k-1)*pi in (0, pi); avoids cancellation at large k
    base = (np.arange(count, dtype=np.float64) + (k_first - 1)) * np.pi
    scale = alpha * T
    lo = np.zeros(count)
    hi = np.full(count, np.pi)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        below = 2.0 * np.arctan((base + mid) / scale) + mid - np.pi < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return (base + 0.5 * (lo + hi)) / T


def omega_root(k, alpha, T, tol=None):
    """k-th eigenfrequency (rad/s), by bisection to bracket width ``tol``.

    The default width is ``1e-12 * pi / T``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_positive(alpha=alpha, T=T)
    return float(_omega_roots(int(k), 1, alpha, T, _bisection_steps(T, tol))[0])


def normalization_constant(omega, alpha, T):
    """``sqrt(int_0^T (w cos wt + alpha sin wt)^2 dt)``, closed form.

    Works elementwise on arrays of ``omega``.
    """
    w = np.asarray(omega, dtype=np.float64)
    sq = (
        0.5 * (w * w + alpha * alpha) * T
        + (w * w - alpha * alpha) * np.sin(2.0 * w * T) / (4.0 * w)
        + alpha * np.sin(w * T) ** 2
    )
    out = np.sqrt(sq)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class EigenPair:
    k: int
    omega: float
    lam: float
    Z: float
    alpha: float
    T: float


def make_pair(k, omega, P, alpha, T):
    """EigenPair for an arbitrary frequency; eigenvalue and Z follow from ``omega``."""
    lam = 2.0 * alpha * P / (alpha * alpha + omega * omega)
    return EigenPair(k, float(omega), float(lam), float(normalization_constant(omega, alpha, T)), alpha, T)


@dataclass(frozen=True, eq=False)
class MercerSpectrum:
    P: float
    alpha: float
    T: float
    omega: np.ndarray
    lam: np.ndarray
    Z: np.ndarray
    trace_partial: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "trace_partial", math.fsum(self.lam))

    def __len__(self):
        return len(self.lam)

    @property
    def K(self):
        return len(self.lam)

    @property
    def energy(self):
        return self.P * self.T

    @property
    def trace_deficit(self):
        """``P*T - sum(lambda_k)``: the exact eigenvalue tail by the trace identity."""
        return max(self.energy - self.trace_partial, 0.0)

    @property
    def square_deficit(self):
        """``tr(M^2) - sum(lambda_k^2)``: the tail of the squared eigenvalues.

        Capped by the analytic bound, since the subtraction has a roundoff
        floor of about ``1e-12 * tr(M^2)`` once the true tail is tiny.
        """
        if self.P == 0:
            return 0.0
        closed = trace_square_closed(self.P, self.alpha, self.T)
        diff = max(closed - math.fsum(self.lam * self.lam), 0.0)
        return min(diff, analytic_square_tail(self.P, self.alpha, self.T, self.K))

    @property
    def tail_bound(self):
        """Analytic upper bound on ``trace_deficit`` from ``w_k > (k-1) pi / T``."""
        return analytic_trace_tail(self.P, self.alpha, self.T, self.K)

    def pair(self, k):
        i = k - 1
        if not 0 <= i < self.K:
            raise IndexError(f"k={k} outside 1..{self.K}")
        return EigenPair(k, float(self.omega[i]), float(self.lam[i]), float(self.Z[i]), self.alpha, self.T)

    @property
    def pairs(self):
        return [self.pair(k) for k in range(1, self.K + 1)]


def analytic_trace_tail(P, alpha, T, K):
    """Bound on ``sum_{k>K} lambda_k`` using ``lambda_k < 2 alpha P T^2 / ((k-1) pi)^2``."""
    if K < 1:
        return P * T
    return 2.0 * alpha * P * T * T / math.pi**2 * float(special.polygamma(1, K))


def analytic_square_tail(P, alpha, T, K):
    """Bound on ``sum_{k>K} lambda_k^2``, same argument as :func:`analytic_trace_tail`."""
    if K < 1:
        return trace_square_closed(P, alpha, T)
    c = 2.0 * alpha * P * T * T / math.pi**2
    return c * c * float(special.polygamma(3, K)) / 6.0


def _check_positive(**kw):
    for name, value in kw.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def _verify_normalization(omega, alpha, T):
    for w in omega[:Z_SELF_CHECK]:
        quad, _ = integrate.quad(
            lambda t: (w * math.cos(w * t) + alpha * math.sin(w * t)) ** 2, 0.0, T, **_QUAD
        )
        closed = float(normalization_constant(w, alpha, T)) ** 2
        if abs(closed - quad) > Z_CHECK_RTOL * quad:
            raise NumericalError(
                f"normalization self-check failed at omega={w}: closed {closed} vs quadrature {quad}"
            )


def _build(P, alpha, T, K):
    omega = _omega_roots(1, K, alpha, T, _bisection_steps(T, None))
    lam = 2.0 * alpha * P / (alpha * alpha + omega * omega)
    Z = normalization_constant(omega, alpha, T)
    _verify_normalization(omega, alpha, T)
    return MercerSpectrum(P, alpha, T, omega, lam, Z)


def exponential_spectrum(P, alpha, T, K=None, tail_tol=None, max_K=MAX_PAIRS):
    """Eigenpairs ``k = 1..K`` in ascending order.

    With ``tail_tol`` instead of ``K``, the spectrum is doubled from 64 pairs
    until ``P*T - sum(lambda)`` drops below ``tail_tol``; exceeding ``max_K``
    raises :class:`InsufficientDepthError`.
    """
    if not P >= 0:
        raise ValueError(f"P must be nonnegative, got {P}")
    _check_positive(alpha=alpha, T=T)
    if (K is None) == (tail_tol is None):
        raise ValueError("give exactly one of K or tail_tol")
    if K is not None:
        if K < 0:
            raise ValueError(f"K must be nonnegative, got {K}")
        return _build(P, alpha, T, int(K))

    K = 0
    while True:
        spec = _build(P, alpha, T, K)
        if spec.trace_deficit < tail_tol:
            return spec
        if K >= max_K:
            raise InsufficientDepthError(
                f"trace deficit {spec.trace_deficit:.3g} still above {tail_tol:g} at K={K}",
                K_used=K,
                tail_bound=spec.trace_deficit,
            )
        K = min(max(2 * K, 64), max_K)


def eigenfunction_eval(pair, t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or np.any(t > pair.T):
        raise ValueError(f"t must lie in [0, {pair.T}]")
    w, a = pair.omega, pair.alpha
    out = (w * np.cos(w * t) + a * np.sin(w * t)) / pair.Z
    return out[()] if out.ndim == 0 else out


def eigenfunction_derivative(pair, t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or np.any(t > pair.T):
        raise ValueError(f"t must lie in [0, {pair.T}]")
    w, a = pair.omega, pair.alpha
    out = w * (a * np.cos(w * t) - w * np.sin(w * t)) / pair.Z
    return out[()] if out.ndim == 0 else out


def _apply_kernel(P, alpha, T, phi, s):
    # split at t = s where the kernel has its kink
    left = 0.0
    right = 0.0
    if s > 0:
        left, _ = integrate.quad(lambda t: P * math.exp(-alpha * (s - t)) * phi(t), 0.0, s, **_QUAD)
    if s < T:
        right, _ = integrate.quad(lambda t: P * math.exp(-alpha * (t - s)) * phi(t), s, T, **_QUAD)
    return left + right


def integral_equation_residual(pair, P, alpha, T, probe_points=17):
    """``max_s |lambda phi(s) - int_0^T P e^{-alpha|s-t|} phi(t) dt|`` over probes.

    Probes are evenly spaced on [0, T] (the midpoint when ``probe_points == 1``).
    """
    if probe_points < 1:
        raise ValueError("probe_points must be >= 1")
    probes = np.linspace(0.0, T, probe_points) if probe_points > 1 else np.array([0.5 * T])
    w, a, Z = pair.omega, pair.alpha, pair.Z

    def phi(t):
        return (w * math.cos(w * t) + a * math.sin(w * t)) / Z

    worst = 0.0
    for s in probes:
        s = float(s)
        worst = max(worst, abs(pair.lam * phi(s) - _apply_kernel(P, alpha, T, phi, s)))
    return worst


def gram_matrix(pairs):
    """Quadrature inner products ``int_0^T phi_i phi_j dt``."""
    m = len(pairs)
    G = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            p, q = pairs[i], pairs[j]

            def f(t, p=p, q=q):
                return (
                    (p.omega * math.cos(p.omega * t) + p.alpha * math.sin(p.omega * t))
                    * (q.omega * math.cos(q.omega * t) + q.alpha * math.sin(q.omega * t))
                    / (p.Z * q.Z)
                )

            G[i, j] = G[j, i] = integrate.quad(f, 0.0, p.T, **_QUAD)[0]
    return G


def nystrom_spectrum(kernel, T, n, top_m):
    """Largest ``top_m`` eigenvalues of ``(T/n) K`` on the uniform n-point grid, descending."""
    if not 1 <= top_m <= n:
        raise ValueError(f"need 1 <= top_m <= n, got top_m={top_m}, n={n}")
    grid = uniform_grid(T, n)
    M = covariance_matrix(kernel, grid)
    M *= T / n
    try:
        ev = linalg.eigvalsh(M, subset_by_index=[n - top_m, n - 1], check_finite=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return ev[::-1].copy()


def trace_square_closed(P, alpha, T):
    """``sum_k lambda_k^2 = (P^2/alpha) (T - (1 - e^{-2 alpha T}) / (2 alpha))``."""
    _check_positive(alpha=alpha, T=T)
    x = 2.0 * alpha * T
    if x < 1e-3:
        # 1 - (1 - e^-x)/x
        gap = x / 2.0 - x * x / 6.0 + x**3 / 24.0 - x**4 / 120.0
    else:
        gap = 1.0 + math.expm1(-x) / x
    return P * P / alpha * T * gap
