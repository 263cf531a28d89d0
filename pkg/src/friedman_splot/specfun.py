"""Special functions used by the rank tests.

Everything here works on Python floats and is free of shared state, so the
functions may be called from any thread.  The incomplete gamma and beta
functions use the usual series / continued-fraction split; every inverse is a
bracketed root search, so a failure to converge raises
:class:`~friedman_splot.errors.ConvergenceError` instead of returning a
number that merely looks plausible.

The studentized range is implemented for infinite degrees of freedom only,
which is the case the Nemenyi procedure needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .errors import ConvergenceError, DomainError

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_ITER = 10_000
_STD_NORMAL = NormalDist()


def _check_probability(p: float, name: str = "p", *, open_interval: bool = False) -> float:
    p = float(p)
    if not math.isfinite(p):
        raise DomainError(f"{name} must be finite, got {p!r}")
    if open_interval:
        if not 0.0 < p < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
    elif not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def _check_positive(x: float, name: str) -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"{name} must be a positive finite number, got {x!r}")
    return x


def _check_nonneg(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"{name} must be non-negative, got {x!r}")
    return x


@dataclass(frozen=True)
class GammaParams:
    """Shape/rate parameterisation: density ``rate**shape / Gamma(shape) * x**(shape-1) * exp(-rate*x)``."""

    shape: float
    rate: float = 1.0

    def __post_init__(self) -> None:
        _check_positive(self.shape, "shape")
        _check_positive(self.rate, "rate")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate**2

    @property
    def skewness(self) -> float:
        return 2.0 / math.sqrt(self.shape)

    @property
    def excess_kurtosis(self) -> float:
        return 6.0 / self.shape


# ---------------------------------------------------------------------------
# gamma function family


def log_gamma_fn(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = _check_positive(x, "x")
    return math.lgamma(x)


def _gamma_series(a: float, x: float) -> float:
    # P(a, x) by its power series; good for x < a + 1
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cfrac(a: float, x: float) -> float:
    # Q(a, x) by modified Lentz on the Legendre continued fraction; x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def reg_gamma_lower(shape: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(shape, x)``."""
    a = _check_positive(shape, "shape")
    x = _check_nonneg(x, "x")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_cfrac(a, x))


def reg_gamma_upper(shape: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(shape, x) = 1 - P(shape, x)``, accurate in the far tail."""
    a = _check_positive(shape, "shape")
    x = _check_nonneg(x, "x")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_cfrac(a, x))


def gamma_cdf(x: float, params: GammaParams) -> float:
    return reg_gamma_lower(params.shape, params.rate * _check_nonneg(x, "x"))


def gamma_sf(x: float, params: GammaParams) -> float:
    return reg_gamma_upper(params.shape, params.rate * _check_nonneg(x, "x"))


def _brent(f, a: float, b: float, fa: float, fb: float, xtol: float, maxiter: int = 300) -> float:
    """Brent's root finder on a sign-changing bracket [a, b]."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise ConvergenceError("root is not bracketed")
    c, fc = b, fb
    d = e = b - a
    for _ in range(maxiter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * xtol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = f(b)
    raise ConvergenceError("Brent iteration limit reached")


def _gamma_initial_guess(p: float, a: float) -> float:
    # Wilson-Hilferty cube-root normal approximation; small-shape lower-tail form as fallback
    z = _STD_NORMAL.inv_cdf(p)
    base = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * math.sqrt(a))
    if a >= 1.0 and base > 0.0:
        return a * base**3
    return math.exp((math.log(p) + math.lgamma(a + 1.0)) / a)


def gamma_quantile(p: float, params: GammaParams) -> float:
    """Inverse of the gamma CDF: ``x`` with ``gamma_cdf(x, params) == p``.

    The search runs on ``log(x)`` because small shapes put low quantiles many
    orders of magnitude below the mean.  For ``p > 0.5`` the upper tail is
    matched instead, keeping the complement ``1 - p`` exact.
    """
    p = _check_probability(p, open_interval=True)
    a = params.shape
    upper = p > 0.5
    q = 1.0 - p

    if upper:
        def g(u: float) -> float:
            return q - reg_gamma_upper(a, math.exp(u))
    else:
        def g(u: float) -> float:
            return reg_gamma_lower(a, math.exp(u)) - p

    u0 = math.log(max(_gamma_initial_guess(p, a), 1e-300))
    lo, hi = u0 - 0.5, u0 + 0.5
    glo, ghi = g(lo), g(hi)
    step = 1.0
    while glo > 0.0:
        hi, ghi = lo, glo
        lo -= step
        step *= 2.0
        if lo < -745.0:
            raise ConvergenceError(f"gamma quantile underflows (p={p}, shape={a})")
        glo = g(lo)
    step = 1.0
    while ghi < 0.0:
        lo, glo = hi, ghi
        hi += step
        step *= 2.0
        if hi > 709.0:
            raise ConvergenceError(f"gamma quantile overflows (p={p}, shape={a})")
        ghi = g(hi)
    u = _brent(g, lo, hi, glo, ghi, xtol=1e-14)
    return math.exp(u) / params.rate


def chi_square_sf(x: float, df: float) -> float:
    """Upper tail probability of the chi-square distribution."""
    x = _check_nonneg(x, "x")
    df = _check_positive(df, "df")
    return reg_gamma_upper(0.5 * df, 0.5 * x)


def chi_square_quantile(p: float, df: float) -> float:
    df = _check_positive(df, "df")
    return gamma_quantile(p, GammaParams(0.5 * df, 0.5))


# ---------------------------------------------------------------------------
# normal and Student t


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    return _STD_NORMAL.inv_cdf(_check_probability(p, open_interval=True))


def _beta_cfrac(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _reg_beta(a: float, b: float, x: float, y: float) -> float:
    # I_x(a, b) with y = 1 - x supplied separately to keep precision near x = 1
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cfrac(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cfrac(b, a, y) / b


def reg_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    a = _check_positive(a, "a")
    b = _check_positive(b, "b")
    x = _check_probability(x, "x")
    return _reg_beta(a, b, x, 1.0 - x)


def t_sf(t: float, df: float) -> float:
    """Upper tail ``P(T > t)`` of Student's t."""
    df = _check_positive(df, "df")
    t = float(t)
    if math.isnan(t):
        raise DomainError("t must not be NaN")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    tail = 0.5 * _reg_beta(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2))
    return tail if t >= 0.0 else 1.0 - tail


def t_cdf(t: float, df: float) -> float:
    return t_sf(-float(t), df)


def t_quantile(p: float, df: float) -> float:
    """The ``p``-quantile of Student's t with ``df`` degrees of freedom."""
    p = _check_probability(p, open_interval=True)
    df = _check_positive(df, "df")
    if p == 0.5:
        return 0.0
    tail = min(p, 1.0 - p)

    def g(t: float) -> float:
        return t_sf(t, df) - tail

    hi = max(1.0, 2.0 * abs(_STD_NORMAL.inv_cdf(tail)))
    ghi = g(hi)
    while ghi > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError(f"t quantile bracket failed (p={p}, df={df})")
        ghi = g(hi)
    t = _brent(g, 0.0, hi, 0.5 - tail, ghi, xtol=1e-13)
    return t if p > 0.5 else -t


# ---------------------------------------------------------------------------
# studentized range, infinite degrees of freedom

_RANGE_LIMIT = 9.0
_GL_ORDER = 16


@lru_cache(maxsize=4)
def _range_nodes(panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(-_RANGE_LIMIT, _RANGE_LIMIT, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    z = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    phi = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    cdf = np.array([normal_cdf(v) for v in z])
    return z, weights * phi, cdf


def _range_sf(q: float, k: int, panels: int) -> float:
    # 1 - F(q) = int k phi(z) [Phi(z)^(k-1) - (Phi(z) - Phi(z-q))^(k-1)] dz
    z, wphi, cdf = _range_nodes(panels)
    shifted = np.array([normal_cdf(v) for v in z - q])
    inner = np.clip(cdf - shifted, 0.0, 1.0)
    integrand = cdf ** (k - 1) - inner ** (k - 1)
    return float(min(1.0, max(0.0, k * np.dot(wphi, integrand))))


def _check_range_args(q: float, k: int) -> tuple[float, int]:
    q = _check_nonneg(q, "q")
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    return q, int(k)


def studentized_range_sf(q: float, k: int) -> float:
    """Upper tail of the range of ``k`` independent standard normals.

    The quadrature is run at two resolutions; disagreement beyond 1e-9 is
    reported as a :class:`ConvergenceError`.
    """
    q, k = _check_range_args(q, k)
    if q == 0.0:
        return 1.0
    if math.isinf(q):
        return 0.0
    coarse = _range_sf(q, k, 36)
    fine = _range_sf(q, k, 72)
    if abs(coarse - fine) > 1e-9:
        raise ConvergenceError(f"studentized range quadrature unstable at q={q}, k={k}")
    return fine


def studentized_range_cdf(q: float, k: int) -> float:
    return 1.0 - studentized_range_sf(q, k)


def studentized_range_quantile(p: float, k: int) -> float:
    """Quantile of the infinite-df studentized range (the ``q`` with ``cdf(q) == p``)."""
    p = _check_probability(p, open_interval=True)
    _, k = _check_range_args(0.0, k)
    target = 1.0 - p

    def g(q: float) -> float:
        return _range_sf(q, k, 72) - target

    hi = 4.0
    ghi = g(hi)
    while ghi > 0.0:
        hi *= 2.0
        if hi > 80.0:
            raise ConvergenceError(f"studentized range quantile bracket failed (p={p}, k={k})")
        ghi = g(hi)
    q = _brent(g, 0.0, hi, p, ghi, xtol=1e-11)
    studentized_range_sf(q, k)  # re-evaluate with the resolution check
    return q
