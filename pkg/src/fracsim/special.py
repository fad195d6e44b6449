"""Gamma, Beta, Mittag-Leffler and Wright functions on the ranges the lab uses.

The two-parameter Mittag-Leffler function E_{a,b} is only ever needed on the
closed negative real axis, where it is completely monotone for a in (0,1].
Evaluation uses three regimes, writing x = -z >= 0:

* power series for small x (stopped once terms fall below 1e-18 of the
  running sum; the cutoff is argument- and order-dependent so that
  floating-point cancellation never exceeds ~1e4 ulps of the max term),
* a branch-cut (Laplace-type) integral representation for moderate x,
  evaluated once per (a, b) pair on Chebyshev nodes in log x and reused
  through a cached interpolant,
* the algebraic asymptotic expansion (8 terms) for x >= 50.

The Wright function phi_a(t) = sum (-t)^n / (n! Gamma(-a n + 1 - a)) is an
entire function whose truncated sum suffers severe cancellation for larger t,
so it is summed in adaptive-precision arithmetic with the working precision
chosen from a float-level scan of the term magnitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate as _integrate
from scipy import special as _sp

from .errors import DomainError, NumericalError, UnsupportedRangeError

__all__ = [
    "MLParams",
    "gamma",
    "beta_fn",
    "mittag_leffler",
    "ml_e_neg",
    "wright_phi",
    "wright_tail_cut",
]

_SERIES_STOP = 1e-18
_ASYMPTOTIC_EDGE = 50.0
_ASYMPTOTIC_TERMS = 8
_MAX_SERIES_TERMS = 600


def gamma(x: float) -> float:
    """Euler Gamma restricted to positive real arguments."""
    if not np.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires x > 0, got {x!r}")
    return float(_sp.gamma(x))


def beta_fn(a: float, b: float) -> float:
    """Euler Beta B(a, b) for positive real arguments."""
    if not (np.isfinite(a) and np.isfinite(b)) or a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta_fn requires a, b > 0, got {a!r}, {b!r}")
    return float(_sp.beta(a, b))


@dataclass(frozen=True)
class MLParams:
    """Order parameters of the two-parameter Mittag-Leffler function."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (self.beta > 0.0 and np.isfinite(self.beta)):
            raise DomainError(f"beta must be positive, got {self.beta!r}")


def mittag_leffler(params: MLParams, x: float) -> float:
    """E_{alpha,beta}(x) for real x <= 0."""
    if not np.isfinite(x):
        raise DomainError(f"argument must be finite, got {x!r}")
    if x > 0.0:
        raise UnsupportedRangeError(
            "mittag_leffler is only supported on the negative real axis"
        )
    return float(ml_e_neg(params.alpha, params.beta, -x))


# --------------------------------------------------------------------------
# vectorized E_{a,b}(-y), y >= 0
# --------------------------------------------------------------------------


def _series_neg(alpha: float, beta: float, y: np.ndarray) -> np.ndarray:
    """Power series sum E_{a,b}(-y) with compensated (Kahan) accumulation."""
    total = np.full_like(y, float(_sp.rgamma(beta)))
    comp = np.zeros_like(y)
    power = np.ones_like(y)
    for n in range(1, _MAX_SERIES_TERMS):
        power = power * (-y)
        term = power * float(_sp.rgamma(alpha * n + beta))
        t = total + term
        # Kahan compensation: recover the rounding loss of the addition.
        comp += np.where(
            np.abs(total) >= np.abs(term),
            (total - t) + term,
            (term - t) + total,
        )
        total = t
        if np.max(np.abs(term)) < _SERIES_STOP * max(1.0, np.max(np.abs(total))):
            break
    else:
        raise NumericalError("Mittag-Leffler series did not converge")
    return total + comp


def _asymptotic_neg(alpha: float, beta: float, y: np.ndarray) -> np.ndarray:
    """Algebraic large-argument expansion of E_{a,b}(-y)."""
    out = np.zeros_like(y)
    inv = 1.0 / y
    power = np.ones_like(y)
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        power = power * inv
        coeff = float(_sp.rgamma(beta - alpha * k))
        if coeff != 0.0:
            out += (-1.0) ** (k + 1) * coeff * power
    return out


def _branch_cut_point(alpha: float, beta: float, x: float) -> float:
    """E_{a,b}(-x) by adaptive quadrature of the branch-cut representation.

    Valid for 0 < a < 1 and 0 < b <= 1 (so the collapsed Hankel contour
    carries no origin contribution) and x > 0.
    """
    s_b = math.sin(math.pi * beta)
    s_ab = math.sin(math.pi * (alpha - beta))
    c_a = math.cos(math.pi * alpha)

    def f(r: float) -> float:
        ra = r**alpha
        num = ra * s_b - x * s_ab
        den = ra * ra + 2.0 * x * ra * c_a + x * x
        return math.exp(-r) * r ** (alpha - beta) * num / den / math.pi

    # On [0, 1] substitute r = v^(1/a); the integrand becomes v^((1-b)/a) *
    # smooth, removing the endpoint singularity for b <= 1.
    inv_a = 1.0 / alpha

    def f_sub(v: float) -> float:
        r = v**inv_a
        ra = v
        num = ra * s_b - x * s_ab
        den = ra * ra + 2.0 * x * ra * c_a + x * x
        return (
            math.exp(-r)
            * v ** ((1.0 - beta) / alpha)
            * num
            / den
            / (alpha * math.pi)
        )

    head, _ = _integrate.quad(f_sub, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    r_max = 120.0
    # The denominator is smallest near r ~ x^(1/a); hint the adaptive rule.
    r_pole = x**inv_a if c_a < 0.0 else None
    points = [r_pole] if (r_pole is not None and 1.0 < r_pole < r_max) else None
    tail, _ = _integrate.quad(
        f, 1.0, r_max, epsabs=1e-14, epsrel=1e-12, limit=400, points=points
    )
    return head + tail


def _series_edge(alpha: float, beta: float) -> float:
    """Largest series argument keeping alternating-sum cancellation ~<= 1e4."""
    n = np.arange(1, _MAX_SERIES_TERMS)
    lg = _sp.gammaln(alpha * n + beta)
    for x in (5.0, 4.0, 3.0, 2.5, 2.0, 1.6, 1.3, 1.0, 0.8, 0.6, 0.5, 0.4, 0.3):
        if np.max(n * math.log(x) - lg) <= math.log(1e4):
            return x
    return 0.25


class _MLMidInterpolant:
    """Chebyshev interpolant of E_{a,b}(-e^v) on the mid-range, 0 < b <= 1."""

    def __init__(self, alpha: float, beta: float, x_lo: float) -> None:
        self.x_lo = x_lo
        lo, hi = math.log(x_lo * 0.9), math.log(_ASYMPTOTIC_EDGE * 1.1)

        def f(v: np.ndarray) -> np.ndarray:
            return np.array(
                [_branch_cut_point(alpha, beta, math.exp(t)) for t in np.atleast_1d(v)]
            )

        self.cheb = np.polynomial.chebyshev.Chebyshev.interpolate(
            f, deg=110, domain=[lo, hi]
        )

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.cheb(np.log(y))


_ML_CACHE: dict[tuple[float, float], tuple[float, _MLMidInterpolant | None]] = {}


def _get_mid(alpha: float, beta: float) -> tuple[float, _MLMidInterpolant | None]:
    key = (alpha, beta)
    hit = _ML_CACHE.get(key)
    if hit is None:
        x_lo = _series_edge(alpha, beta)
        interp = _MLMidInterpolant(alpha, beta, x_lo) if beta <= 1.0 else None
        hit = (x_lo, interp)
        _ML_CACHE[key] = hit
    return hit


def ml_e_neg(alpha: float, beta: float, y):
    """E_{alpha,beta}(-y) for y >= 0, elementwise over arrays.

    alpha in (0, 1], beta > 0. Absolute accuracy ~1e-11 or better across
    y in [0, 1e6] for the (alpha, beta) pairs the solver uses.
    """
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    y_arr = np.atleast_1d(y_arr)
    if np.any(~np.isfinite(y_arr)) or np.any(y_arr < 0.0):
        raise DomainError("ml_e_neg requires finite y >= 0")
    if not (0.0 < alpha <= 1.0) or beta <= 0.0:
        raise DomainError(f"bad Mittag-Leffler orders alpha={alpha!r} beta={beta!r}")

    out = np.empty_like(y_arr)
    if alpha == 1.0:
        if beta == 1.0:
            out[:] = np.exp(-y_arr)
        elif beta == 2.0:
            small = y_arr < 1e-8
            out[small] = 1.0 - y_arr[small] / 2.0
            ys = y_arr[~small]
            out[~small] = -np.expm1(-ys) / ys
        else:
            # Only needed for small arguments in practice; the series is
            # benign there because terms decay like 1/n! for y <= ~30.
            if np.max(y_arr) > 30.0:
                raise UnsupportedRangeError(
                    "alpha=1 with non-integer beta supported only for y <= 30"
                )
            out[:] = _series_neg(alpha, beta, y_arr)
        return float(out[0]) if scalar else out

    x_lo, interp = _get_mid(alpha, beta)
    m_series = y_arr <= x_lo
    m_asym = y_arr >= _ASYMPTOTIC_EDGE
    m_mid = ~(m_series | m_asym)

    if np.any(m_series):
        out[m_series] = _series_neg(alpha, beta, y_arr[m_series])
    if np.any(m_asym):
        out[m_asym] = _asymptotic_neg(alpha, beta, y_arr[m_asym])
    if np.any(m_mid):
        ym = y_arr[m_mid]
        if beta <= 1.0:
            assert interp is not None
            out[m_mid] = interp(ym)
        else:
            # Step the second order parameter down with the exact recursion
            # E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z until b <= 1.
            c = float(_sp.rgamma(beta - alpha))
            out[m_mid] = (c - ml_e_neg(alpha, beta - alpha, ym)) / ym
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# fast bulk evaluator for solver hot paths
# --------------------------------------------------------------------------


class _FastMLNeg:
    """Piecewise Chebyshev fit of y -> E_{a,b}(-y) in v = log1p(y).

    Built once per (a, b) from the regime evaluator `ml_e_neg` and reused for
    the O(M^2 * modes) weight evaluations of the time stepper. Fit error is
    far below the regime evaluator's own accuracy (validated in tests).
    """

    DEG = 14
    PIECE = 0.25  # piece width in log1p(y)

    def __init__(self, alpha: float, beta: float, y_max: float) -> None:
        self.alpha, self.beta = alpha, beta
        self.v_max = math.log1p(max(y_max, 1.0)) + 1e-9
        self.n_pieces = max(4, int(math.ceil(self.v_max / self.PIECE)))
        self.h = self.v_max / self.n_pieces
        nodes = np.cos(np.pi * (np.arange(self.DEG + 1) + 0.5) / (self.DEG + 1.0))
        coeffs = np.empty((self.DEG + 1, self.n_pieces))
        for i in range(self.n_pieces):
            lo, hi = i * self.h, (i + 1) * self.h
            v = 0.5 * (hi + lo) + 0.5 * (hi - lo) * nodes
            f = ml_e_neg(alpha, beta, np.expm1(v))
            # First-kind Chebyshev coefficients by discrete cosine projection.
            k = np.arange(self.DEG + 1)
            m = np.cos(np.pi * np.outer(k, np.arange(self.DEG + 1) + 0.5) /
                       (self.DEG + 1.0))
            c = 2.0 / (self.DEG + 1.0) * (m @ f)
            c[0] *= 0.5
            coeffs[:, i] = c
        self.coeffs = coeffs

    def __call__(self, y: np.ndarray) -> np.ndarray:
        v = np.log1p(y)
        idx = np.minimum((v / self.h).astype(np.intp), self.n_pieces - 1)
        x = (v - (idx + 0.5) * self.h) * (2.0 / self.h)
        x2 = 2.0 * x
        c = self.coeffs
        b1 = np.zeros_like(y)
        b2 = np.zeros_like(y)
        for k in range(self.DEG, 0, -1):
            b1, b2 = x2 * b1 - b2 + c[k][idx], b1
        return x * b1 - b2 + c[0][idx]


_FAST_CACHE: dict[tuple[float, float], _FastMLNeg] = {}


def ml_neg_fast(alpha: float, beta: float, y: np.ndarray, y_max_hint: float) -> np.ndarray:
    """Bulk E_{alpha,beta}(-y) via a cached interpolant covering [0, y_max_hint]."""
    key = (alpha, beta)
    ev = _FAST_CACHE.get(key)
    if ev is None or math.log1p(max(y_max_hint, 1.0)) > ev.v_max:
        ev = _FastMLNeg(alpha, beta, 2.0 * y_max_hint)
        _FAST_CACHE[key] = ev
    return ev(np.asarray(y, dtype=float))


# --------------------------------------------------------------------------
# Wright function phi_alpha on the nonnegative axis
# --------------------------------------------------------------------------


def wright_tail_cut(alpha: float) -> float:
    """Argument beyond which phi_alpha is below ~1e-14 (stretched-exponential tail)."""
    b = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    return (34.0 / b) ** (1.0 - alpha)


def _wright_log_rgamma_abs(z: np.ndarray) -> np.ndarray:
    """log |1/Gamma(z)| for real z, using reflection for z <= 0."""
    out = np.empty_like(z)
    pos = z > 0.0
    out[pos] = -_sp.gammaln(z[pos])
    zn = z[~pos]
    # |Gamma(z)| = pi / (|sin(pi z)| Gamma(1 - z)) for non-integer z < 0.
    s = np.abs(np.sin(np.pi * zn))
    with np.errstate(divide="ignore"):
        out[~pos] = np.where(
            s == 0.0, -np.inf, np.log(s) + _sp.gammaln(1.0 - zn) - math.log(math.pi)
        )
    return out


def _wright_series_mp(alpha: float, theta: float) -> float:
    """Adaptive-precision Wright sum; term magnitudes scanned in floats first."""
    n = np.arange(0, 2000)
    with np.errstate(divide="ignore", invalid="ignore"):
        logterm = (
            np.where(n == 0, 0.0, n * math.log(max(theta, 1e-300)))
            - _sp.gammaln(n + 1.0)
            + _wright_log_rgamma_abs(1.0 - alpha * (n + 1.0))
        )
    logterm[~np.isfinite(logterm)] = -np.inf
    peak = float(np.max(logterm))
    # Truncate after the last term within ~1e-43 of the peak; isolated poles
    # of 1/Gamma give -inf entries that must not trigger early truncation.
    keep = np.where(logterm >= peak - 100.0)[0]
    n_stop = int(keep[-1]) + 1
    dps = max(30, int(peak / math.log(10.0)) + 30)
    with mpmath.workdps(dps):
        t = mpmath.mpf(theta)
        a = mpmath.mpf(alpha)
        total = mpmath.mpf(0)
        for k in range(n_stop):
            # The Gamma argument must be formed in working precision: rounding
            # it in doubles can snap onto a Gamma pole and silently zero a
            # term that the consistently-rounded sum relies on.
            term = (-t) ** k / mpmath.factorial(k) * mpmath.rgamma(1 - a * (k + 1))
            total += term
        return float(total)


def wright_phi(alpha: float, theta: float) -> float:
    """Wright function phi_alpha(theta) for alpha in (0,1), theta >= 0.

    Beyond the stretched-exponential cutoff (value < ~1e-14) the tail is
    continued by the leading exponential factor matched at the cutoff, which
    keeps the result positive and far below every tolerance used here.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not np.isfinite(theta) or theta < 0.0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    cut = wright_tail_cut(alpha)
    if theta <= cut:
        return _wright_series_mp(alpha, theta)
    b = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    e = 1.0 / (1.0 - alpha)
    base = _wright_series_mp(alpha, cut)
    return base * math.exp(b * cut**e - b * theta**e)
