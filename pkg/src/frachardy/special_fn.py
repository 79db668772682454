"""Scalar and array special functions used by every closed form in the package.

Everything here works in double precision. Gamma values are always handled
through their logarithms together with an explicit sign, so that ratios such
as ``Gamma(n + a) / Gamma(n + b)`` stay finite for ``n`` in the millions.

The reciprocal Gamma function is taken to vanish at the poles
``0, -1, -2, ...``; that convention is relied upon throughout the package.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, IndeterminatePole, NoConvergence, NumeratorPole, PoleError

__all__ = [
    "SignedLogGamma",
    "log_gamma",
    "log_gamma_array",
    "rgamma",
    "gamma_ratio",
    "gamma_ratio_shifted",
    "binomial_real",
    "pochhammer",
    "chebyshev_u",
    "digamma",
    "sinpi",
    "quad_adaptive",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_MIN = 10.0

# B_{2k} / (2k (2k - 1)) for k = 1..8
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# B_{2k} / (2k) for k = 1..7
_DIGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


class SignedLogGamma(NamedTuple):
    """``log|Gamma(x)|`` together with the sign of ``Gamma(x)``.

    ``sign == 0`` marks a pole (``x`` a nonpositive integer); ``log_abs`` is
    then ``inf``.
    """

    log_abs: float
    sign: int

    def value(self) -> float:
        if self.sign == 0:
            return math.inf
        return self.sign * math.exp(self.log_abs)


def _is_pole(x):
    x = np.asarray(x, dtype=float)
    return (x <= 0) & (x == np.floor(x))


def sinpi(x):
    """``sin(pi * x)`` with exact zeros at the integers.

    The argument is reduced exactly to ``[-1/2, 1/2]`` before calling ``sin``,
    so the result keeps full relative accuracy near the integers.
    """
    x = np.asarray(x, dtype=float)
    r = x - 2.0 * np.round(0.5 * x)  # exact, r in [-1, 1]
    out = np.where(
        r > 0.5,
        np.sin(np.pi * (1.0 - r)),
        np.where(r < -0.5, -np.sin(np.pi * (1.0 + r)), np.sin(np.pi * r)),
    )
    out = np.where(x == np.floor(x), 0.0, out)
    return out if out.ndim else float(out)


def _stirling_correction(y):
    """Tail of the Stirling series, ``log Gamma(y) - [(y - 1/2) log y - y + log sqrt(2 pi)]``."""
    inv = 1.0 / y
    inv2 = inv * inv
    acc = np.zeros_like(y)
    for c in reversed(_STIRLING_COEFFS):
        acc = acc * inv2 + c
    return acc * inv


def _lgamma_positive(x):
    """``log Gamma(x)`` for an array of ``x >= 1/2``."""
    x = np.asarray(x, dtype=float)
    y = x.copy()
    logprod = np.zeros_like(x)
    prod = np.ones_like(x)
    small = y < _STIRLING_MIN
    # shift small arguments up; the running product stays below 10! * 11
    while np.any(small):
        prod = np.where(small, prod * y, prod)
        y = np.where(small, y + 1.0, y)
        small = y < _STIRLING_MIN
    logprod = np.log(prod)
    core = (y - 0.5) * np.log(y) - y + _LOG_SQRT_2PI + _stirling_correction(y)
    return core - logprod


def log_gamma_array(x):
    """Vectorised ``(log|Gamma(x)|, sign Gamma(x))`` for real arrays.

    Poles give ``(inf, 0)``. Arguments below ``1/2`` go through the reflection
    formula ``Gamma(x) Gamma(1 - x) = pi / sin(pi x)``.
    """
    x = np.asarray(x, dtype=float)
    log_abs = np.empty_like(x)
    sign = np.ones_like(x)
    pole = _is_pole(x)
    right = (x >= 0.5) & ~pole
    left = (x < 0.5) & ~pole
    if np.any(right):
        log_abs[right] = _lgamma_positive(x[right])
    if np.any(left):
        xl = x[left]
        s = np.asarray(sinpi(xl), dtype=float)
        log_abs[left] = math.log(math.pi) - np.log(np.abs(s)) - _lgamma_positive(1.0 - xl)
        sign[left] = np.sign(s)
    log_abs[pole] = np.inf
    sign[pole] = 0.0
    return log_abs, sign


def log_gamma(x: float) -> SignedLogGamma:
    """Natural log of ``|Gamma(x)|`` with the sign of ``Gamma(x)``.

    >>> log_gamma(1.0)
    SignedLogGamma(log_abs=0.0, sign=1)
    """
    if not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite argument, got {x!r}")
    la, sg = log_gamma_array(np.array([x]))
    return SignedLogGamma(float(la[0]), int(sg[0]))


def rgamma(x):
    """Reciprocal Gamma function, ``0`` at the poles."""
    la, sg = log_gamma_array(np.atleast_1d(x))
    out = np.where(sg == 0, 0.0, sg * np.exp(-np.where(sg == 0, 0.0, la)))
    return out if np.ndim(x) else float(out[0])


def _log_ratio_stirling(x, a, b):
    lx = np.log(x)
    ya, yb = x + a, x + b
    return (
        (a - b) * lx
        + (ya - 0.5) * np.log1p(a / x)
        - (yb - 0.5) * np.log1p(b / x)
        - (a - b)
        + _stirling_correction(ya)
        - _stirling_correction(yb)
    )


def gamma_ratio_shifted(x, a: float, b: float):
    """``Gamma(x + a) / Gamma(x + b)`` for large ``x`` and small offsets.

    ``x`` is meant to be an exactly representable base (typically an integer
    array); ``a`` and ``b`` are fixed offsets. Where ``x + min(a, b)`` is at
    least 10 the log-ratio is formed from differences of the Stirling series
    written around ``log x``, which avoids the cancellation between two large
    ``log Gamma`` values. Elsewhere the general path is used.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    big = (x + min(a, b)) >= _STIRLING_MIN
    if np.any(big):
        out[big] = np.exp(_log_ratio_stirling(x[big], a, b))
    if np.any(~big):
        out[~big] = _gamma_ratio_general(x[~big] + a, x[~big] + b)
    return float(out[0]) if scalar else out


def _gamma_ratio_general(a, b):
    la, sa = log_gamma_array(a)
    lb, sb = log_gamma_array(b)
    if np.any(sa == 0):
        bad = np.asarray(a)[sa == 0]
        raise NumeratorPole(f"Gamma has a pole at numerator argument {bad[0]!r}")
    out = np.zeros_like(la)
    ok = sb != 0
    out[ok] = sa[ok] * sb[ok] * np.exp(la[ok] - lb[ok])
    return out


def gamma_ratio(a, b):
    """``Gamma(a) / Gamma(b)``; exactly ``0`` when ``b`` is a pole.

    Raises
    ------
    NumeratorPole
        If ``a`` is a nonpositive integer.
    """
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    b_arr = np.atleast_1d(np.asarray(b, dtype=float))
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    out = np.empty(a_arr.shape)
    lo = np.minimum(a_arr, b_arr)
    big = lo >= _STIRLING_MIN
    if np.any(big):
        # split off an exact integer base so the offsets stay small
        base = np.floor(lo[big]) - 1.0
        out[big] = np.exp(_log_ratio_stirling(base, a_arr[big] - base, b_arr[big] - base))
    if np.any(~big):
        out[~big] = _gamma_ratio_general(a_arr[~big], b_arr[~big])
    return out if (np.ndim(a) or np.ndim(b)) else float(out[0])


def binomial_real(a: float, b: float) -> float:
    """Generalised binomial coefficient ``Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1))``.

    A pole in the denominator makes the coefficient vanish.

    Raises
    ------
    IndeterminatePole
        Numerator and denominator both have poles.
    NumeratorPole
        Only the numerator has a pole (the value is infinite).
    """
    num = log_gamma(a + 1.0)
    d1 = log_gamma(b + 1.0)
    d2 = log_gamma(a - b + 1.0)
    if num.sign == 0:
        if d1.sign == 0 or d2.sign == 0:
            raise IndeterminatePole(f"binomial({a!r}, {b!r}) has coinciding poles")
        raise NumeratorPole(f"binomial({a!r}, {b!r}) is infinite")
    if d1.sign == 0 or d2.sign == 0:
        return 0.0
    return num.sign * d1.sign * d2.sign * math.exp(num.log_abs - d1.log_abs - d2.log_abs)


def pochhammer(beta: float, k: int) -> float:
    """Rising factorial ``beta (beta + 1) ... (beta + k - 1)``."""
    if k < 0:
        raise DomainError("pochhammer needs k >= 0")
    out = 1.0
    for j in range(k):
        out *= beta + j
    return out


def chebyshev_u(n: int, x: float) -> float:
    """Chebyshev polynomial of the second kind ``U_n(x)`` on ``[-1, 1]``.

    Inside ``|x| < 1 - 1e-8`` the trigonometric form
    ``sin((n + 1) t) / sin t`` with ``x = cos t`` is used; near the endpoints,
    where ``sin t`` is tiny, the three-term recurrence takes over.
    """
    if n < 0:
        raise DomainError("chebyshev_u needs n >= 0")
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"chebyshev_u is only defined here on [-1, 1], got x={x!r}")
    if n == 0:
        return 1.0
    if abs(x) < 1.0 - 1e-8:
        t = math.acos(x)
        return math.sin((n + 1) * t) / math.sin(t)
    u_prev, u = 1.0, 2.0 * x
    for _ in range(n - 1):
        u_prev, u = u, 2.0 * x * u - u_prev
    return u


def digamma(x: float) -> float:
    """Digamma function ``psi(x) = Gamma'(x) / Gamma(x)`` for real ``x``."""
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"digamma has a pole at {x!r}")
    if x < 0.5:
        # psi(1 - x) - psi(x) = pi cot(pi x)
        s = sinpi(x)
        c = sinpi(x + 0.5)
        return digamma(1.0 - x) - math.pi * c / s
    acc = 0.0
    while x < _STIRLING_MIN:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_DIGAMMA_COEFFS):
        series = series * inv2 + c
    return acc + math.log(x) - 0.5 / x - series * inv2


# --- quadrature ------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def quad_adaptive(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    endpoint_singularity_order: float = 0.0,
    tol: float = 1e-10,
    *,
    initial_panels: int = 4,
    order: int = 20,
    max_panels: int = 200_000,
) -> tuple[float, float]:
    """Adaptive composite Gauss-Legendre quadrature on ``[a, b]``.

    ``integrand`` must accept a numpy array of abscissae. An algebraic
    endpoint behaviour ``(t - a)**s`` at the left endpoint can be flagged with
    ``endpoint_singularity_order=s`` (``s > -1``); the integral is then taken in
    the variable ``u`` with ``t = a + (b - a) u**p``, where the integer ``p`` is
    chosen so that the transformed integrand vanishes at least like ``u**3``.

    Every panel is compared against its two halves. A panel is accepted once
    that difference is below its share ``tol * width`` of the tolerance;
    otherwise it is bisected. All pending panels are evaluated in one
    vectorised call per sweep.

    Returns
    -------
    value, err_estimate
        The integral and the summed panel error estimates.

    Raises
    ------
    NoConvergence
        When the panel budget is exhausted before the tolerance is met.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    s = float(endpoint_singularity_order)
    if s <= -1.0:
        raise DomainError("endpoint singularity must be integrable (order > -1)")
    length = b - a
    if s != 0.0 and length != 0.0:
        p = max(1, math.ceil(4.0 / (1.0 + s)))

        def g(u):
            up = u ** (p - 1)
            return integrand(a + length * up * u) * (length * p * up)

        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = integrand, a, b

    nodes, weights = _gauss_legendre(order)
    edges = np.linspace(lo, hi, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    total = 0.0
    err_total = 0.0
    comp = 0.0  # Kahan compensation for total
    span = hi - lo
    n_panels = left.size
    while left.size:
        mid = 0.5 * (left + right)
        half = 0.5 * (right - left)
        quarter = 0.5 * half
        # whole panel, left half, right half
        centres = np.concatenate([mid, 0.5 * (left + mid), 0.5 * (mid + right)])
        radii = np.concatenate([half, quarter, quarter])
        pts = centres[:, None] + radii[:, None] * nodes[None, :]
        vals = np.asarray(g(pts), dtype=float).reshape(pts.shape)
        ints = radii * (vals @ weights)
        k = left.size
        coarse = ints[:k]
        fine = ints[k : 2 * k] + ints[2 * k :]
        err = np.abs(fine - coarse)
        ok = err <= tol * (right - left) / span
        for v in fine[ok]:
            y = v - comp
            t = total + y
            comp = (t - total) - y
            total = t
        err_total += float(err[ok].sum())
        bad = ~ok
        if not np.any(bad):
            break
        n_panels += int(bad.sum())
        if n_panels > max_panels:
            raise NoConvergence(
                f"quadrature panel budget {max_panels} exhausted (tol={tol:g})"
            )
        lb, rb, mb = left[bad], right[bad], mid[bad]
        left = np.concatenate([lb, mb])
        right = np.concatenate([mb, rb])
    return total, err_total
