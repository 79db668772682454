"""Riesz potentials on the half-line lattice and the Green function they give.

The Riesz potential of order ``alpha`` in (0, 3/2) is

    I_alpha(n) = 4**(-alpha) / sqrt(2) * Gamma(3/2 - alpha) / Gamma(alpha)
                 * Gamma(n + alpha - 1) / Gamma(n - alpha + 2) * 4 n,

strictly positive with growth ``n**(2 alpha - 2)``. It satisfies
``(-Delta)^sigma I_alpha = I_(alpha - sigma)`` for ``sigma < alpha < 1 + sigma``,
which :func:`mellin_identity_residual` checks numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PolicyRejected
from .kernel import TailSum, TruncationPolicy, apply_operator_tabulated, as_sigma
from .special_fn import gamma_ratio, gamma_ratio_shifted, quad_adaptive

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class RieszIndex:
    """Order ``alpha`` of a Riesz potential, ``0 < alpha < 3/2``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a < 1.5):
            raise DomainError(f"alpha must lie in (0, 3/2), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def as_alpha(alpha) -> float:
    if isinstance(alpha, RieszIndex):
        return alpha.alpha
    return RieszIndex(alpha).alpha


def _riesz_prefactor(a: float) -> float:
    return 4.0 ** (-a) / math.sqrt(2.0) * gamma_ratio(1.5 - a, a) * 4.0


def riesz_potential(alpha, n):
    """Closed-form ``I_alpha(n)``; ``n`` may be an integer array."""
    a = as_alpha(alpha)
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(n_arr < 1):
        raise DomainError("riesz_potential needs n >= 1")
    nf = n_arr.astype(float)
    out = _riesz_prefactor(a) * nf * gamma_ratio_shifted(nf, a - 1.0, 2.0 - a)
    return out if np.ndim(n) else float(out[0])


def riesz_oracle(alpha, n: int, tol: float = 1e-10) -> float:
    """``I_alpha(n)`` by quadrature of its spectral integral.

    After ``x = cos t`` the integrand is
    ``sqrt(2/pi) sin(n t) sin(t) (4 sin(t/2)**2)**(-alpha)``, which behaves like
    ``t**(2 - 2 alpha)`` at ``t = 0``.
    """
    a = as_alpha(alpha)
    if tol <= 0:
        raise DomainError("tol must be positive")

    def f(t):
        return np.sin(n * t) * np.sin(t) * (4.0 * np.sin(0.5 * t) ** 2) ** (-a)

    val, _ = quad_adaptive(
        f, 0.0, math.pi, 2.0 - 2.0 * a, tol / _SQRT_2_OVER_PI, initial_panels=max(4, n // 2)
    )
    return _SQRT_2_OVER_PI * val


def riesz_regularized(alpha, epsilon: float, n: int, tol: float = 1e-10) -> float:
    """Regularised potential with ``(1 + epsilon - x)**(-alpha)`` in place of ``(1 - x)**(-alpha)``.

    Converges pointwise to :func:`riesz_potential` as ``epsilon -> 0``.
    """
    a = as_alpha(alpha)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")

    def f(t):
        return np.sin(n * t) * np.sin(t) * (2.0 * (epsilon + 2.0 * np.sin(0.5 * t) ** 2)) ** (-a)

    # the integrand is smooth but has a narrow peak of width ~sqrt(epsilon) at t = 0
    val, _ = quad_adaptive(
        f, 0.0, math.pi, 0.0, tol / _SQRT_2_OVER_PI, initial_panels=max(8, n // 2)
    )
    return _SQRT_2_OVER_PI * val


def green_function(sigma, n):
    """Minimal positive Green function ``G_sigma = sqrt(2/pi) I_sigma`` for ``sigma <= 1``."""
    s = as_sigma(sigma)
    if s > 1.0:
        raise DomainError("the Green function is only provided for sigma <= 1")
    return _SQRT_2_OVER_PI * riesz_potential(s, n)


def riesz_asymptotic_constant(alpha) -> float:
    """``c`` with ``I_alpha(n) ~ c n**(2 alpha - 2)``."""
    a = as_alpha(alpha)
    return 2.0 * math.sqrt(2.0) * 4.0 ** (-a) * gamma_ratio(1.5 - a, a)


@dataclass(frozen=True)
class MellinCheck:
    """Outcome of comparing ``(-Delta)^sigma I_alpha`` with ``I_(alpha - sigma)`` at one site."""

    sigma: float
    alpha: float
    n: int
    lhs: TailSum
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs.value - self.rhs)

    @property
    def relative_residual(self) -> float:
        return self.residual / abs(self.rhs)

    @property
    def bracketed(self) -> bool:
        return self.lhs.contains(self.rhs)


def _check_mellin_pair(s: float, a: float) -> None:
    if not (s < a < 1.0 + s):
        raise DomainError(f"need sigma < alpha < 1 + sigma, got sigma={s}, alpha={a}")
    as_alpha(a)
    as_alpha(a - s)


def mellin_identity_residual(
    sigma, alpha, n: int, policy: TruncationPolicy | None = None
) -> MellinCheck:
    """Apply the kernel to ``I_alpha`` tabulated on ``[1, n_max]`` and compare at ``n``.

    The tail beyond the table is bounded using the growth exponent
    ``2 alpha - 2`` of ``I_alpha``.
    """
    s = as_sigma(sigma)
    a = float(alpha)
    _check_mellin_pair(s, a)
    policy = policy or TruncationPolicy()
    table = riesz_potential(a, np.arange(1, policy.n_max + 1))
    lhs = apply_operator_tabulated(s, table, n, 2.0 * a - 2.0, policy)
    return MellinCheck(s, a, n, lhs, riesz_potential(a - s, n))


def mellin_identity_adaptive(
    sigma,
    alpha,
    n: int,
    rel_tol: float = 1e-3,
    n_max_list=(1_000, 10_000, 100_000, 1_000_000),
    tail_tol: float = 1.0,
) -> MellinCheck:
    """Grow the table until the residual is within ``rel_tol`` and the tail interval.

    Returns the first check that meets both; if none does, the last attempt is
    returned so the caller can report it.
    """
    last = None
    for n_max in n_max_list:
        if n_max <= 2 * n:
            continue
        try:
            chk = mellin_identity_residual(sigma, alpha, n, TruncationPolicy(n_max=n_max, tail_tol=tail_tol))
        except PolicyRejected:
            continue
        last = chk
        if chk.relative_residual <= rel_tol and chk.lhs.width <= rel_tol * abs(chk.rhs):
            return chk
    if last is None:
        raise PolicyRejected(f"no admissible table size for sigma={sigma}, alpha={alpha}, n={n}")
    return last
