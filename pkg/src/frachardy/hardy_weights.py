"""Hardy weights ``W = I_(alpha - sigma) / I_alpha`` and the constants attached to them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalInconsistency
from .riesz import riesz_potential
from .special_fn import digamma, gamma_ratio, gamma_ratio_shifted

_AGREEMENT_RTOL = 1e-10


def critical_alpha(sigma: float) -> float:
    """The optimal index ``(3 + 2 sigma) / 4``."""
    return (3.0 + 2.0 * sigma) / 4.0


@dataclass(frozen=True)
class WeightSpec:
    """Admissible pair with ``0 < sigma <= 1`` and ``sigma < alpha < min(1 + sigma, 3/2)``."""

    sigma: float
    alpha: float

    def __post_init__(self):
        s, a = float(self.sigma), float(self.alpha)
        if not (0.0 < s <= 1.0):
            raise DomainError(f"Hardy weights need 0 < sigma <= 1, got {s}")
        if not (s < a < min(1.0 + s, 1.5)):
            raise DomainError(f"need sigma < alpha < min(1 + sigma, 3/2), got sigma={s}, alpha={a}")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def optimal(cls, sigma: float) -> "WeightSpec":
        return cls(sigma, critical_alpha(sigma))

    def classify(self) -> "WeightClassification":
        a_star = critical_alpha(self.sigma)
        return WeightClassification(
            is_hardy=True,
            is_critical=self.alpha <= a_star,
            is_optimal=self.alpha == a_star,
        )


@dataclass(frozen=True)
class WeightClassification:
    is_hardy: bool
    is_critical: bool
    is_optimal: bool


def psi_constant(sigma: float, alpha: float) -> float:
    """Asymptotic constant ``W(n) n**(2 sigma) -> Psi``.

    ``Psi = 4**s Gamma(3/2 - a + s) Gamma(a) / (Gamma(a - s) Gamma(3/2 - a))``.
    """
    s, a = float(sigma), float(alpha)
    if not (s < a < 1.5):
        raise DomainError(f"psi_constant needs sigma < alpha < 3/2, got sigma={s}, alpha={a}")
    return 4.0**s * gamma_ratio(1.5 - a + s, a - s) * gamma_ratio(a, 1.5 - a)


def psi_log_derivative(sigma: float, alpha: float) -> float:
    """``d/d alpha log Psi``: ``psi(a) - psi(a - s) - psi(3/2 - a + s) + psi(3/2 - a)``."""
    s, a = float(sigma), float(alpha)
    return digamma(a) - digamma(a - s) - digamma(1.5 - a + s) + digamma(1.5 - a)


def critical_constant(sigma: float) -> float:
    """``C_sigma = 4**s Gamma((3 + 2s)/4)**2 / Gamma((3 - 2s)/4)**2``."""
    s = float(sigma)
    if not (0.0 < s <= 1.0):
        raise DomainError("critical_constant needs 0 < sigma <= 1")
    return 4.0**s * gamma_ratio((3.0 + 2.0 * s) / 4.0, (3.0 - 2.0 * s) / 4.0) ** 2


def hardy_weight_closed_form(spec: WeightSpec, n):
    """The product-of-Gamma-ratios form of ``W_{alpha, sigma}(n)``."""
    s, a = spec.sigma, spec.alpha
    nf = np.atleast_1d(np.asarray(n, dtype=float))
    out = (
        psi_constant(s, a)
        * gamma_ratio_shifted(nf, a - s - 1.0, 2.0 - a + s)
        * gamma_ratio_shifted(nf, 2.0 - a, a - 1.0)
    )
    return out if np.ndim(n) else float(out[0])


def hardy_weight(spec: WeightSpec, n):
    """``W_{alpha, sigma}(n) = I_(alpha - sigma)(n) / I_alpha(n)``.

    The Gamma-product form is evaluated alongside as a check; a relative
    disagreement above ``1e-10`` raises :class:`InternalInconsistency`.
    """
    ratio = np.atleast_1d(riesz_potential(spec.alpha - spec.sigma, n) / riesz_potential(spec.alpha, n))
    closed = np.atleast_1d(hardy_weight_closed_form(spec, n))
    rel = np.max(np.abs(ratio - closed) / np.abs(closed))
    if rel > _AGREEMENT_RTOL:
        raise InternalInconsistency(
            f"weight paths disagree by {rel:.3g} for sigma={spec.sigma}, alpha={spec.alpha}"
        )
    return ratio if np.ndim(n) else float(ratio[0])


def optimal_weight(sigma: float, n):
    """The optimal weight, ``alpha = (3 + 2 sigma) / 4``."""
    return hardy_weight(WeightSpec.optimal(sigma), n)


def kpp_weight(n):
    """Keller-Pinchover-Pogorzelski weight ``2 - sqrt(1 + 1/n) - sqrt(1 - 1/n)``.

    Rearranged so that no cancellation occurs for large ``n``.
    """
    nf = np.atleast_1d(np.asarray(n, dtype=float))
    if np.any(nf < 1):
        raise DomainError("kpp_weight needs n >= 1")
    u = 1.0 / nf
    a, b = np.sqrt(1.0 + u), np.sqrt(1.0 - u)
    # 2 - a - b = (4 - (a + b)**2) / (2 + a + b) and (a + b)**2 = 2 + 2ab
    ab = np.sqrt(1.0 - u * u)
    # 2 - 2ab = 2 u**2 / (1 + ab)
    num = 2.0 * (u * u) / (1.0 + ab)
    out = num / (2.0 + a + b)
    return out if np.ndim(n) else float(out[0])


@dataclass(frozen=True)
class WeightComparison:
    n: np.ndarray
    kpp: np.ndarray
    op1: np.ndarray
    first_op_above: int | None
    kpp_larger_at_1: bool
    op_larger_beyond_crossing: bool

    @property
    def diff(self) -> np.ndarray:
        return self.op1 - self.kpp


def weight_comparison(n_max: int) -> WeightComparison:
    """Tabulate the KPP weight against the optimal ``sigma = 1`` weight on ``[1, n_max]``."""
    if n_max < 2:
        raise DomainError("weight_comparison needs n_max >= 2")
    n = np.arange(1, n_max + 1)
    kpp = kpp_weight(n)
    op1 = optimal_weight(1.0, n)
    above = np.flatnonzero(op1 > kpp)
    first = int(n[above[0]]) if above.size else None
    beyond = bool(first is not None and np.all(op1[first - 1 :] > kpp[first - 1 :]))
    return WeightComparison(n, kpp, op1, first, bool(kpp[0] > op1[0]), beyond)
