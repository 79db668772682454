"""Residual checks of exact identities against brute-force or quadrature evaluations.

Every check produces a :class:`ResidualRecord`; suites bundle them into a
:class:`VerificationReport`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleConfiguration
from .kernel import as_sigma, kernel_sign_scan
from .riesz import (
    mellin_identity_adaptive,
    riesz_asymptotic_constant,
    riesz_potential,
)
from .hardy_weights import WeightSpec, hardy_weight, psi_constant
from .special_fn import binomial_real, gamma_ratio, log_gamma, quad_adaptive, sinpi

LEMMA_RTOL = 1e-10
J_BETA_RTOL = 1e-7
POLE_GAP = 1e-3


@dataclass(frozen=True)
class ResidualRecord:
    """One identity check; ``passed`` holds exactly when ``abs_residual <= tolerance``."""

    name: str
    parameters: dict
    lhs: float
    rhs: float
    abs_residual: float
    tolerance: float
    method: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.abs_residual <= self.tolerance))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": dict(self.parameters),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "tolerance": self.tolerance,
            "method": self.method,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    records: tuple[ResidualRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[ResidualRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "records": [r.to_dict() for r in self.records],
        }


def _record(name, params, lhs, rhs, rtol, method="") -> ResidualRecord:
    lhs, rhs = float(lhs), float(rhs)
    return ResidualRecord(name, params, lhs, rhs, abs(lhs - rhs), rtol * max(1.0, abs(rhs)), method)


def _gamma_fraction(num: float, *den: float) -> float:
    """``Gamma(num) / prod Gamma(den)`` with ``1/Gamma(pole) = 0``."""
    top = log_gamma(num)
    if top.sign == 0:
        raise PoleConfiguration(f"Gamma({num}) sits on a pole")
    log_abs, sign = top.log_abs, top.sign
    for d in den:
        lg = log_gamma(d)
        if lg.sign == 0:
            return 0.0
        log_abs -= lg.log_abs
        sign *= lg.sign
    return sign * math.exp(log_abs)


def _check_two_sigma(sigma: float) -> None:
    if 2.0 * sigma <= 0 and 2.0 * sigma == math.floor(2.0 * sigma):
        raise PoleConfiguration(f"Gamma(2 sigma) has a pole at sigma={sigma}")


def _alternating_sum(terms) -> float:
    return math.fsum(terms)


# --- binomial sums ---------------------------------------------------------------


def lemma_sum1_residual(sigma: float, n: int) -> ResidualRecord:
    """``sum_{m<n} (-1)**m C(2s, s+m)`` against its two-term Gamma closed form."""
    s = float(sigma)
    if n < 1:
        raise DomainError("n must be positive")
    _check_two_sigma(s)
    lhs = _alternating_sum((-1) ** m * binomial_real(2 * s, s + m) for m in range(n))
    rhs = _gamma_fraction(2 * s, s, s + 1) + (-1) ** (n - 1) * _gamma_fraction(2 * s, s + n, s - n + 1)
    return _record("sum1", {"sigma": s, "n": n}, lhs, rhs, LEMMA_RTOL, "brute-force sum vs Gamma closed form")


def lemma_sum2_residual(sigma: float, n: int) -> ResidualRecord:
    """``sum_{m<n} (-1)**(m+1) C(2s, s+m+1)`` against its closed form."""
    s = float(sigma)
    if n < 1:
        raise DomainError("n must be positive")
    _check_two_sigma(s)
    lhs = _alternating_sum((-1) ** (m + 1) * binomial_real(2 * s, s + m + 1) for m in range(n))
    rhs = -_gamma_fraction(2 * s, s, s + 1) + (-1) ** n * _gamma_fraction(2 * s, s - n, s + n + 1)
    return _record("sum2", {"sigma": s, "n": n}, lhs, rhs, LEMMA_RTOL, "brute-force sum vs Gamma closed form")


def lemma_potential_sum_residual(sigma: float, n: int) -> ResidualRecord:
    """``sum_{m=1-n}^{n} (-1)**m C(2s, s+m) = -2 (-1)**n n Gamma(2s) / (Gamma(1+s-n) Gamma(1+s+n))``."""
    s = float(sigma)
    if n < 1:
        raise DomainError("n must be positive")
    _check_two_sigma(s)
    lhs = _alternating_sum((-1) ** (m % 2) * binomial_real(2 * s, s + m) for m in range(1 - n, n + 1))
    rhs = -2.0 * (-1) ** n * n * _gamma_fraction(2 * s, 1 + s - n, 1 + s + n)
    return _record("potential_sum", {"sigma": s, "n": n}, lhs, rhs, LEMMA_RTOL, "brute-force sum vs Gamma closed form")


def lemma_simpriesz_residual(alpha: float, n: int) -> ResidualRecord:
    """``Gamma(a-n-1)/Gamma(-n-a) - Gamma(a+n-1)/Gamma(n-a) = 2n(2a-1) Gamma(n+a-1)/Gamma(n-a+2)``.

    Integer ``alpha`` puts numerator and denominator on poles at once and is
    rejected.
    """
    a = float(alpha)
    if n < 1:
        raise DomainError("n must be positive")
    if a == math.floor(a):
        raise PoleConfiguration(f"integer alpha={a} makes the left side indeterminate")
    lhs = gamma_ratio(a - n - 1, -n - a) - gamma_ratio(a + n - 1, n - a)
    rhs = gamma_ratio(n + a - 1, n - a + 2) * 2 * n * (2 * a - 1)
    return _record("simpriesz", {"alpha": a, "n": n}, lhs, rhs, LEMMA_RTOL, "reflected Gamma ratios vs closed form")


# --- J_beta --------------------------------------------------------------------------


def _check_beta(b: float, m: int) -> None:
    if not (0.0 < b < 1.5):
        raise DomainError("beta must lie in (0, 3/2)")
    if b == 0.5:
        raise DomainError("undefined at beta = 1/2 (tan pole); use the quadrature")
    if m < 1:
        raise DomainError("m must be positive")


def _pochhammer_ratio(b: float, m: int) -> float:
    """``(b)_{2m} / (1 - b)_{2m}`` as Gamma ratios."""
    return gamma_ratio(b + 2 * m, 1 - b + 2 * m) * gamma_ratio(1 - b, b)


def _tan_pi(b: float) -> float:
    return sinpi(b) / sinpi(0.5 - b)


def j_beta(beta: float, m: int) -> float:
    """``1 - (b)_{2m} / (1 - b)_{2m} * tan(pi b)`` with the Pochhammer ratio as Gamma ratios.

    At ``b = 1`` the removable singularity is replaced by its limit ``1 + 2 pi m``.
    """
    b = float(beta)
    _check_beta(b, m)
    if b == 1.0:
        return 1.0 + 2.0 * math.pi * m
    return 1.0 - _pochhammer_ratio(b, m) * _tan_pi(b)


def _J_prefactor(b: float) -> float:
    return 2.0 ** (b - 2.0) * math.gamma(b) * gamma_ratio(b, 2.0 * b)


def J_beta_closed_form(beta: float, m: int) -> float:
    """``2**(b-2) Gamma(b)**2 / Gamma(2b) * tan(pi b) * (1 - (b)_{2m} / (1 - b)_{2m})``.

    This equals ``2**(b-2) Gamma(b)**2 / Gamma(2b) * j_beta(m)`` only at
    ``b = 1/4``; elsewhere the two differ by the ``m``-independent amount
    :func:`j_beta_offset`. The form here agrees with :func:`J_beta_oracle`.
    At ``b = 1`` the limit ``2 pi m * Gamma(1)**2 / (2 Gamma(2))`` is used.
    """
    b = float(beta)
    _check_beta(b, m)
    if b == 1.0:
        return _J_prefactor(b) * 2.0 * math.pi * m
    return _J_prefactor(b) * _tan_pi(b) * (1.0 - _pochhammer_ratio(b, m))


def j_beta_offset(beta: float) -> float:
    """``2**(b-2) Gamma(b)**2 / Gamma(2b) * j_beta(m) - J_beta(m)``, the same for every ``m``."""
    b = float(beta)
    _check_beta(b, 1)
    if b == 1.0:
        return _J_prefactor(b)
    return _J_prefactor(b) * (1.0 - _tan_pi(b))


def J_beta_oracle(beta: float, m: int, tol: float = 1e-10) -> float:
    """``int_{-1}^{1} U_{m-1}(x)**2 (1 - x)**(-b) sqrt(1 - x**2) dx`` by quadrature.

    With ``x = cos t`` the integrand is ``sin(m t)**2 (2 sin(t/2)**2)**(-b)``,
    of order ``t**(2 - 2b)`` at ``t = 0``.
    """
    b = float(beta)
    if not (0.0 < b < 1.5):
        raise DomainError("beta must lie in (0, 3/2)")
    if m < 1:
        raise DomainError("m must be positive")
    if tol <= 0:
        raise DomainError("tol must be positive")

    def f(t):
        return np.sin(m * t) ** 2 * (2.0 * np.sin(0.5 * t) ** 2) ** (-b)

    val, _ = quad_adaptive(f, 0.0, math.pi, 2.0 - 2.0 * b, tol, initial_panels=max(4, m // 2))
    return val


def j_beta_residual(beta: float, m: int, rtol: float = J_BETA_RTOL) -> ResidualRecord:
    closed = J_beta_closed_form(beta, m)
    quad = J_beta_oracle(beta, m, tol=1e-3 * rtol * abs(closed))
    return ResidualRecord(
        "J_beta",
        {"beta": float(beta), "m": int(m)},
        quad,
        closed,
        abs(quad - closed),
        rtol * abs(closed),
        "quadrature vs tan-factored Pochhammer closed form",
    )


def half_beta_log_growth(m_list=(10, 100, 1000), rel_tol: float = 0.1) -> ResidualRecord:
    """At ``beta = 1/2`` the increments of ``J`` over equal steps in ``log m`` must settle.

    ``lhs`` is the second difference, ``rhs`` the first; the check passes when
    ``|second| <= rel_tol * |first|``.
    """
    J = [J_beta_oracle(0.5, m, tol=1e-10) for m in m_list]
    first = J[1] - J[0]
    second = (J[2] - J[1]) - first
    return ResidualRecord(
        "J_half_log_growth",
        {"beta": 0.5, "m": list(m_list)},
        second,
        first,
        abs(second),
        rel_tol * abs(first),
        "second vs first difference along log m",
    )


# --- suites --------------------------------------------------------------------------


def _draw_away_from_poles(rng: np.random.Generator, lo: float, hi: float, lattice: float) -> float:
    """Uniform draw on ``(lo, hi)`` redrawn while within ``POLE_GAP`` of ``lattice * Z``."""
    while True:
        x = float(rng.uniform(lo, hi))
        r = x / lattice
        if abs(r - round(r)) * lattice >= POLE_GAP:
            return x


def appendix_suite(seed: int = 0, draws: int = 20, n_max: int = 40) -> VerificationReport:
    """All four binomial and Gamma identities on random draws, then the ``J_beta`` checks.

    ``sigma`` is drawn from ``(0, 3/2)`` away from half-integers (every Gamma
    argument is ``sigma`` or ``2 sigma`` plus an integer); ``alpha`` likewise
    away from integers.
    """
    rng = np.random.default_rng(seed)
    records = []
    for fn in (lemma_sum1_residual, lemma_sum2_residual, lemma_potential_sum_residual):
        for _ in range(draws):
            s = _draw_away_from_poles(rng, 0.0, 1.5, 0.5)
            records.append(fn(s, int(rng.integers(1, n_max + 1))))
    for _ in range(draws):
        a = _draw_away_from_poles(rng, 0.0, 1.5, 1.0)
        records.append(lemma_simpriesz_residual(a, int(rng.integers(1, n_max + 1))))
    for b in (0.25, 0.4, 0.75, 1.1):
        for m in (1, 2, 5, 10, 20, 30):
            records.append(j_beta_residual(b, m))
    records.append(half_beta_log_growth())
    return VerificationReport("appendix", tuple(records))


def signs_suite(N: int = 200, sigmas=(0.25, 0.5, 1.0, 1.25)) -> VerificationReport:
    """Off-diagonal sign scan; ``sigma <= 1`` must be nonpositive, ``sigma > 1`` must not.

    ``lhs`` is the largest off-diagonal entry and ``rhs`` is 0. For
    ``sigma > 1`` the record passes when a positive witness exists.
    """
    records = []
    for s in sigmas:
        s = as_sigma(s)
        scan = kernel_sign_scan(s, N)
        top = scan.witness[2] if scan.witness else 0.0
        expect_nonpositive = s <= 1.0
        ok = scan.all_offdiag_nonpositive == expect_nonpositive
        params = {"sigma": s, "N": N, "witness": list(scan.witness) if scan.witness else None}
        records.append(
            ResidualRecord("sign_scan", params, top, 0.0, 0.0 if ok else 1.0, 0.0, "first positive off-diagonal entry")
        )
    return VerificationReport("signs", tuple(records))


def mellin_suite(
    pairs=((1.0, 1.25), (0.5, 1.0), (0.75, 1.2)), n_list=(1, 2, 5, 10, 20), rel_tol: float = 1e-3
) -> VerificationReport:
    """Kernel applied to ``I_alpha`` against ``I_(alpha - sigma)``.

    The tolerance is ``max(rel_tol * |rhs|, tail width)``.
    """
    records = []
    for s, a in pairs:
        for n in n_list:
            chk = mellin_identity_adaptive(s, a, n, rel_tol=rel_tol)
            tol = max(rel_tol * abs(chk.rhs), chk.lhs.width)
            params = {"sigma": s, "alpha": a, "n": n, "n_max": chk.lhs.n_max, "tail": [chk.lhs.tail_lo, chk.lhs.tail_hi]}
            records.append(ResidualRecord("mellin", params, chk.lhs.value, chk.rhs, chk.residual, tol, "tabulated kernel sum vs closed form"))
    return VerificationReport("mellin", tuple(records))


def asymptotics_suite(n: int = 10_000, rel_tol: float = 0.02) -> VerificationReport:
    """Power-law constants of ``I_alpha`` and ``W_{alpha, sigma}`` at a large site."""
    records = []
    for a in (0.5, 0.75, 1.25):
        ratio = riesz_potential(a, n) * n ** (2.0 - 2.0 * a) / riesz_asymptotic_constant(a)
        records.append(ResidualRecord("riesz_asymptotic", {"alpha": a, "n": n}, ratio, 1.0, abs(ratio - 1.0), rel_tol, "scaled potential vs 1"))
    for s, a in ((0.25, 0.5), (0.5, 1.0), (0.75, 1.1), (1.0, 1.25)):
        spec = WeightSpec(s, a)
        ratio = hardy_weight(spec, n) * n ** (2.0 * s) / psi_constant(s, a)
        records.append(ResidualRecord("weight_asymptotic", {"sigma": s, "alpha": a, "n": n}, ratio, 1.0, abs(ratio - 1.0), rel_tol, "scaled weight vs 1"))
    return VerificationReport("asymptotics", tuple(records))
