"""Criticality diagnostics: energies, ground-state representation, null-sequences,
null-criticality sums and Hardy-constant estimates from finite sections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lapack

from .errors import DomainError, InternalInconsistency
from .hardy_weights import WeightSpec, hardy_weight
from .kernel import (
    SECTION_CAP,
    KernelTable,
    LatticeFunction,
    TruncationPolicy,
    as_sigma,
    kernel_section,
    quadratic_form,
    tail_bounds,
)
from .riesz import riesz_potential

METHODS = ("direct", "graph_form", "simplified")


@dataclass(frozen=True)
class EnergyReport:
    """An energy value and a bound on what truncation left out.

    The exact energy lies in ``[value + tail_lo, value + tail_hi]``.
    """

    value: float
    tail_lo: float
    tail_hi: float
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")

    @property
    def truncation_tail(self) -> float:
        return max(-self.tail_lo, self.tail_hi, 0.0)

    @property
    def lower(self) -> float:
        return self.value + self.tail_lo

    @property
    def upper(self) -> float:
        return self.value + self.tail_hi


@dataclass(frozen=True)
class EigenEstimate:
    window_start: int
    window_len: int
    lambda_min: float
    iterations: int


# --- null-sequence -----------------------------------------------------------


def null_sequence(k: int, n):
    """Logarithmic cut-off ``phi_k``: 1 up to ``k``, ``2 - log n / log k`` up to ``k**2``, then 0."""
    if k < 2:
        raise DomainError("null_sequence needs k >= 2")
    n_arr = np.atleast_1d(np.asarray(n, dtype=float))
    if np.any(n_arr < 1):
        raise DomainError("null_sequence needs n >= 1")
    out = np.where(n_arr <= k, 1.0, 2.0 - np.log(n_arr) / math.log(k))
    out = np.where(n_arr > k * k, 0.0, out)
    return out if np.ndim(n) else float(out[0])


def null_sequence_function(k: int) -> LatticeFunction:
    """``phi_k`` as a :class:`LatticeFunction` on ``[1, k**2]``."""
    return LatticeFunction(1, null_sequence(k, np.arange(1, k * k + 1)))


# --- energies ----------------------------------------------------------------


def energy_functional(
    sigma,
    W: Callable[[np.ndarray], np.ndarray],
    phi: LatticeFunction,
    policy: TruncationPolicy | None = None,
    method: str = "graph_form",
) -> EnergyReport:
    """``<phi, (-Delta)^sigma phi> - sum W phi**2``.

    ``method="direct"`` uses the finite double sum (no truncation);
    ``"graph_form"`` uses the edge/potential decomposition with its tail.
    """
    s = as_sigma(sigma)
    qf = quadratic_form(s, phi, policy)
    weight_part = math.fsum(np.asarray(W(phi.indices), dtype=float) * phi.values**2)
    if method == "direct":
        return EnergyReport(qf.direct - weight_part, 0.0, 0.0, "direct")
    if method == "graph_form":
        return EnergyReport(qf.value - weight_part, qf.tail_lo, qf.tail_hi, "graph_form")
    raise DomainError(f"energy_functional method must be 'direct' or 'graph_form', got {method!r}")


def _outer_rows(table: KernelTable, idx: np.ndarray, M: int, chunk: int = 64):
    """Yield ``(offset, rows, others, block)`` with ``block[i, j] = K[others[j], rows[i]]``."""
    if table.sigma == 1.0:
        # tridiagonal: only the two neighbours of the support matter
        others = np.array([m for m in (idx[0] - 1, idx[-1] + 1) if m >= 1], dtype=np.int64)
    else:
        others = np.concatenate([np.arange(1, idx[0]), np.arange(idx[-1] + 1, M + 1)])
    for lo in range(0, idx.size, chunk):
        rows = idx[lo : lo + chunk]
        yield lo, rows, others, table.block(others[None, :], rows[:, None])


def simplified_energy(
    sigma, alpha, phi: LatticeFunction, policy: TruncationPolicy | None = None
) -> EnergyReport:
    """``(1/2) sum_{m != n} (-K[m, n]) I(n) I(m) (phi(n) - phi(m))**2`` with ``I = I_alpha``.

    Pairs with both ends in the support are summed exactly. Pairs leaving the
    support are summed up to ``policy.n_max`` (default ``64 * max(support)``);
    the rest is bounded using the growth ``m**(2 alpha - 2)`` of ``I_alpha``.
    """
    spec = WeightSpec(sigma, alpha)
    s, a = spec.sigma, spec.alpha
    idx = phi.indices
    v = phi.values
    if policy is None:
        policy = TruncationPolicy(n_max=64 * int(idx[-1]), tail_tol=1.0)
    M = policy.n_max
    if M <= 2 * idx[-1]:
        raise DomainError("n_max must exceed twice the end of the support")
    table = KernelTable(s, M)
    I = riesz_potential(a, np.arange(1, M + 1))
    Is = I[idx - 1]

    block = table.block(idx[:, None], idx[None, :])
    np.fill_diagonal(block, 0.0)
    w = Is[:, None] * Is[None, :]
    inside = 0.5 * math.fsum((-block * w * (v[:, None] - v[None, :]) ** 2).ravel())

    parts = [inside]
    tail_lo = tail_hi = 0.0
    beyond = None
    for lo, rows, others, rblock in _outer_rows(table, idx, M):
        if beyond is None:
            beyond = others > idx[-1]
        if others.size == 0:
            break
        c = v[lo : lo + rows.size] ** 2 * Is[lo : lo + rows.size]
        terms = rblock * I[others - 1][None, :]
        # off-diagonal entries share one sign for sigma <= 1, so plain sums are accurate
        parts.append(-math.fsum(c * terms.sum(axis=1)))
        if s == 1.0:
            continue
        bounds = tail_bounds(s, rows, others[beyond], terms[:, beyond], 2.0 * a - 2.0, policy)
        # the tail of sum K I is in [-bound, 0] and enters with a minus sign
        tail_hi += math.fsum(c * bounds)
    return EnergyReport(math.fsum(parts), tail_lo, tail_hi, "simplified")


@dataclass(frozen=True)
class GSRCheck:
    """``|Q_W(phi) - Q_simplified(phi / I)|`` with the tolerance it must meet."""

    energy: EnergyReport
    simplified: EnergyReport
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def gsr_residual(
    sigma,
    alpha,
    phi: LatticeFunction,
    policy: TruncationPolicy | None = None,
    abs_tol: float = 1e-8,
) -> GSRCheck:
    """Compare the weighted energy of ``phi`` with the simplified energy of ``phi / I_alpha``.

    The weighted energy uses the exact finite double sum, so the tolerance is
    ``abs_tol`` plus the truncation tail of the simplified energy.
    """
    spec = WeightSpec(sigma, alpha)
    E = energy_functional(spec.sigma, lambda n: hardy_weight(spec, n), phi, method="direct")
    psi = LatticeFunction(phi.support_start, phi.values / riesz_potential(spec.alpha, phi.indices))
    Q = simplified_energy(spec.sigma, spec.alpha, psi, policy)
    residual = abs(E.value - Q.value)
    return GSRCheck(E, Q, residual, abs_tol + Q.truncation_tail)


def null_energy_curve(
    sigma,
    alpha,
    k_list: Sequence[int] = (8, 16, 32, 64),
    tail_tol: float = 1.0,
    truncation_factor: int = 16,
) -> list[tuple[int, EnergyReport]]:
    """Simplified energies of the null-sequence ``phi_k`` for each ``k``.

    The outer sum for ``phi_k`` is truncated at ``truncation_factor * k**2``.
    """
    out = []
    for k in k_list:
        phi = null_sequence_function(int(k))
        policy = TruncationPolicy(n_max=truncation_factor * int(k) ** 2, tail_tol=tail_tol)
        out.append((int(k), simplified_energy(sigma, alpha, phi, policy)))
    return out


# --- null-criticality ------------------------------------------------------------


def null_criticality_sum(sigma, alpha, N: int) -> float:
    """``S(N) = sum_{n <= N} I_alpha(n)**2 W(n) = sum I_alpha(n) I_(alpha - sigma)(n)``."""
    spec = WeightSpec(sigma, alpha)
    if N < 1:
        raise DomainError("N must be positive")
    n = np.arange(1, N + 1)
    return math.fsum(riesz_potential(spec.alpha, n) * riesz_potential(spec.alpha - spec.sigma, n))


@dataclass(frozen=True)
class DoublingIncrements:
    """``S(2N) - S(N)`` along ``N`` and the power law they imply."""

    N: tuple[int, ...]
    increments: tuple[float, ...]
    expected_exponent: float

    @property
    def observed_exponents(self) -> tuple[float, ...]:
        """Slopes of ``log increment`` against ``log N`` between consecutive ``N``."""
        out = []
        for (n0, i0), (n1, i1) in zip(zip(self.N, self.increments), zip(self.N[1:], self.increments[1:])):
            out.append(math.log(i1 / i0) / math.log(n1 / n0))
        return tuple(out)


def null_criticality_increments(sigma, alpha, N_list: Sequence[int] = (1_000, 10_000, 100_000)) -> DoublingIncrements:
    """Doubling increments of :func:`null_criticality_sum`.

    The summand behaves like ``n**(4 alpha - 4 - 2 sigma)``, so the increments
    scale like ``N**(4 alpha - 3 - 2 sigma)``; at the critical index the
    exponent is 0 and the increments settle to a constant.
    """
    spec = WeightSpec(sigma, alpha)
    incs = []
    for N in N_list:
        n = np.arange(N + 1, 2 * N + 1)
        incs.append(math.fsum(riesz_potential(spec.alpha, n) * riesz_potential(spec.alpha - spec.sigma, n)))
    return DoublingIncrements(tuple(int(N) for N in N_list), tuple(incs), 4 * spec.alpha - 3 - 2 * spec.sigma)


# --- eigenvalues -------------------------------------------------------------------


def _sturm_count(d: np.ndarray, e2: np.ndarray, x: float, pivmin: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix below ``x``."""
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def tridiagonal_eigen_min(d, e, max_iter: int = 200) -> tuple[float, int]:
    """Smallest eigenvalue of the symmetric tridiagonal ``(d, e)`` by Sturm bisection.

    Returns the value and the number of bisection steps.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if d.size == 1:
        return float(d[0]), 0
    ae = np.abs(e)
    radius = np.concatenate([ae, [0.0]]) + np.concatenate([[0.0], ae])
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    norm = max(abs(lo), abs(hi), np.finfo(float).tiny)
    eps = np.finfo(float).eps
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(e * e)))
    e2 = e * e
    # shrink hi towards the smallest eigenvalue
    it = 0
    while it < max_iter and hi - lo > 2.0 * eps * norm:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e2, mid, pivmin) >= 1:
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi), it


def symmetric_eigen_min(A, return_iterations: bool = False):
    """Smallest eigenvalue of a dense symmetric matrix.

    Householder tridiagonalization (LAPACK ``dsytrd``) followed by bisection on
    the Sturm sequence of the tridiagonal matrix.
    """
    A = np.array(A, dtype=float, order="F")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(A))))):
        raise DomainError("matrix must be symmetric")
    if A.shape[0] == 1:
        val, it = float(A[0, 0]), 0
    else:
        _, d, e, _, info = lapack.dsytrd(A, lower=1)
        if info != 0:
            raise InternalInconsistency(f"dsytrd failed with info={info}")
        val, it = tridiagonal_eigen_min(d, e)
    return (val, it) if return_iterations else val


def hardy_constant_estimate(sigma, N: int, window_start: int = 1) -> EigenEstimate:
    """Smallest generalized eigenvalue of the kernel against ``diag(n**(-2 sigma))`` on a window.

    The window is ``[window_start, window_start + N)`` with Dirichlet conditions
    outside; the result is the infimum of the Rayleigh quotient
    ``<f, K f> / sum n**(-2 sigma) f(n)**2`` over that window, hence an upper
    bound on the best constant (near infinity when ``window_start > 1``).
    """
    s = as_sigma(sigma)
    if not (0.0 < s <= 1.0):
        raise DomainError("hardy_constant_estimate needs 0 < sigma <= 1")
    if N < 2:
        raise DomainError("N must be at least 2")
    if window_start < 1:
        raise DomainError("window_start must be positive")
    if N > SECTION_CAP:
        raise DomainError(f"window length {N} exceeds {SECTION_CAP}")
    K = kernel_section(s, N, start=window_start)
    scale = np.arange(window_start, window_start + N, dtype=float) ** s
    B = scale[:, None] * K * scale[None, :]
    lam, it = symmetric_eigen_min(0.5 * (B + B.T), return_iterations=True)
    return EigenEstimate(int(window_start), int(N), float(lam), int(it))
